// Copyright 2026 The mrnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MRNET_ERRORS_H_
#define MRNET_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter / model / edge dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Checkpoint files that fail the format contract.
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Bad configuration (missing keys, unparsable values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrnet

#endif  // MRNET_ERRORS_H_
