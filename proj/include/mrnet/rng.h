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

#ifndef MRNET_RNG_H_
#define MRNET_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mrnet {

using Engine = std::mt19937_64;

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a list of words into one seed; order matters.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// Uniform on the open interval (0, 1) from the top 53 bits of `bits`.
constexpr double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Stateless stream: the value at `counter` depends only on (key, counter).
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(mix64(key)) {}
  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ ^ mix64(counter));
  }
  constexpr double uniform(std::uint64_t counter) const {
    return open_unit(bits(counter));
  }

 private:
  std::uint64_t key_;
};

}  // namespace mrnet

#endif  // MRNET_RNG_H_
