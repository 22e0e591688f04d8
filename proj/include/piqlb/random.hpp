// Copyright 2026 The piqlb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PIQLB_RANDOM_HPP_
#define PIQLB_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>

#include "piqlb/bytes.hpp"

namespace piqlb {

// Source of randomness for key generation and sampling. Key generation takes
// one explicitly so tests can be reproducible.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void Fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t NextU64();
  u128 NextU128();
  // Uniform in [0, bound). bound > 0.
  std::uint64_t Uniform(std::uint64_t bound);
  // Uniform in [lo, hi].
  std::uint64_t Between(std::uint64_t lo, std::uint64_t hi);
  bool Coin() { return (NextU64() & 1) != 0; }
};

// Deterministic generator for tests and data generation. Not for keys that
// protect real queries.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  void Fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
};

// OpenSSL RAND_bytes.
class SystemRandom final : public RandomSource {
 public:
  void Fill(std::span<std::uint8_t> out) override;
};

}  // namespace piqlb

#endif  // PIQLB_RANDOM_HPP_
