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

#include "piqlb/random.hpp"

#include <openssl/rand.h>

#include <array>
#include <limits>

namespace piqlb {

std::uint64_t RandomSource::NextU64() {
  std::array<std::uint8_t, 8> buf;
  Fill(buf);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

u128 RandomSource::NextU128() {
  u128 lo = NextU64();
  u128 hi = NextU64();
  return hi << 64 | lo;
}

std::uint64_t RandomSource::Uniform(std::uint64_t bound) {
  if (bound == 0) throw InputError("Uniform: bound must be positive");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t v = NextU64();
    if (v < limit) return v % bound;
  }
}

std::uint64_t RandomSource::Between(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw InputError("Between: empty range");
  if (lo == 0 && hi == std::numeric_limits<std::uint64_t>::max()) {
    return NextU64();
  }
  return lo + Uniform(hi - lo + 1);
}

void SeededRandom::Fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t w = engine_();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(w >> (8 * b));
    }
  }
}

void SystemRandom::Fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error("RAND_bytes failed");
  }
}

}  // namespace piqlb
