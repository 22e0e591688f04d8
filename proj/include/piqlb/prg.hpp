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

// Length-doubling PRG for the tree FSS backend.
//
// G is built from fixed-key AES-128 in Matyas-Meyer-Oseas mode:
//   H(x) = AES_k(x) XOR x,   k = "piqlb/prg/key/v1"
// and a node seed s (128 bits, low bit cleared) expands to
//   child(s, c)  = H(s XOR c)        for c in {0, 1}; low bit is the control bit
//   value(s, c)  = H(s XOR (2 + c))  correction values for comparison keys
//   convert(s)   = H(s XOR 4)        leaf-to-group conversion
// Blocks map to u128 little-endian. Every party must use the same PRG; the
// outputs are pinned by tests/data/prg_vectors.hex.

#ifndef PIQLB_PRG_HPP_
#define PIQLB_PRG_HPP_

#include "piqlb/bytes.hpp"

namespace piqlb::prg {

inline constexpr u128 kSeedMask = ~u128{1};

// AES-128 under the fixed key.
u128 FixedKeyAes(u128 block);

inline u128 Hash(u128 x) { return FixedKeyAes(x) ^ x; }

struct Child {
  u128 seed;
  bool control;
};

inline Child ExpandChild(u128 seed, bool right) {
  u128 h = Hash(seed ^ static_cast<u128>(right ? 1 : 0));
  return {h & kSeedMask, (h & 1) != 0};
}

inline u128 ExpandValue(u128 seed, bool right) {
  return Hash(seed ^ static_cast<u128>(right ? 3 : 2));
}

inline u128 Convert(u128 seed) { return Hash(seed ^ static_cast<u128>(4)); }

// Name of the compiled AES path ("aes-ni" or "openssl").
const char* BackendName();

}  // namespace piqlb::prg

#endif  // PIQLB_PRG_HPP_
