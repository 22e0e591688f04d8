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

#ifndef PIQLB_GROUP_HPP_
#define PIQLB_GROUP_HPP_

#include <cstdint>
#include <string>

#include "piqlb/bytes.hpp"
#include "piqlb/random.hpp"

namespace piqlb {

// Bit width limits for the additive group Z_{2^lambda}.
inline constexpr unsigned kMinLambdaBits = 1;
inline constexpr unsigned kMaxLambdaBits = 128;
inline constexpr unsigned kDefaultLambdaBits = 64;

inline constexpr u128 LowMask(unsigned bits) {
  return bits >= 128 ? ~u128{0} : (u128{1} << bits) - 1;
}

// The group Z_{2^lambda} under addition. Cheap to copy.
class Group {
 public:
  explicit Group(unsigned lambda_bits = kDefaultLambdaBits);

  unsigned bits() const { return bits_; }
  u128 mask() const { return mask_; }
  // Bytes needed to store one element: ceil(lambda / 8).
  std::size_t byte_width() const { return (bits_ + 7) / 8; }

  u128 Reduce(u128 v) const { return v & mask_; }
  u128 Random(RandomSource& rng) const { return rng.NextU128() & mask_; }
  // Uniform over the group minus the identity.
  u128 RandomNonZero(RandomSource& rng) const;

  friend bool operator==(const Group&, const Group&) = default;

 private:
  unsigned bits_;
  u128 mask_;
};

// An element of Z_{2^lambda}. The stored value is always reduced.
class GroupElement {
 public:
  GroupElement() : GroupElement(0, Group(kDefaultLambdaBits)) {}
  GroupElement(u128 value, Group group)
      : value_(group.Reduce(value)), group_(group) {}

  u128 value() const { return value_; }
  const Group& group() const { return group_; }
  unsigned lambda_bits() const { return group_.bits(); }
  bool is_zero() const { return value_ == 0; }

  GroupElement operator-() const { return {~value_ + 1, group_}; }
  // Scalar multiplication by a single bit.
  GroupElement Scaled(bool bit) const { return {bit ? value_ : 0, group_}; }

  std::string ToString() const { return U128ToString(value_); }

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.value_ == b.value_ && a.group_ == b.group_;
  }

 private:
  u128 value_;
  Group group_;
};

// Throws ConfigError when the operands live in different groups.
GroupElement GroupAdd(const GroupElement& a, const GroupElement& b);
GroupElement GroupSub(const GroupElement& a, const GroupElement& b);
inline GroupElement GroupNegate(const GroupElement& a) { return -a; }

inline GroupElement operator+(const GroupElement& a, const GroupElement& b) {
  return GroupAdd(a, b);
}
inline GroupElement operator-(const GroupElement& a, const GroupElement& b) {
  return GroupSub(a, b);
}

}  // namespace piqlb

#endif  // PIQLB_GROUP_HPP_
