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

#include "piqlb/group.hpp"

#include "piqlb/error.hpp"

namespace piqlb {

Group::Group(unsigned lambda_bits) : bits_(lambda_bits), mask_(0) {
  if (lambda_bits < kMinLambdaBits || lambda_bits > kMaxLambdaBits) {
    throw ConfigError("group size must be between 1 and 128 bits, got " +
                      std::to_string(lambda_bits));
  }
  mask_ = LowMask(lambda_bits);
}

u128 Group::RandomNonZero(RandomSource& rng) const {
  for (;;) {
    u128 v = Random(rng);
    if (v != 0) return v;
  }
}

namespace {

void CheckSameGroup(const GroupElement& a, const GroupElement& b) {
  if (a.group() != b.group()) {
    throw ConfigError("group elements from different groups: lambda " +
                      std::to_string(a.lambda_bits()) + " vs " +
                      std::to_string(b.lambda_bits()));
  }
}

}  // namespace

GroupElement GroupAdd(const GroupElement& a, const GroupElement& b) {
  CheckSameGroup(a, b);
  return {a.value() + b.value(), a.group()};
}

GroupElement GroupSub(const GroupElement& a, const GroupElement& b) {
  CheckSameGroup(a, b);
  return {a.value() - b.value(), a.group()};
}

}  // namespace piqlb
