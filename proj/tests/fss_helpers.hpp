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

#ifndef PIQLB_TESTS_FSS_HELPERS_HPP_
#define PIQLB_TESTS_FSS_HELPERS_HPP_

#include <algorithm>
#include <set>
#include <vector>

#include "piqlb/fss.hpp"

namespace piqlb::testing {

// Random point, interval, or disjoint sum over an n-bit domain.
inline fss::SecretFunction RandomFunction(fss::FunctionKind kind, unsigned n,
                                          const GroupElement& y,
                                          RandomSource& rng) {
  const std::uint64_t max = (std::uint64_t{1} << n) - 1;
  switch (kind) {
    case fss::FunctionKind::kPoint:
      return fss::SecretFunction::Point(n, rng.Between(0, max), y);
    case fss::FunctionKind::kInterval: {
      std::uint64_t a = rng.Between(0, max), b = rng.Between(0, max);
      if (a > b) std::swap(a, b);
      return fss::SecretFunction::Interval(n, a, b, y);
    }
    case fss::FunctionKind::kSum:
      break;
  }
  // Cut [0, max] at random points and keep a random subset of pieces as
  // points or intervals; pieces are disjoint by construction.
  std::set<std::uint64_t> cuts;
  const unsigned pieces = static_cast<unsigned>(std::min<std::uint64_t>(max, 4));
  while (cuts.size() < pieces) cuts.insert(rng.Between(1, max));
  std::vector<std::uint64_t> bounds{0};
  bounds.insert(bounds.end(), cuts.begin(), cuts.end());
  bounds.push_back(max + 1);
  const std::size_t piece_count = bounds.size() - 1;
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < piece_count; ++i) {
    if (rng.Coin()) chosen.push_back(i);
  }
  if (chosen.size() < 2) chosen = {0, piece_count - 1};
  std::vector<fss::SecretFunction> parts;
  for (std::size_t i : chosen) {
    const std::uint64_t lo = bounds[i], hi = bounds[i + 1] - 1;
    if (rng.Coin()) {
      parts.push_back(fss::SecretFunction::Point(n, rng.Between(lo, hi), y));
    } else {
      std::uint64_t a = rng.Between(lo, hi), b = rng.Between(lo, hi);
      if (a > b) std::swap(a, b);
      parts.push_back(fss::SecretFunction::Interval(n, a, b, y));
    }
  }
  return fss::SecretFunction::Sum(parts);
}

inline GroupElement Reconstruct(const std::vector<fss::FunctionShare>& shares,
                                u128 x) {
  GroupElement acc(0, shares.front().group());
  for (const auto& s : shares) acc = acc + s.Eval(x);
  return acc;
}

}  // namespace piqlb::testing

#endif  // PIQLB_TESTS_FSS_HELPERS_HPP_
