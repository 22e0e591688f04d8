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

// Function secret sharing for point, interval, and disjoint-sum functions
// f: {0,1}^n -> Z_{2^lambda}.
//
// Two backends produce interchangeable shares:
//  - kNaive: additive sharing of the full truth table. Any number of parties,
//    domain limited to kNaiveMaxDomainBits. Exact information-theoretic
//    hiding; also the correctness oracle for the tree backend.
//  - kTree: two-party PRG-tree keys of size O(n * lambda). Points use a
//    distributed point function; an interval [a, b] is the difference of two
//    distributed comparison functions, 1{x < b + 1} - 1{x < a}.
//
// Inputs are MSB-first n-bit strings held in the low bits of a u128.

#ifndef PIQLB_FSS_HPP_
#define PIQLB_FSS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "piqlb/bytes.hpp"
#include "piqlb/group.hpp"
#include "piqlb/random.hpp"

namespace piqlb::fss {

inline constexpr unsigned kMaxDomainBits = 128;
inline constexpr unsigned kNaiveMaxDomainBits = 24;
inline constexpr std::uint8_t kShareFormatVersion = 1;

enum class Backend : std::uint8_t { kNaive = 1, kTree = 2 };
enum class FunctionKind : std::uint8_t { kPoint = 1, kInterval = 2, kSum = 3 };

const char* BackendName(Backend b);

struct PointTerm {
  u128 point;
};
struct IntervalTerm {
  u128 lo;
  u128 hi;  // inclusive
};
using Term = std::variant<PointTerm, IntervalTerm>;

// f(x) = y when x hits one of the (pairwise disjoint) terms, 0 otherwise.
class SecretFunction {
 public:
  static SecretFunction Point(unsigned domain_bits, u128 point,
                              GroupElement y);
  static SecretFunction Interval(unsigned domain_bits, u128 lo, u128 hi,
                                 GroupElement y);
  // Sum of point/interval functions sharing y and the domain; the supports
  // must be pairwise disjoint.
  static SecretFunction Sum(std::span<const SecretFunction> parts);

  FunctionKind kind() const;
  unsigned domain_bits() const { return domain_bits_; }
  const GroupElement& y() const { return y_; }
  const std::vector<Term>& terms() const { return terms_; }

  // Plain evaluation; the reference every share set must reconstruct.
  GroupElement operator()(u128 x) const;

 private:
  SecretFunction(unsigned domain_bits, GroupElement y, std::vector<Term> terms)
      : domain_bits_(domain_bits), y_(y), terms_(std::move(terms)) {}

  unsigned domain_bits_;
  GroupElement y_;
  std::vector<Term> terms_;
};

// Tree key material. Point keys leave `value` at zero.
struct CorrectionWord {
  u128 seed = 0;
  u128 value = 0;
  bool control_left = false;
  bool control_right = false;
};

struct TreeKey {
  u128 root_seed = 0;
  std::vector<CorrectionWord> levels;
  u128 final_word = 0;
};

struct TreeIntervalKey {
  // Set when the interval reaches the top of the domain: the upper
  // comparison 1{x < 2^n} is constant and shared additively.
  bool upper_is_constant = false;
  u128 upper_constant = 0;
  TreeKey upper;
  TreeKey lower;
};

struct NaiveTable {
  std::vector<u128> entries;  // 2^n reduced group elements
};

class FunctionShare;

struct SumShare {
  std::vector<FunctionShare> parts;
};

using SharePayload =
    std::variant<NaiveTable, TreeKey, TreeIntervalKey, SumShare>;

// One party's key. Immutable; Eval may be called concurrently.
class FunctionShare {
 public:
  FunctionShare(unsigned party_index, Backend backend, FunctionKind kind,
                unsigned domain_bits, unsigned lambda_bits,
                SharePayload payload);

  unsigned party_index() const { return party_index_; }
  Backend backend() const { return backend_; }
  FunctionKind kind() const { return kind_; }
  unsigned domain_bits() const { return domain_bits_; }
  unsigned lambda_bits() const { return lambda_bits_; }
  Group group() const { return Group(lambda_bits_); }
  const SharePayload& payload() const { return payload_; }

  // Throws InputError if x does not fit in domain_bits.
  GroupElement Eval(u128 x) const;
  // Unchecked reduced value; x must already be in the domain.
  u128 EvalRaw(u128 x) const;

  friend bool operator==(const FunctionShare&, const FunctionShare&);

 private:
  unsigned party_index_;
  Backend backend_;
  FunctionKind kind_;
  unsigned domain_bits_;
  unsigned lambda_bits_;
  SharePayload payload_;
};

struct GenOptions {
  Backend backend = Backend::kTree;
  unsigned party_count = 2;
  unsigned naive_max_domain_bits = kNaiveMaxDomainBits;
};

// Splits f into party_count shares with sum_i Eval(K_i, x) = f(x).
std::vector<FunctionShare> Gen(const SecretFunction& f, const GenOptions& opts,
                               RandomSource& rng);

GroupElement Eval(const FunctionShare& share, u128 x);

// Canonical encoding: version byte, backend tag, then fixed-width
// little-endian fields. See docs in README.
Bytes SerializeShare(const FunctionShare& share);
FunctionShare DeserializeShare(std::span<const std::uint8_t> bytes);

namespace tree {

// Two-party distributed point function for f(x) = beta at x == alpha.
std::pair<TreeKey, TreeKey> GenPoint(unsigned domain_bits, u128 alpha,
                                     u128 beta, const Group& group,
                                     RandomSource& rng);
u128 EvalPoint(const TreeKey& key, bool party, unsigned domain_bits, u128 x,
               const Group& group);

// Two-party distributed comparison function for f(x) = beta when x < alpha.
std::pair<TreeKey, TreeKey> GenLessThan(unsigned domain_bits, u128 alpha,
                                        u128 beta, const Group& group,
                                        RandomSource& rng);
u128 EvalLessThan(const TreeKey& key, bool party, unsigned domain_bits, u128 x,
                  const Group& group);

}  // namespace tree

}  // namespace piqlb::fss

#endif  // PIQLB_FSS_HPP_
