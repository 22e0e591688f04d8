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


// Service-provider evaluation of a private query against the local ledger.

#ifndef PIQLB_SP_ENGINE_HPP_
#define PIQLB_SP_ENGINE_HPP_

#include <cstdint>
#include <vector>

#include "piqlb/fss.hpp"
#include "piqlb/group.hpp"
#include "piqlb/ledger.hpp"
#include "piqlb/query.hpp"

namespace piqlb::sp {

// Keys are the encoded condition values c_j. Equality conditions are grouped
// (distinct keys, ascending); a range condition keeps one row per record in
// ledger order.
struct IntermediateTable {
  unsigned key_bits = 0;
  std::vector<u128> keys;
  std::vector<std::uint64_t> values;

  std::size_t rows() const { return keys.size(); }
  friend bool operator==(const IntermediateTable&, const IntermediateTable&) = default;
};

// Row j is the l-bit binary form of table.values[j]; bit k = 0 is the least
// significant.
struct BinMatrix {
  unsigned l = query::kDefaultResultBits;
  std::vector<std::uint64_t> rows;

  bool Bit(std::size_t j, unsigned k) const { return (rows[j] >> k) & 1; }
  friend bool operator==(const BinMatrix&, const BinMatrix&) = default;
};

struct ShareOutput {
  unsigned party_index = 0;
  unsigned lambda_bits = 0;
  std::vector<GroupElement> values;  // exactly l entries

  friend bool operator==(const ShareOutput&, const ShareOutput&) = default;
};

struct SpLimits {
  // Server-side window threshold: most blocks one query may touch.
  std::size_t max_blocks = 4096;
};

struct TableAndBin {
  IntermediateTable table;
  BinMatrix bin;
};

// Throws ValidationError when q' does not fit the schema, ResourceError when
// the window exceeds max_blocks, EvalError when an aggregate needs more than
// l bits.
TableAndBin BuildIntermediateTable(const Ledger& ledger,
                                   const query::PrivateQuery& q,
                                   const SpLimits& limits = {});

// b_k = sum over rows j of Eval(share, c_j) * BIN[j][k].
GroupElement Comp(const fss::FunctionShare& share, const IntermediateTable& table,
                  const BinMatrix& bin, unsigned k);

enum class EvalMode {
  // comp once per bit position, each re-evaluating the share on every row.
  kPerBit,
  // One share evaluation per row reused for all l bit positions. Same output.
  kRowCached,
};

// Parallel (OpenMP over rows) evaluation of all l bit positions.
ShareOutput EvalTable(const fss::FunctionShare& share,
                      const IntermediateTable& table, const BinMatrix& bin,
                      EvalMode mode = EvalMode::kPerBit);

// Builds the table for q' and evaluates the share over it. Throws EvalError
// when the share's shape does not match q'.
ShareOutput Eval(const fss::FunctionShare& share, const Ledger& ledger,
                 const query::PrivateQuery& q, const SpLimits& limits = {},
                 EvalMode mode = EvalMode::kPerBit);

namespace reference {
// Serial evaluation: Comp for k = 0..l-1, appended in order.
ShareOutput EvalTable(const fss::FunctionShare& share,
                      const IntermediateTable& table, const BinMatrix& bin);
}  // namespace reference

}  // namespace piqlb::sp

#endif  // PIQLB_SP_ENGINE_HPP_
