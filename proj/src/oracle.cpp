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


#include "piqlb/oracle.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "piqlb/error.hpp"

namespace piqlb {

using query::AggregateType;
using query::ConditionKind;

namespace {

bool SameValue(const Value& cell, const Value& literal) {
  if (cell.index() == literal.index()) return cell == literal;
  if (std::holds_alternative<std::uint64_t>(cell)) {
    throw InputError("string literal '" + ValueToString(literal) +
                     "' compared with a numeric column");
  }
  // A numeric literal may name a string such as "5".
  return ValueToString(cell) == ValueToString(literal);
}

}  // namespace

OracleResult EvaluatePlain(const Ledger& ledger, const query::Query& q,
                           std::uint32_t avg_scale) {
  if (avg_scale == 0) throw InputError("AVG scale must be positive");
  const Schema& schema = ledger.schema();
  const auto& cond = q.condition;
  const std::size_t agg_col = schema.IndexOf(q.agg_column);
  std::vector<std::size_t> leaf_cols;
  for (const auto& l : cond.leaves) leaf_cols.push_back(schema.IndexOf(l.column));
  const std::size_t range_col =
      cond.kind == ConditionKind::kRange ? schema.IndexOf(cond.range.column) : 0;
  if (cond.kind == ConditionKind::kRange &&
      schema.columns()[range_col].kind != ColumnKind::kNumeric) {
    throw InputError("range condition on string column " + cond.range.column);
  }
  const bool numeric_agg = q.aggregate != AggregateType::kCount;
  if (numeric_agg && schema.columns()[agg_col].kind != ColumnKind::kNumeric) {
    throw InputError("aggregate over string column " + q.agg_column);
  }

  u128 sum = 0;
  std::uint64_t min = std::numeric_limits<std::uint64_t>::max(), max = 0;
  std::size_t count = 0;
  std::set<std::string> groups;

  for (const Block& b : ledger.SelectBlocks(q.window.begin, q.window.end)) {
    for (const Record& r : b.records) {
      bool match = false;
      switch (cond.kind) {
        case ConditionKind::kSingle:
        case ConditionKind::kAnd:
          match = true;
          for (std::size_t i = 0; i < leaf_cols.size(); ++i) {
            match = match && SameValue(r.fields[leaf_cols[i]], cond.leaves[i].value);
          }
          break;
        case ConditionKind::kOr:
          for (std::size_t i = 0; i < leaf_cols.size(); ++i) {
            if (SameValue(r.fields[leaf_cols[i]], cond.leaves[i].value)) {
              match = true;
              groups.insert(ValueToString(r.fields[leaf_cols[i]]));
            }
          }
          break;
        case ConditionKind::kRange: {
          const auto v = std::get<std::uint64_t>(r.fields[range_col]);
          match = v >= cond.range.lo && v <= cond.range.hi;
          break;
        }
      }
      if (!match) continue;
      ++count;
      if (numeric_agg) {
        const auto v = std::get<std::uint64_t>(r.fields[agg_col]);
        sum += v;
        min = std::min(min, v);
        max = std::max(max, v);
      }
    }
  }

  OracleResult out;
  out.records = count;
  switch (cond.kind) {
    case ConditionKind::kSingle:
    case ConditionKind::kAnd:
      out.rows = count > 0 ? 1 : 0;
      break;
    case ConditionKind::kOr:
      out.rows = groups.size();
      break;
    case ConditionKind::kRange:
      out.rows = count;
      break;
  }
  if (count == 0) return out;
  switch (q.aggregate) {
    case AggregateType::kSum:
      out.value = sum;
      break;
    case AggregateType::kCount:
      out.value = count;
      break;
    case AggregateType::kAvg:
      out.value = sum * avg_scale / count;
      break;
    case AggregateType::kMin:
      out.value = min;
      break;
    case AggregateType::kMax:
      out.value = max;
      break;
  }
  out.zero_or_absent = out.value == 0;
  return out;
}

}  // namespace piqlb
