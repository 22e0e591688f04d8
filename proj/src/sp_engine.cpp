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


#include "piqlb/sp_engine.hpp"

#include <omp.h>

#include <map>

#include "piqlb/error.hpp"

namespace piqlb::sp {

using query::AggregateType;
using query::ConditionKind;

namespace {

struct Accumulator {
  u128 sum = 0;
  std::uint64_t count = 0;
  std::uint64_t min = ~std::uint64_t{0};
  std::uint64_t max = 0;

  void Add(std::uint64_t v) {
    sum += v;
    ++count;
    min = std::min(min, v);
    max = std::max(max, v);
  }

  u128 Result(AggregateType agg, std::uint32_t scale) const {
    switch (agg) {
      case AggregateType::kSum:
        return sum;
      case AggregateType::kCount:
        return count;
      case AggregateType::kAvg:
        return sum * scale / count;
      case AggregateType::kMin:
        return min;
      case AggregateType::kMax:
        return max;
    }
    return 0;
  }
};

struct Filter {
  std::size_t column;
  u128 code;
};

std::uint64_t CheckWidth(u128 v, unsigned l) {
  if ((v & ~LowMask(l)) != 0) {
    throw EvalError("aggregate value " + U128ToString(v) + " needs more than " +
                    std::to_string(l) + " bits");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

TableAndBin BuildIntermediateTable(const Ledger& ledger,
                                   const query::PrivateQuery& q,
                                   const SpLimits& limits) {
  const Schema& schema = ledger.schema();
  query::CheckPrivateQuery(q, schema);
  const auto blocks = ledger.SelectBlocks(q.window.begin, q.window.end);
  if (blocks.size() > limits.max_blocks) {
    throw ResourceError("window covers " + std::to_string(blocks.size()) +
                        " blocks, limit is " + std::to_string(limits.max_blocks));
  }

  const bool count = q.aggregate == AggregateType::kCount;
  const std::size_t agg_col = schema.IndexOf(q.agg_column);
  std::vector<std::size_t> key_cols;
  std::vector<Filter> filters;
  for (const auto& leaf : q.leaves) {
    const std::size_t col = schema.IndexOf(leaf.column);
    if (leaf.secret) {
      key_cols.push_back(col);
    } else {
      filters.push_back(
          {col, EncodeConditionValue(schema.columns()[col], *leaf.value).bits});
    }
  }
  // OR leaves all name one column; the key is that column once.
  if (q.kind == ConditionKind::kOr) key_cols.resize(1);

  auto key_of = [&](const Record& r) {
    u128 key = 0;
    for (std::size_t col : key_cols) {
      const unsigned w = schema.columns()[col].bits;
      key = (w == 128 ? 0 : key << w) | schema.EncodeCell(col, r.fields[col]);
    }
    return key;
  };
  auto value_of = [&](const Record& r) -> std::uint64_t {
    return count ? 1 : std::get<std::uint64_t>(r.fields[agg_col]);
  };
  auto passes = [&](const Record& r) {
    for (const auto& f : filters) {
      if (schema.EncodeCell(f.column, r.fields[f.column]) != f.code) return false;
    }
    return true;
  };

  TableAndBin out;
  out.table.key_bits = q.domain_bits;
  out.bin.l = q.result_bits;
  if (q.kind == ConditionKind::kRange) {
    const std::uint64_t scale = q.aggregate == AggregateType::kAvg ? q.avg_scale : 1;
    for (const Block& b : blocks) {
      for (const Record& r : b.records) {
        out.table.keys.push_back(key_of(r));
        out.table.values.push_back(
            CheckWidth(static_cast<u128>(value_of(r)) * scale, q.result_bits));
      }
    }
  } else {
    std::map<u128, Accumulator> groups;
    for (const Block& b : blocks) {
      for (const Record& r : b.records) {
        if (passes(r)) groups[key_of(r)].Add(value_of(r));
      }
    }
    out.table.keys.reserve(groups.size());
    out.table.values.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
      out.table.keys.push_back(key);
      out.table.values.push_back(
          CheckWidth(acc.Result(q.aggregate, q.avg_scale), q.result_bits));
    }
  }
  out.bin.rows = out.table.values;
  return out;
}

namespace {

void CheckShape(const fss::FunctionShare& share, const IntermediateTable& table,
                const BinMatrix& bin) {
  if (share.domain_bits() != table.key_bits) {
    throw EvalError("share domain is " + std::to_string(share.domain_bits()) +
                    " bits, table keys are " + std::to_string(table.key_bits));
  }
  if (bin.rows.size() != table.rows()) throw EvalError("BIN/table row mismatch");
  if (bin.l < 1 || bin.l > 64) throw EvalError("l must be 1..64");
}

ShareOutput MakeOutput(const fss::FunctionShare& share, std::span<const u128> acc) {
  ShareOutput out;
  out.party_index = share.party_index();
  out.lambda_bits = share.lambda_bits();
  const Group g = share.group();
  out.values.reserve(acc.size());
  for (u128 v : acc) out.values.emplace_back(g.Reduce(v), g);
  return out;
}

}  // namespace

GroupElement Comp(const fss::FunctionShare& share, const IntermediateTable& table,
                  const BinMatrix& bin, unsigned k) {
  CheckShape(share, table, bin);
  if (k >= bin.l) throw InputError("bit index out of range");
  u128 b = 0;
  for (std::size_t j = 0; j < table.rows(); ++j) {
    b += share.EvalRaw(table.keys[j]) * static_cast<u128>(bin.Bit(j, k));
  }
  const Group g = share.group();
  return GroupElement(g.Reduce(b), g);
}

ShareOutput EvalTable(const fss::FunctionShare& share,
                      const IntermediateTable& table, const BinMatrix& bin,
                      EvalMode mode) {
  CheckShape(share, table, bin);
  const unsigned l = bin.l;
  const auto rows = static_cast<std::int64_t>(table.rows());
  std::vector<u128> total(l, 0);
  // Sums are taken mod 2^128, so per-thread partials combine exactly in any
  // order.
#pragma omp parallel
  {
    std::vector<u128> acc(l, 0);
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < rows; ++j) {
      const u128 key = table.keys[j];
      const std::uint64_t bits = bin.rows[j];
      if (mode == EvalMode::kRowCached) {
        const u128 e = share.EvalRaw(key);
        for (unsigned k = 0; k < l; ++k) acc[k] += e * ((bits >> k) & 1);
      } else {
        for (unsigned k = 0; k < l; ++k) {
          acc[k] += share.EvalRaw(key) * ((bits >> k) & 1);
        }
      }
    }
#pragma omp critical
    for (unsigned k = 0; k < l; ++k) total[k] += acc[k];
  }
  return MakeOutput(share, total);
}

ShareOutput Eval(const fss::FunctionShare& share, const Ledger& ledger,
                 const query::PrivateQuery& q, const SpLimits& limits,
                 EvalMode mode) {
  if (share.lambda_bits() == 0) throw EvalError("share has no group");
  fss::FunctionKind expected = fss::FunctionKind::kPoint;
  if (q.kind == ConditionKind::kRange) expected = fss::FunctionKind::kInterval;
  if (q.kind == ConditionKind::kOr) expected = fss::FunctionKind::kSum;
  if (share.kind() != expected) {
    throw EvalError("share kind does not match the " +
                    std::string(query::ConditionName(q.kind)) + " condition");
  }
  const TableAndBin tb = BuildIntermediateTable(ledger, q, limits);
  return EvalTable(share, tb.table, tb.bin, mode);
}

namespace reference {

ShareOutput EvalTable(const fss::FunctionShare& share,
                      const IntermediateTable& table, const BinMatrix& bin) {
  CheckShape(share, table, bin);
  std::vector<u128> values;
  for (unsigned k = 0; k < bin.l; ++k) values.push_back(Comp(share, table, bin, k).value());
  return MakeOutput(share, values);
}

}  // namespace reference

}  // namespace piqlb::sp
