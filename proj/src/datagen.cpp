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


#include "piqlb/datagen.hpp"

#include <algorithm>
#include <set>

#include "piqlb/error.hpp"
#include "piqlb/group.hpp"

namespace piqlb::datagen {

using query::AggregateType;
using query::ConditionKind;

Ledger PaperFixture() {
  Ledger ledger(Schema({{"Item", ColumnKind::kNumeric, 4, {}},
                        {"Price", ColumnKind::kNumeric, 8, {}},
                        {"Color", ColumnKind::kString, 8, {"red", "green", "blue"}}}));
  struct Row {
    std::uint64_t item, price;
    const char* color;
  };
  const Row rows[] = {{2, 4, "red"}, {2, 5, "blue"}, {3, 7, "red"}, {5, 9, "red"}};
  const std::int64_t noon_june1 = 1654041600 + 12 * 3600;
  for (int i = 0; i < 4; ++i) {
    Record r;
    r.object_id = "O" + std::to_string(i + 1);
    r.t = noon_june1 + i * 86400;
    r.fields = {rows[i].item, rows[i].price, std::string(rows[i].color)};
    ledger.AppendBlock({std::move(r)}, noon_june1 + i * 86400);
  }
  return ledger;
}

Schema RandomSchema() {
  return Schema({{"Item", ColumnKind::kNumeric, 4, {}},
                 {"Price", ColumnKind::kNumeric, 8, {}},
                 {"Qty", ColumnKind::kNumeric, 6, {}},
                 {"Color", ColumnKind::kString, 3,
                  {"red", "green", "blue", "black", "white"}},
                 {"Serial", ColumnKind::kNumeric, 20, {}}});
}

Ledger RandomLedger(const RandomLedgerOptions& options, RandomSource& rng) {
  if (options.block_size == 0) throw ConfigError("block size must be positive");
  if (options.min_step == 0 || options.min_step > options.max_step) {
    throw ConfigError("need 0 < min_step <= max_step");
  }
  if (options.records >= (std::size_t{1} << 20)) {
    throw ConfigError("at most 2^20 - 1 records fit the Serial column");
  }
  Ledger ledger(RandomSchema());
  static const char* kColors[] = {"red", "green", "blue", "black", "white"};
  std::int64_t t = options.start;
  std::vector<Record> pending;
  for (std::size_t i = 0; i < options.records; ++i) {
    t += static_cast<std::int64_t>(rng.Between(options.min_step, options.max_step));
    Record r;
    r.object_id = "R" + std::to_string(i + 1);
    r.t = t;
    r.v = rng.Uniform(1000);
    r.fields = {rng.Uniform(16), rng.Uniform(256), rng.Uniform(64),
                std::string(kColors[rng.Uniform(5)]),
                static_cast<std::uint64_t>(i + 1)};
    pending.push_back(std::move(r));
    if (pending.size() == options.block_size) {
      ledger.AppendBlock(std::move(pending), t);
      pending.clear();
    }
  }
  if (!pending.empty()) ledger.AppendBlock(std::move(pending), t);
  return ledger;
}

Ledger RandomLedger(const Schema& schema, const RandomLedgerOptions& options,
                    RandomSource& rng) {
  if (options.block_size == 0) throw ConfigError("block size must be positive");
  if (options.min_step == 0 || options.min_step > options.max_step) {
    throw ConfigError("need 0 < min_step <= max_step");
  }
  Ledger ledger(schema);
  std::int64_t t = options.start;
  std::vector<Record> pending;
  for (std::size_t i = 0; i < options.records; ++i) {
    t += static_cast<std::int64_t>(rng.Between(options.min_step, options.max_step));
    Record r;
    r.object_id = "R" + std::to_string(i + 1);
    r.t = t;
    for (const ColumnSpec& c : schema.columns()) {
      if (c.kind == ColumnKind::kNumeric) {
        r.fields.emplace_back(rng.NextU64() & static_cast<std::uint64_t>(LowMask(c.bits)));
      } else if (!c.dictionary.empty()) {
        r.fields.emplace_back(c.dictionary[rng.Uniform(c.dictionary.size())]);
      } else {
        r.fields.emplace_back("v" + std::to_string(rng.Uniform(8)));
      }
    }
    pending.push_back(std::move(r));
    if (pending.size() == options.block_size) {
      ledger.AppendBlock(std::move(pending), t);
      pending.clear();
    }
  }
  if (!pending.empty()) ledger.AppendBlock(std::move(pending), t);
  return ledger;
}

namespace {

class CaseBuilder {
 public:
  CaseBuilder(const Ledger& ledger, const QueryCaseOptions& options,
              RandomSource& rng)
      : ledger_(ledger), schema_(ledger.schema()), options_(options), rng_(rng) {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      const ColumnSpec& c = schema_.columns()[i];
      if (c.kind == ColumnKind::kNumeric) {
        numeric_.push_back(i);
        if (c.bits <= 8) equality_.push_back(i);
      } else {
        equality_.push_back(i);
      }
    }
    if (numeric_.empty() || equality_.empty()) {
      throw InputError("schema needs a numeric and a small-domain column");
    }
  }

  QueryCase Build() {
    for (int attempt = 0; attempt < 500; ++attempt) {
      QueryCase c = Attempt();
      if (!options_.single_row_range_or || c.expected.rows <= 1 ||
          (c.query.condition.kind != ConditionKind::kRange &&
           c.query.condition.kind != ConditionKind::kOr)) {
        return c;
      }
    }
    throw InputError("could not build a query case within the attempt budget");
  }

 private:
  template <typename T>
  const T& Pick(const std::vector<T>& v) {
    return v[rng_.Uniform(v.size())];
  }

  const ColumnSpec& Col(std::size_t i) const { return schema_.columns()[i]; }

  // A random window of a few blocks, occasionally empty.
  void ChooseWindow(query::Query& q) {
    const auto& blocks = ledger_.blocks();
    if (blocks.empty() || rng_.Uniform(20) == 0) {
      const std::int64_t after = blocks.empty() ? 0 : blocks.back().timestamp + 1;
      q.window = {after, after + 86400};
      window_.clear();
      return;
    }
    const std::size_t a = rng_.Uniform(blocks.size());
    const std::size_t span = 1 + rng_.Uniform(std::min<std::size_t>(blocks.size() - a, 6));
    std::size_t b = a + span - 1;
    while (b > a && blocks[b].timestamp + 1 - blocks[a].timestamp >
                        options_.max_window_seconds) {
      --b;
    }
    q.window = {blocks[a].timestamp, blocks[b].timestamp + 1};
    window_.clear();
    for (const Block& blk : ledger_.SelectBlocks(q.window.begin, q.window.end)) {
      for (const Record& r : blk.records) window_.push_back(&r);
    }
  }

  Value RandomValue(std::size_t col) {
    const ColumnSpec& c = Col(col);
    if (!window_.empty() && rng_.Uniform(4) != 0) {
      return Pick(window_)->fields[col];
    }
    if (c.kind == ColumnKind::kNumeric) {
      return rng_.NextU64() & static_cast<std::uint64_t>(LowMask(c.bits));
    }
    if (!c.dictionary.empty()) return Pick(c.dictionary);
    if (!window_.empty()) return Pick(window_)->fields[col];
    return std::string("absent");
  }

  QueryCase Attempt() {
    QueryCase c;
    query::Query& q = c.query;
    ChooseWindow(q);
    q.aggregate = options_.aggregate
                      ? *options_.aggregate
                      : static_cast<AggregateType>(rng_.Between(1, 5));
    q.agg_column = Col(q.aggregate == AggregateType::kCount
                           ? rng_.Uniform(schema_.size())
                           : Pick(numeric_))
                       .name;
    auto& cond = q.condition;
    cond.kind = options_.kind ? *options_.kind
                              : static_cast<ConditionKind>(rng_.Between(1, 4));
    switch (cond.kind) {
      case ConditionKind::kSingle: {
        const std::size_t col = Pick(equality_);
        cond.leaves.push_back({Col(col).name, RandomValue(col)});
        c.secrets = {Col(col).name};
        break;
      }
      case ConditionKind::kAnd: {
        std::vector<std::size_t> cols = equality_;
        if (cols.size() < 2) return Attempt();
        for (std::size_t i = cols.size(); i > 1; --i) {
          std::swap(cols[i - 1], cols[rng_.Uniform(i)]);
        }
        cols.resize(2 + rng_.Uniform(std::min<std::size_t>(cols.size() - 1, 2)));
        const Record* base = window_.empty() ? nullptr : Pick(window_);
        for (std::size_t col : cols) {
          Value v = base != nullptr && rng_.Uniform(5) != 0 ? base->fields[col]
                                                            : RandomValue(col);
          cond.leaves.push_back({Col(col).name, std::move(v)});
          if (rng_.Coin()) c.secrets.push_back(Col(col).name);
        }
        if (c.secrets.empty()) c.secrets.push_back(cond.leaves.front().column);
        break;
      }
      case ConditionKind::kOr: {
        const std::size_t col = Pick(equality_);
        const std::size_t want = 2 + rng_.Uniform(2);
        std::set<std::string> seen;
        for (int tries = 0; cond.leaves.size() < want && tries < 32; ++tries) {
          Value v = RandomValue(col);
          if (seen.insert(ValueToString(v)).second) {
            cond.leaves.push_back({Col(col).name, std::move(v)});
          }
        }
        if (cond.leaves.size() < 2) return Attempt();
        c.secrets = {Col(col).name};
        break;
      }
      case ConditionKind::kRange: {
        const std::size_t col = Pick(numeric_);
        const std::uint64_t top = static_cast<std::uint64_t>(LowMask(Col(col).bits));
        std::uint64_t center = std::get<std::uint64_t>(RandomValue(col));
        const std::uint64_t lo = center - std::min(center, rng_.Uniform(4));
        const std::uint64_t hi = center + std::min(top - center, rng_.Uniform(4));
        cond.range = {Col(col).name, lo, hi};
        c.secrets = {Col(col).name};
        break;
      }
    }
    c.expected = EvaluatePlain(ledger_, q, options_.avg_scale);
    return c;
  }

  const Ledger& ledger_;
  const Schema& schema_;
  const QueryCaseOptions& options_;
  RandomSource& rng_;
  std::vector<std::size_t> numeric_;
  std::vector<std::size_t> equality_;
  std::vector<const Record*> window_;
};

}  // namespace

QueryCase RandomQueryCase(const Ledger& ledger, const QueryCaseOptions& options,
                          RandomSource& rng) {
  return CaseBuilder(ledger, options, rng).Build();
}

}  // namespace piqlb::datagen
