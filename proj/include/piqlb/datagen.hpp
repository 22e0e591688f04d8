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


// Deterministic ledgers and query workloads for tests, demos and benchmarks.

#ifndef PIQLB_DATAGEN_HPP_
#define PIQLB_DATAGEN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "piqlb/ledger.hpp"
#include "piqlb/oracle.hpp"
#include "piqlb/query.hpp"
#include "piqlb/random.hpp"

namespace piqlb::datagen {

// Four records, one block each, at 12:00 UTC on 1..4 June 2022:
//   (Item=2, Price=4, Color=red)  (Item=2, Price=5, Color=blue)
//   (Item=3, Price=7, Color=red)  (Item=5, Price=9, Color=red)
// Item is 4 bits, Price 8 bits, Color an 8-bit dictionary {red, green, blue}.
Ledger PaperFixture();

// Item 4 bits, Price 8 bits, Qty 6 bits, Color 3-bit dictionary of five
// colours, Serial 20 bits (unique per record).
Schema RandomSchema();

struct RandomLedgerOptions {
  std::size_t records = 64;
  std::size_t block_size = kDefaultBlockSize;
  std::int64_t start = 1654041600;  // 2022-06-01T00:00:00Z
  std::uint64_t min_step = 1;       // seconds between consecutive records
  std::uint64_t max_step = 600;
};

Ledger RandomLedger(const RandomLedgerOptions& options, RandomSource& rng);

// Random rows for an arbitrary schema: numeric cells uniform over the column
// width, dictionary cells uniform over the dictionary, hashed string cells
// from a small pool ("v0".."v7").
Ledger RandomLedger(const Schema& schema, const RandomLedgerOptions& options,
                    RandomSource& rng);

struct QueryCase {
  query::Query query;
  std::vector<std::string> secrets;
  OracleResult expected;
};

struct QueryCaseOptions {
  std::optional<query::AggregateType> aggregate;
  std::optional<query::ConditionKind> kind;
  std::uint32_t avg_scale = 1;
  std::int64_t max_window_seconds = query::kDefaultMaxWindowSeconds;
  // RANGE and OR results are only verifiable when the condition selects at
  // most one intermediate-table row; keep generated cases inside that.
  bool single_row_range_or = true;
};

// Random query over columns of the ledger's schema together with its oracle
// answer. Throws InputError if no case can be built (e.g. no numeric column).
QueryCase RandomQueryCase(const Ledger& ledger, const QueryCaseOptions& options,
                          RandomSource& rng);

}  // namespace piqlb::datagen

#endif  // PIQLB_DATAGEN_HPP_
