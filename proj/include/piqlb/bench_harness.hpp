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


// Benchmark scenarios: evaluation cost, bandwidth and latency as the ledger
// grows.

#ifndef PIQLB_BENCH_HARNESS_HPP_
#define PIQLB_BENCH_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "piqlb/fss.hpp"
#include "piqlb/group.hpp"

namespace piqlb::bench {

struct BenchScenario {
  std::vector<std::size_t> records = {1000, 10000, 100000};
  std::vector<unsigned> result_bits = {64};
  unsigned lambda_bits = kDefaultLambdaBits;
  unsigned parties = 2;
  fss::Backend backend = fss::Backend::kTree;
  unsigned repetitions = 3;
  std::vector<std::string> faults = {"honest"};  // applied to the last SP
  bool tcp = false;
  std::uint64_t seed = 1;

  // Throws ConfigError for unusable values (repetitions < 3, empty axes, ...).
  void Validate() const;
  static BenchScenario FromJson(std::string_view json);
  std::string ToJson() const;
};

struct BenchRow {
  std::size_t records = 0;
  unsigned result_bits = 0;
  unsigned lambda_bits = 0;
  unsigned parties = 0;
  std::string backend;
  std::string fault;
  double eval_seconds = 0;     // median single-SP evaluation
  double latency_seconds = 0;  // median end-to-end, client included
  std::size_t request_bytes = 0;   // per SP, framed
  std::size_t response_bytes = 0;  // per SP, framed
  std::string outcome;             // VALUE n | ABORT
};

// The benchmark ledger: N records one second apart, unique Serial values,
// queried as SUM(Price) WHERE Serial = ? so the intermediate table has N rows.
std::vector<BenchRow> RunBench(const BenchScenario& scenario,
                               std::ostream* progress = nullptr);

void WriteCsv(std::ostream& out, const std::vector<BenchRow>& rows);

struct BenchCheck {
  bool constant_response = true;
  bool constant_request = true;
  bool linear = true;  // every eval time within 2x of a linear fit in N*l
  std::vector<std::string> notes;

  bool ok() const { return constant_response && constant_request && linear; }
};

BenchCheck CheckBench(const std::vector<BenchRow>& rows);

}  // namespace piqlb::bench

#endif  // PIQLB_BENCH_HARNESS_HPP_
