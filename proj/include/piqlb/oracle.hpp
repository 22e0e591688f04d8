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


// Plaintext query evaluation directly over the ledger. This is the reference
// every private execution is compared against.

#ifndef PIQLB_ORACLE_HPP_
#define PIQLB_ORACLE_HPP_

#include <cstdint>

#include "piqlb/bytes.hpp"
#include "piqlb/ledger.hpp"
#include "piqlb/query.hpp"

namespace piqlb {

struct OracleResult {
  u128 value = 0;  // AVG is floor(sum * avg_scale / count)
  bool zero_or_absent = true;
  std::size_t records = 0;  // records satisfying the condition
  // Rows of the intermediate table the condition selects: distinct groups for
  // equality conditions, records for a range.
  std::size_t rows = 0;
};

OracleResult EvaluatePlain(const Ledger& ledger, const query::Query& q,
                           std::uint32_t avg_scale = 1);

}  // namespace piqlb

#endif  // PIQLB_ORACLE_HPP_
