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


#ifndef PIQLB_TESTS_E2E_HELPERS_HPP_
#define PIQLB_TESTS_E2E_HELPERS_HPP_

#include <string>
#include <vector>

#include "piqlb/client_engine.hpp"
#include "piqlb/ledger.hpp"
#include "piqlb/query.hpp"
#include "piqlb/sp_engine.hpp"

namespace piqlb::testing {

inline std::vector<sp::ShareOutput> EvalAll(const client::QuerySession& session,
                                            const Ledger& ledger,
                                            const sp::SpLimits& limits = {}) {
  std::vector<sp::ShareOutput> outputs;
  for (const auto& share : session.shares()) {
    outputs.push_back(sp::Eval(share, ledger, session.private_query(), limits));
  }
  return outputs;
}

// Gen, every provider's Eval over the same ledger, then Verif.
inline client::QueryResult RunHonest(const Ledger& ledger, const query::Query& q,
                                     const std::vector<std::string>& secrets,
                                     const client::SessionOptions& options,
                                     RandomSource& rng) {
  const auto session = client::Gen(q, secrets, ledger.schema(), options, rng);
  const auto outputs = EvalAll(session, ledger, {.max_blocks = 1u << 30});
  return client::Verif(session, outputs);
}

inline query::Query Parse(const std::string& text) {
  return query::ParseQuery(text, {.max_window_seconds = 0});
}

// Reference queries over the four-record fixture.
inline const std::string kQ1 =
    "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
    "WHERE Item=2";
inline const std::string kQ2 =
    "SELECT COUNT(Item) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
    "WHERE 4 < Price < 10";
inline const std::string kQ3 =
    "SELECT AVG(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
    "WHERE Item=2";
inline const std::string kQ4 =
    "SELECT MAX(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
    "WHERE Item=2 AND Color=red";
inline const std::string kQ5 =
    "SELECT MIN(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
    "WHERE 2 <= Item <= 5";

}  // namespace piqlb::testing

#endif  // PIQLB_TESTS_E2E_HELPERS_HPP_
