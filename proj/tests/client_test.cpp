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

#include "doctest.h"
#include "e2e_helpers.hpp"
#include "piqlb/client_engine.hpp"
#include "piqlb/datagen.hpp"
#include "piqlb/error.hpp"
#include "piqlb/oracle.hpp"

namespace piqlb::client {
namespace {

using testing::Parse;

TEST_CASE("secret functions per condition kind") {
  const Ledger f = datagen::PaperFixture();
  SeededRandom rng(1);
  const std::vector<std::string> item = {"Item"}, price = {"Price"};

  const auto s1 = Gen(Parse(testing::kQ1), item, f.schema(), {}, rng);
  CHECK_FALSE(s1.y().is_zero());
  CHECK(s1.function().kind() == fss::FunctionKind::kPoint);
  CHECK(s1.function()(2) == s1.y());
  CHECK(s1.function()(3).is_zero());
  CHECK(s1.shares().size() == 2);

  const auto s2 = Gen(Parse(testing::kQ2), price, f.schema(), {}, rng);
  CHECK(s2.function().kind() == fss::FunctionKind::kInterval);
  CHECK(s2.function()(4).is_zero());
  CHECK(s2.function()(5) == s2.y());
  CHECK(s2.function()(9) == s2.y());
  CHECK(s2.function()(10).is_zero());

  const auto s3 = Gen(Parse("SELECT SUM(Price) FROM 1 < blk_range_cond < 2 "
                            "WHERE Item = 2 OR Item = 5"),
                      item, f.schema(), {}, rng);
  CHECK(s3.function().kind() == fss::FunctionKind::kSum);
  CHECK(s3.function()(2) == s3.y());
  CHECK(s3.function()(5) == s3.y());
  CHECK(s3.function()(3).is_zero());

  CHECK_THROWS_AS(Gen(Parse(testing::kQ1), item, f.schema(), {.parties = 1}, rng),
                  ConfigError);
}

TEST_CASE("oracle answers on the fixture") {
  const Ledger f = datagen::PaperFixture();
  CHECK(EvaluatePlain(f, Parse(testing::kQ1)).value == 9);
  const auto q2 = EvaluatePlain(f, Parse(testing::kQ2));
  CHECK(q2.value == 3);
  CHECK(q2.rows == 3);
  CHECK(EvaluatePlain(f, Parse(testing::kQ3)).value == 4);
  CHECK(EvaluatePlain(f, Parse(testing::kQ3), 100).value == 450);
  CHECK(EvaluatePlain(f, Parse(testing::kQ4)).value == 4);
  CHECK(EvaluatePlain(f, Parse(testing::kQ5)).value == 4);
  const auto empty = EvaluatePlain(
      f, Parse("SELECT SUM(Price) FROM (1/01/2020) < blk_range_cond < "
               "(2/01/2020) WHERE Item=2"));
  CHECK(empty.value == 0);
  CHECK(empty.zero_or_absent);
}

TEST_CASE("honest execution on the fixture") {
  const Ledger f = datagen::PaperFixture();
  SeededRandom rng(2);
  const std::vector<std::string> item = {"Item"};
  const std::vector<std::string> both = {"Item", "Color"};
  for (fss::Backend backend : {fss::Backend::kTree, fss::Backend::kNaive}) {
    const SessionOptions opts{.backend = backend};
    const auto r1 = testing::RunHonest(f, Parse(testing::kQ1), item, opts, rng);
    REQUIRE(r1.ok());
    CHECK(r1.raw == 9);
    CHECK(r1.value == 9.0);
    CHECK_FALSE(r1.zero_or_absent);
    CHECK(testing::RunHonest(f, Parse(testing::kQ4), both, opts, rng).raw == 4);
  }
  const auto r3 = testing::RunHonest(
      f, Parse(testing::kQ3), item,
      {.parties = 3, .backend = fss::Backend::kNaive, .avg_scale = 100}, rng);
  CHECK(r3.raw == 450);
  CHECK(r3.value == doctest::Approx(4.5));

  const auto absent = testing::RunHonest(
      f, Parse("SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < "
               "(4/06/2022) WHERE Item=11"),
      item, {}, rng);
  REQUIRE(absent.ok());
  CHECK(absent.raw == 0);
  CHECK(absent.zero_or_absent);
}

TEST_CASE("a range selecting several records aborts") {
  // Verification accepts only 0 or y per bit, so a range condition is
  // verifiable when at most one record falls inside it.
  const Ledger f = datagen::PaperFixture();
  SeededRandom rng(3);
  const std::vector<std::string> price = {"Price"}, item = {"Item"};
  CHECK_FALSE(testing::RunHonest(f, Parse(testing::kQ2), price, {}, rng).ok());
  CHECK_FALSE(testing::RunHonest(f, Parse(testing::kQ5), item, {}, rng).ok());
  const auto one = testing::RunHonest(
      f, Parse("SELECT COUNT(Item) FROM (1/06/2022) < blk_range_cond < "
               "(4/06/2022) WHERE 6 <= Price <= 8"),
      price, {}, rng);
  REQUIRE(one.ok());
  CHECK(one.raw == 1);
}

TEST_CASE("verification of crafted outputs") {
  const Ledger f = datagen::PaperFixture();
  SeededRandom rng(4);
  const std::vector<std::string> item = {"Item"};
  const auto session = Gen(Parse(testing::kQ1), item, f.schema(),
                           {.result_bits = 8}, rng);
  const Group g(64);
  std::vector<sp::ShareOutput> zeros(2);
  for (unsigned i = 0; i < 2; ++i) {
    zeros[i].party_index = i + 1;
    zeros[i].lambda_bits = 64;
    zeros[i].values.assign(8, GroupElement(0, g));
  }
  const auto r0 = Verif(session, zeros);
  REQUIRE(r0.ok());
  CHECK(r0.raw == 0);
  CHECK(r0.zero_or_absent);

  auto outputs = testing::EvalAll(session, f);
  CHECK(Verif(session, outputs).raw == 9);
  const GroupElement delta(rng.NextU64() | 1, g);
  outputs[1].values[3] = outputs[1].values[3] + delta;
  const auto bad = Verif(session, outputs);
  CHECK(bad.status == QueryResult::Status::kAbort);
  CHECK(bad.abort_position == 3);
  CHECK(bad.ToString().starts_with("ABORT at bit 3"));
}

TEST_CASE("malformed output sets are protocol errors") {
  const Ledger f = datagen::PaperFixture();
  SeededRandom rng(5);
  const std::vector<std::string> item = {"Item"};
  const auto session = Gen(Parse(testing::kQ1), item, f.schema(), {}, rng);
  const auto good = testing::EvalAll(session, f);

  CHECK_THROWS_AS(Verif(session, std::span(good.data(), 1)), ProtocolError);
  auto dup = good;
  dup[1].party_index = 1;
  CHECK_THROWS_AS(Verif(session, dup), ProtocolError);
  auto out_of_range = good;
  out_of_range[1].party_index = 3;
  CHECK_THROWS_AS(Verif(session, out_of_range), ProtocolError);
  auto short_output = good;
  short_output[0].values.pop_back();
  CHECK_THROWS_AS(Verif(session, short_output), ProtocolError);
  auto wrong_group = good;
  wrong_group[0].lambda_bits = 32;
  CHECK_THROWS_AS(Verif(session, wrong_group), ProtocolError);
}

TEST_CASE("result decoding") {
  const bool nine[] = {1, 0, 0, 1, 0, 0, 0, 0};
  CHECK(DecodeBits(nine) == 9);
  const bool ones[] = {1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(DecodeBits(ones) == 255);
  bool avg[64] = {};
  for (unsigned k = 0; k < 64; ++k) avg[k] = (std::uint64_t{450} >> k) & 1;
  CHECK(DecodeResult(avg, query::AggregateType::kAvg, 100) == doctest::Approx(4.5));
  CHECK(DecodeResult(avg, query::AggregateType::kSum, 100) == 450.0);
}

TEST_CASE("single-party tampering is detected") {
  SeededRandom rng(6);
  const Ledger ledger = datagen::RandomLedger({.records = 64}, rng);
  int aborted = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = datagen::RandomQueryCase(ledger, {}, rng);
    const auto session = Gen(c.query, c.secrets, ledger.schema(), {}, rng);
    auto outputs = testing::EvalAll(session, ledger);
    const Group g(64);
    const unsigned k = static_cast<unsigned>(rng.Uniform(64));
    auto& victim = outputs[rng.Uniform(2)].values[k];
    victim = victim + GroupElement(g.RandomNonZero(rng), g);
    aborted += Verif(session, outputs).ok() ? 0 : 1;
  }
  CHECK(aborted == 200);
}

TEST_CASE("secret values never appear in q' or in shares' clear fields") {
  const Ledger f = datagen::PaperFixture();
  SeededRandom rng(7);
  const std::vector<std::string> both = {"Item", "Color"};
  const auto s = Gen(Parse(testing::kQ4), both, f.schema(), {}, rng);
  const Bytes q = query::SerializePrivateQuery(s.private_query());
  const std::string text(q.begin(), q.end());
  CHECK(text.find("red") == std::string::npos);
  CHECK(s.private_query().ToText().find('2', s.private_query().ToText().find("WHERE")) ==
        std::string::npos);
}

}  // namespace
}  // namespace piqlb::client
