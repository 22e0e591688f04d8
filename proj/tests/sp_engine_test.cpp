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

#include <algorithm>

#include "doctest.h"
#include "e2e_helpers.hpp"
#include "piqlb/datagen.hpp"
#include "piqlb/error.hpp"
#include "piqlb/oracle.hpp"
#include "piqlb/sp_engine.hpp"

namespace piqlb::sp {
namespace {

using testing::Parse;

query::PrivateQuery Derive(const Ledger& ledger, const std::string& text,
                           std::vector<std::string> secrets, unsigned l = 64) {
  return query::DerivePrivateQuery(Parse(text), secrets, ledger.schema(),
                                   {.result_bits = l})
      .private_query;
}

TEST_CASE("grouped table for a single condition") {
  const Ledger f = datagen::PaperFixture();
  const auto tb = BuildIntermediateTable(f, Derive(f, testing::kQ1, {"Item"}));
  CHECK(tb.table.key_bits == 4);
  CHECK(tb.table.keys == std::vector<u128>{2, 3, 5});
  CHECK(tb.table.values == std::vector<std::uint64_t>{9, 7, 9});
  CHECK(tb.bin.rows == tb.table.values);
  CHECK(tb.bin.l == 64);
}

TEST_CASE("per-record table for a range condition") {
  const Ledger f = datagen::PaperFixture();
  const auto tb = BuildIntermediateTable(f, Derive(f, testing::kQ2, {"Price"}));
  CHECK(tb.table.key_bits == 8);
  CHECK(tb.table.keys == std::vector<u128>{4, 5, 7, 9});
  CHECK(tb.table.values == std::vector<std::uint64_t>{1, 1, 1, 1});
}

TEST_CASE("AND keys concatenate in condition order") {
  const Ledger f = datagen::PaperFixture();
  const auto tb =
      BuildIntermediateTable(f, Derive(f, testing::kQ4, {"Item", "Color"}));
  CHECK(tb.table.key_bits == 12);
  // Color codes: red 0, blue 2.
  CHECK(tb.table.keys == std::vector<u128>{(2 << 8) | 0, (2 << 8) | 2, 3 << 8, 5 << 8});
  CHECK(tb.table.values == std::vector<std::uint64_t>{4, 5, 7, 9});

  // Plaintext Color filters before grouping.
  const auto partial = BuildIntermediateTable(f, Derive(f, testing::kQ4, {"Item"}));
  CHECK(partial.table.keys == std::vector<u128>{2, 3, 5});
  CHECK(partial.table.values == std::vector<std::uint64_t>{4, 7, 9});
}

TEST_CASE("AVG uses floor and the fixed-point scale") {
  const Ledger f = datagen::PaperFixture();
  auto q = Derive(f, testing::kQ3, {"Item"});
  CHECK(BuildIntermediateTable(f, q).table.values[0] == 4);  // floor(9 / 2)
  q.avg_scale = 100;
  CHECK(BuildIntermediateTable(f, q).table.values[0] == 450);
}

TEST_CASE("table build errors") {
  const Ledger f = datagen::PaperFixture();
  CHECK_THROWS_AS(BuildIntermediateTable(f, Derive(f, testing::kQ1, {"Item"}, 3)),
                  EvalError);
  CHECK_THROWS_AS(
      BuildIntermediateTable(f, Derive(f, testing::kQ1, {"Item"}), {.max_blocks = 3}),
      ResourceError);
  auto q = Derive(f, testing::kQ1, {"Item"});
  q.leaves[0].width = 8;
  CHECK_THROWS_AS(BuildIntermediateTable(f, q), ValidationError);
}

TEST_CASE("comp edge cases") {
  SeededRandom rng(1);
  const Group g(16);
  const auto f = fss::SecretFunction::Point(4, 2, GroupElement(77, g));
  const auto shares = fss::Gen(f, {.backend = fss::Backend::kNaive}, rng);
  IntermediateTable empty{4, {}, {}};
  BinMatrix empty_bin{8, {}};
  CHECK(Comp(shares[0], empty, empty_bin, 0).is_zero());

  IntermediateTable t{4, {1, 2, 3}, {0, 0, 0}};
  BinMatrix zeros{8, {0, 0, 0}};
  for (unsigned k = 0; k < 8; ++k) CHECK(Comp(shares[1], t, zeros, k).is_zero());

  IntermediateTable wide{5, {1}, {1}};
  BinMatrix one{8, {1}};
  CHECK_THROWS_AS(Comp(shares[0], wide, one, 0), EvalError);
  CHECK_THROWS_AS(Comp(shares[0], t, zeros, 8), InputError);
}

TEST_CASE("per-bit reconstruction on the fixture") {
  const Ledger f = datagen::PaperFixture();
  const auto q = Derive(f, testing::kQ1, {"Item"}, 8);
  const auto tb = BuildIntermediateTable(f, q);
  SeededRandom rng(2);
  const Group g(16);
  const GroupElement y(g.RandomNonZero(rng), g);
  const auto shares = fss::Gen(fss::SecretFunction::Point(4, 2, y),
                               {.backend = fss::Backend::kNaive}, rng);
  std::string spelled;
  for (unsigned k = 0; k < 8; ++k) {
    const GroupElement sum = Comp(shares[0], tb.table, tb.bin, k) +
                             Comp(shares[1], tb.table, tb.bin, k);
    CHECK(sum == y.Scaled(tb.bin.Bit(0, k)));
    spelled.push_back(sum == y ? '1' : '0');
  }
  CHECK(spelled == "10010000");  // 9, LSB first

  const auto o0 = Eval(shares[0], f, q), o1 = Eval(shares[1], f, q);
  for (unsigned k = 0; k < 8; ++k) {
    CHECK((o0.values[k] + o1.values[k]) == y.Scaled((9 >> k) & 1));
  }
}

TEST_CASE("absent secret reconstructs to zero") {
  const Ledger f = datagen::PaperFixture();
  const auto q = Derive(f, testing::kQ1, {"Item"});
  SeededRandom rng(3);
  const Group g(64);
  const auto shares = fss::Gen(
      fss::SecretFunction::Point(4, 11, GroupElement(g.RandomNonZero(rng), g)),
      {}, rng);
  const auto o0 = Eval(shares[0], f, q), o1 = Eval(shares[1], f, q);
  for (unsigned k = 0; k < 64; ++k) CHECK((o0.values[k] + o1.values[k]).is_zero());
}

TEST_CASE("share shape must match the query") {
  const Ledger f = datagen::PaperFixture();
  SeededRandom rng(4);
  const Group g(64);
  const GroupElement y(g.RandomNonZero(rng), g);
  const auto point = fss::Gen(fss::SecretFunction::Point(4, 2, y), {}, rng);
  const auto interval = fss::Gen(fss::SecretFunction::Interval(4, 2, 5, y), {}, rng);
  CHECK_THROWS_AS(Eval(interval[0], f, Derive(f, testing::kQ1, {"Item"})), EvalError);
  CHECK_THROWS_AS(Eval(point[0], f, Derive(f, testing::kQ5, {"Item"})), EvalError);
  const auto wide = fss::Gen(fss::SecretFunction::Point(5, 2, y), {}, rng);
  CHECK_THROWS_AS(Eval(wide[0], f, Derive(f, testing::kQ1, {"Item"})), EvalError);
}

TEST_CASE("parallel, row-cached and serial kernels agree") {
  SeededRandom rng(6);
  const Group g(64);
  for (int trial = 0; trial < 20; ++trial) {
    IntermediateTable t{10, {}, {}};
    BinMatrix bin{static_cast<unsigned>(1 + rng.Uniform(64)), {}};
    const std::size_t rows = rng.Uniform(200);
    for (std::size_t j = 0; j < rows; ++j) {
      t.keys.push_back(rng.Uniform(1024));
      t.values.push_back(rng.NextU64() & static_cast<std::uint64_t>(LowMask(bin.l)));
    }
    bin.rows = t.values;
    const auto f = fss::SecretFunction::Interval(
        10, 100, 700, GroupElement(g.RandomNonZero(rng), g));
    const auto shares = fss::Gen(f, {}, rng);
    const ShareOutput serial = reference::EvalTable(shares[0], t, bin);
    CHECK(EvalTable(shares[0], t, bin) == serial);
    CHECK(EvalTable(shares[0], t, bin, EvalMode::kRowCached) == serial);
    CHECK(serial.values.size() == bin.l);

    // Row order does not matter.
    IntermediateTable shuffled = t;
    BinMatrix shuffled_bin = bin;
    for (std::size_t i = rows; i > 1; --i) {
      const std::size_t j = rng.Uniform(i);
      std::swap(shuffled.keys[i - 1], shuffled.keys[j]);
      std::swap(shuffled.values[i - 1], shuffled.values[j]);
      std::swap(shuffled_bin.rows[i - 1], shuffled_bin.rows[j]);
    }
    CHECK(EvalTable(shares[0], shuffled, shuffled_bin) == serial);
  }
}

TEST_CASE("replicas with identical ledgers answer identically") {
  SeededRandom data_rng(7);
  const Ledger a = datagen::RandomLedger({.records = 200}, data_rng);
  const Ledger b = DeserializeLedger(SerializeLedger(a));
  SeededRandom rng(8);
  const auto c = datagen::RandomQueryCase(a, {.kind = query::ConditionKind::kSingle}, rng);
  const auto session = client::Gen(c.query, c.secrets, a.schema(), {}, rng);
  const auto& q = session.private_query();
  const auto ta = BuildIntermediateTable(a, q), tb = BuildIntermediateTable(b, q);
  CHECK(ta.table == tb.table);
  CHECK(ta.bin == tb.bin);
  CHECK(Eval(session.shares()[0], a, q) == Eval(session.shares()[0], b, q));
}

TEST_CASE("reconstruction matches the oracle on random small ledgers") {
  SeededRandom rng(10);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Ledger ledger = datagen::RandomLedger(
        {.records = 1 + rng.Uniform(64), .block_size = 1 + rng.Uniform(8)}, rng);
    const auto c = datagen::RandomQueryCase(ledger, {}, rng);
    const auto session = client::Gen(
        c.query, c.secrets, ledger.schema(),
        {.lambda_bits = 16, .backend = fss::Backend::kNaive}, rng);
    const auto outputs = testing::EvalAll(session, ledger);
    const GroupElement y = session.y();
    u128 decoded = 0;
    for (unsigned k = 0; k < 64; ++k) {
      const GroupElement sum = outputs[0].values[k] + outputs[1].values[k];
      REQUIRE((sum.is_zero() || sum == y));
      if (sum == y) decoded |= u128{1} << k;
    }
    CHECK_MESSAGE(decoded == c.expected.value, query::FormatQuery(c.query));
    ++checked;
  }
  CHECK(checked == 300);
}

}  // namespace
}  // namespace piqlb::sp
