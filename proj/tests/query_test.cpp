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

#include <string>
#include <vector>

#include "doctest.h"
#include "piqlb/error.hpp"
#include "piqlb/query.hpp"
#include "piqlb/random.hpp"

namespace piqlb::query {
namespace {

constexpr std::int64_t kJune1 = 1654041600;
constexpr std::int64_t kDay = 86400;

Schema FixtureSchema() {
  return Schema({{"Item", ColumnKind::kNumeric, 4, {}},
                 {"Price", ColumnKind::kNumeric, 8, {}},
                 {"Color", ColumnKind::kString, 8, {"red", "green", "blue"}}});
}

TEST_CASE("single equality condition") {
  Query q = ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE Item=2");
  CHECK(q.aggregate == AggregateType::kSum);
  CHECK(q.agg_column == "Price");
  CHECK(q.window.begin == kJune1);
  CHECK(q.window.end == kJune1 + 4 * kDay);
  REQUIRE(q.condition.kind == ConditionKind::kSingle);
  REQUIRE(q.condition.leaves.size() == 1);
  CHECK(q.condition.leaves[0].column == "Item");
  CHECK(q.condition.leaves[0].value == Value(std::uint64_t{2}));
}

TEST_CASE("keywords are case-insensitive and unicode operators are accepted") {
  Query a = ParseQuery(
      "select count(Price) from 2022-06-01 < BLK_RANGE_COND < 2022-06-02 "
      "where 2 \xe2\x89\xa4 Item \xe2\x89\xa4 5;");
  CHECK(a.aggregate == AggregateType::kCount);
  REQUIRE(a.condition.kind == ConditionKind::kRange);
  CHECK(a.condition.range == RangeLeaf{"Item", 2, 5});

  Query b = ParseQuery(
      "SELECT MIN(Price) FROM 1654041600 < blk_range_cond < 1654128000 "
      "WHERE Item = 2 \xe2\x88\xa7 Color = 'red'");
  CHECK(b.condition.kind == ConditionKind::kAnd);
  CHECK(b.window.end == kJune1 + kDay);

  Query c = ParseQuery(
      "SELECT MAX(Price) FROM 1654041600 < blk_range_cond < 1654128000 "
      "WHERE Item = 2 \xe2\x88\xa8 Item = 3");
  CHECK(c.condition.kind == ConditionKind::kOr);
}

TEST_CASE("strict range bounds become a closed interval") {
  Query q = ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE 4 < Price < 10");
  CHECK(q.condition.range == RangeLeaf{"Price", 5, 9});
  CHECK_THROWS_AS(ParseQuery("SELECT SUM(Price) FROM (1/06/2022) < "
                             "blk_range_cond < (4/06/2022) WHERE 4 < Price < 5"),
                  ValidationError);
}

TEST_CASE("datetime stamps are taken verbatim") {
  Query q = ParseQuery(
      "SELECT AVG(Price) FROM (2022-06-01T12:00:00Z) < blk_range_cond < "
      "(2022-06-01T13:30:00) WHERE Item = 1");
  CHECK(q.window.begin == kJune1 + 12 * 3600);
  CHECK(q.window.end == kJune1 + 13 * 3600 + 1800);
}

TEST_CASE("semantic violations") {
  const std::string head =
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) WHERE ";
  CHECK_THROWS_WITH_AS(ParseQuery(head + "1 < Price < 10 AND 2 < Item < 5"),
                       doctest::Contains("more than one range"),
                       ValidationError);
  CHECK_THROWS_AS(ParseQuery(head + "Item = 1 AND Price = 2 OR Item = 3"),
                  ValidationError);
  CHECK_THROWS_AS(ParseQuery(head + "Item = 1 AND 2 < Price < 9"),
                  ValidationError);
  CHECK_THROWS_AS(ParseQuery(head + "Item = 1 AND Item = 2"), ValidationError);
  CHECK_THROWS_AS(ParseQuery(head + "Item = 1 OR Price = 2"), ValidationError);
  CHECK_THROWS_AS(ParseQuery(head + "Item = 1 OR Item = 1"), ValidationError);
  CHECK_THROWS_AS(
      ParseQuery("SELECT SUM(Price) FROM (4/06/2022) < blk_range_cond < "
                 "(1/06/2022) WHERE Item = 1"),
      ValidationError);
  CHECK_THROWS_AS(
      ParseQuery("SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < "
                 "(1/08/2022) WHERE Item = 1"),
      ValidationError);
  CHECK_NOTHROW(ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (1/08/2022) "
      "WHERE Item = 1",
      QueryLimits{.max_window_seconds = 0}));
}

TEST_CASE("grammar errors carry a position and expected tokens") {
  try {
    ParseQuery("SELECT SUM(Price FROM (1/06/2022) < blk_range_cond < "
               "(4/06/2022) WHERE Item=2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 17);
    REQUIRE(e.expected().size() == 1);
    CHECK(e.expected()[0] == "')'");
  }
  CHECK_THROWS_AS(ParseQuery("SELECT FOO(Price) FROM 1 < blk_range_cond < 2 "
                             "WHERE Item = 1"),
                  ParseError);
  CHECK_THROWS_AS(ParseQuery("SELECT SUM(Price) FROM (31/02/2022) < "
                             "blk_range_cond < (4/06/2022) WHERE Item=2"),
                  ParseError);
  CHECK_THROWS_AS(ParseQuery("SELECT SUM(Price) FROM 1 < blk_range_cond < 2 "
                             "WHERE Item = 'open"),
                  ParseError);
  CHECK_THROWS_AS(ParseQuery("SELECT SUM(Price) FROM 1 < blk_range_cond < 2 "
                             "WHERE Item = 1 extra"),
                  ParseError);
  CHECK_THROWS_AS(ParseQuery("SELECT SUM(Price) FROM 1 < blk_range_cond < 2 "
                             "WHERE Item = 99999999999999999999"),
                  ParseError);
  CHECK_THROWS_AS(ParseQuery(""), ParseError);
}

Query RandomQuery(RandomSource& rng) {
  static const char* kColumns[] = {"Item", "Price", "Color", "Serial"};
  Query q;
  q.aggregate = static_cast<AggregateType>(rng.Between(1, 5));
  q.agg_column = kColumns[rng.Uniform(4)];
  q.window.begin = static_cast<std::int64_t>(rng.Uniform(2'000'000'000));
  q.window.end = q.window.begin + 1 + static_cast<std::int64_t>(rng.Uniform(kDay * 30));
  auto value = [&]() -> Value {
    if (rng.Coin()) return rng.NextU64();
    std::string s;
    for (std::uint64_t i = 0, n = 1 + rng.Uniform(6); i < n; ++i) {
      s.push_back(static_cast<char>('a' + rng.Uniform(26)));
    }
    return s;
  };
  q.condition.kind = static_cast<ConditionKind>(rng.Between(1, 4));
  switch (q.condition.kind) {
    case ConditionKind::kSingle:
      q.condition.leaves.push_back({kColumns[rng.Uniform(4)], value()});
      break;
    case ConditionKind::kRange: {
      std::uint64_t a = rng.NextU64(), b = rng.NextU64();
      q.condition.range = {kColumns[rng.Uniform(4)], std::min(a, b), std::max(a, b)};
      break;
    }
    case ConditionKind::kAnd:
      for (std::uint64_t i = 0, n = 2 + rng.Uniform(3); i < n; ++i) {
        q.condition.leaves.push_back({kColumns[i], value()});
      }
      break;
    case ConditionKind::kOr:
      for (std::uint64_t i = 0, n = 2 + rng.Uniform(3); i < n; ++i) {
        q.condition.leaves.push_back({"Item", std::uint64_t{i * 7 + rng.Uniform(7)}});
      }
      break;
  }
  return q;
}

TEST_CASE("format then parse is the identity") {
  SeededRandom rng(42);
  for (int i = 0; i < 500; ++i) {
    const Query q = RandomQuery(rng);
    const std::string text = FormatQuery(q);
    const Query back = ParseQuery(text, QueryLimits{.max_window_seconds = 0});
    CHECK_MESSAGE(back == q, text);
    CHECK(FormatQuery(back) == text);
  }
}

TEST_CASE("timestamp formats") {
  CHECK(ParseTimestamp("1/06/2022").seconds == kJune1);
  CHECK(ParseTimestamp("1/06/2022").date_only);
  CHECK(ParseTimestamp("2022-06-01").seconds == kJune1);
  CHECK_FALSE(ParseTimestamp("1654041600").date_only);
  CHECK(FormatTimestamp(kJune1 + 3661) == "2022-06-01T01:01:01Z");
  CHECK_THROWS_AS(ParseTimestamp("2022-13-01"), InputError);
  CHECK_THROWS_AS(ParseTimestamp("1/6"), InputError);
  CHECK_THROWS_AS(ParseTimestamp("2022-06-01T25:00:00"), InputError);
}

TEST_CASE("deriving q' from a single condition") {
  const Schema schema = FixtureSchema();
  Query q = ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE Item=2");
  const std::vector<std::string> secret = {"Item"};
  DerivedQuery d = DerivePrivateQuery(q, secret, schema);
  CHECK(d.private_query.ToText().ends_with("WHERE Item = ?"));
  CHECK(d.private_query.domain_bits == 4);
  REQUIRE(d.secrets.points.size() == 1);
  CHECK(d.secrets.points[0].ToString() == "0010");
  CHECK_NOTHROW(CheckPrivateQuery(d.private_query, schema));

  const std::vector<std::string> price = {"Price"};
  CHECK_THROWS_AS(DerivePrivateQuery(q, price, schema), ValidationError);
  CHECK_THROWS_AS(DerivePrivateQuery(q, {}, schema), ValidationError);

  Query big = ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE Item=20");
  CHECK_THROWS_AS(DerivePrivateQuery(big, secret, schema), InputError);
}

TEST_CASE("deriving q' from an AND condition") {
  const Schema schema = FixtureSchema();
  Query q = ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE Item=2 AND Color='red'");
  const std::vector<std::string> both = {"Color", "Item"};
  DerivedQuery d = DerivePrivateQuery(q, both, schema);
  CHECK(d.private_query.ToText().ends_with("WHERE Item = ? AND Color = ?"));
  CHECK(d.private_query.domain_bits == 12);
  CHECK(d.secrets.points[0].ToString() == "001000000000");
  CHECK(d.secrets.elided.size() == 2);

  const std::vector<std::string> item = {"Item"};
  DerivedQuery partial = DerivePrivateQuery(q, item, schema);
  CHECK(partial.private_query.ToText().ends_with("WHERE Item = ? AND Color = 'red'"));
  CHECK(partial.private_query.domain_bits == 4);
  CHECK_NOTHROW(CheckPrivateQuery(partial.private_query, schema));
}

TEST_CASE("deriving q' from OR and RANGE conditions") {
  const Schema schema = FixtureSchema();
  const std::vector<std::string> item = {"Item"};
  Query o = ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE Item=2 OR Item=5");
  DerivedQuery d = DerivePrivateQuery(o, item, schema);
  REQUIRE(d.secrets.points.size() == 2);
  CHECK(d.secrets.points[1].ToString() == "0101");
  CHECK(d.private_query.domain_bits == 4);
  CHECK_NOTHROW(CheckPrivateQuery(d.private_query, schema));

  Query r = ParseQuery(
      "SELECT MIN(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE 2 <= Item <= 5");
  DerivedQuery dr = DerivePrivateQuery(r, item, schema);
  CHECK(dr.secrets.range_lo.ToString() == "0010");
  CHECK(dr.secrets.range_hi.ToString() == "0101");
  CHECK(dr.private_query.ToText().ends_with("WHERE ? <= Item <= ?"));

  Query s = ParseQuery(
      "SELECT SUM(Color) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE Item=2");
  CHECK_THROWS_AS(DerivePrivateQuery(s, item, schema), ValidationError);
}

TEST_CASE("serialized q' carries no secret values") {
  const Schema schema = FixtureSchema();
  Query q = ParseQuery(
      "SELECT SUM(Price) FROM (1/06/2022) < blk_range_cond < (4/06/2022) "
      "WHERE Item=11 AND Color='blue'");
  const std::vector<std::string> secret = {"Item", "Color"};
  DerivedQuery d = DerivePrivateQuery(q, secret, schema);
  const Bytes wire = SerializePrivateQuery(d.private_query);
  const std::string text(wire.begin(), wire.end());
  CHECK(text.find("blue") == std::string::npos);
  for (std::uint8_t b : wire) CHECK(b != 11);
  CHECK(DeserializePrivateQuery(wire) == d.private_query);

  for (std::size_t n = 0; n < wire.size(); ++n) {
    CHECK_THROWS_AS(DeserializePrivateQuery(std::span(wire.data(), n)),
                    DecodeError);
  }
  Bytes bad = wire;
  bad[0] = 9;
  CHECK_THROWS_AS(DeserializePrivateQuery(bad), DecodeError);
}

TEST_CASE("q' checks against the provider schema") {
  const Schema schema = FixtureSchema();
  PrivateQuery q;
  q.agg_column = "Price";
  q.window = {kJune1, kJune1 + kDay};
  q.kind = ConditionKind::kSingle;
  q.leaves = {{"Item", true, std::nullopt, 4}};
  q.domain_bits = 4;
  CHECK_NOTHROW(CheckPrivateQuery(q, schema));
  PrivateQuery wrong_width = q;
  wrong_width.leaves[0].width = 5;
  CHECK_THROWS_AS(CheckPrivateQuery(wrong_width, schema), ValidationError);
  PrivateQuery wrong_domain = q;
  wrong_domain.domain_bits = 8;
  CHECK_THROWS_AS(CheckPrivateQuery(wrong_domain, schema), ValidationError);
  PrivateQuery unknown = q;
  unknown.leaves[0].column = "Size";
  CHECK_THROWS_AS(CheckPrivateQuery(unknown, schema), ValidationError);
  PrivateQuery no_secret = q;
  no_secret.leaves[0] = {"Item", false, Value(std::uint64_t{2}), 4};
  CHECK_THROWS_AS(CheckPrivateQuery(no_secret, schema), ValidationError);
  PrivateQuery wide = q;
  wide.result_bits = 65;
  CHECK_THROWS_AS(CheckPrivateQuery(wide, schema), ValidationError);
}

}  // namespace
}  // namespace piqlb::query
