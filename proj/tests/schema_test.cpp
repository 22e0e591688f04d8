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
#include "piqlb/error.hpp"
#include "piqlb/schema.hpp"

namespace piqlb {
namespace {

TEST_CASE("numeric encoding respects the declared width") {
  ColumnSpec item{"Item", ColumnKind::kNumeric, 4, {}};
  CHECK(EncodeConditionValue(item, std::uint64_t{2}).ToString() == "0010");
  CHECK(EncodeConditionValue(item, std::uint64_t{15}).ToString() == "1111");
  CHECK_THROWS_AS(EncodeConditionValue(item, std::uint64_t{20}), InputError);
  CHECK_THROWS_AS(EncodeConditionValue(item, std::string("x")), InputError);
}

TEST_CASE("string encoding by dictionary and by hash") {
  ColumnSpec color{"Color", ColumnKind::kString, 8, {"red", "green"}};
  CHECK(EncodeConditionValue(color, std::string("green")).bits == 1);
  CHECK(EncodeConditionValue(color, std::string("green")).width == 8);
  CHECK_THROWS_AS(EncodeConditionValue(color, std::string("teal")), InputError);

  ColumnSpec name{"Name", ColumnKind::kString, 64, {}};
  // FNV-1a 64 reference values.
  CHECK(HashString("") == 0xcbf29ce484222325ULL);
  CHECK(HashString("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(HashString("foobar") == 0x85944171f73967e8ULL);
  CHECK(EncodeConditionValue(name, std::string("a")).bits == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("concatenation puts the first part in the high bits") {
  std::vector<BitString> parts = {{0b10, 2}, {0b011, 3}};
  CHECK(Concat(parts).ToString() == "10011");
  std::vector<BitString> wide = {{1, 64}, {1, 64}};
  CHECK(Concat(wide).width == 128);
  std::vector<BitString> too_wide = {{1, 64}, {1, 64}, {1, 1}};
  CHECK_THROWS_AS(Concat(too_wide), InputError);
}

TEST_CASE("schema validation") {
  CHECK_THROWS_AS(Schema({{"A", ColumnKind::kNumeric, 0, {}}}), SchemaError);
  CHECK_THROWS_AS(Schema({{"A", ColumnKind::kNumeric, 65, {}}}), SchemaError);
  CHECK_THROWS_AS(Schema({{"A", ColumnKind::kNumeric, 8, {}},
                          {"A", ColumnKind::kNumeric, 8, {}}}),
                  SchemaError);
  CHECK_THROWS_AS(Schema({{"C", ColumnKind::kString, 1, {"a", "b", "c"}}}),
                  SchemaError);
  CHECK_THROWS_AS(Schema({{"C", ColumnKind::kString, 4, {"a", "a"}}}),
                  SchemaError);
  Schema hashed({{"C", ColumnKind::kString, 3, {}}});
  CHECK(hashed.columns()[0].bits == 64);
}

TEST_CASE("rows are checked against the schema") {
  Schema s({{"Item", ColumnKind::kNumeric, 4, {}},
            {"Color", ColumnKind::kString, 8, {"red"}}});
  std::vector<Value> ok = {std::uint64_t{3}, std::string("red")};
  CHECK_NOTHROW(s.ValidateRow(ok));
  CHECK(s.EncodeCell(1, ok[1]) == 0);
  std::vector<Value> overflow = {std::uint64_t{16}, std::string("red")};
  CHECK_THROWS_AS(s.ValidateRow(overflow), SchemaError);
  std::vector<Value> swapped = {std::string("red"), std::uint64_t{3}};
  CHECK_THROWS_AS(s.ValidateRow(swapped), SchemaError);
  std::vector<Value> short_row = {std::uint64_t{3}};
  CHECK_THROWS_AS(s.ValidateRow(short_row), SchemaError);
}

TEST_CASE("schema JSON round trip") {
  Schema s({{"Item", ColumnKind::kNumeric, 4, {}},
            {"Price", ColumnKind::kNumeric, 8, {}},
            {"Color", ColumnKind::kString, 8, {"red", "green"}},
            {"Note", ColumnKind::kString, 64, {}}});
  CHECK(Schema::FromJson(s.ToJson()) == s);
  CHECK_THROWS_AS(Schema::FromJson("{"), SchemaError);
  CHECK_THROWS_AS(Schema::FromJson("{\"cols\":[]}"), SchemaError);
  CHECK_THROWS_AS(Schema::FromJson("{\"columns\":[{\"kind\":\"numeric\"}]}"),
                  SchemaError);
  CHECK_THROWS_AS(
      Schema::FromJson("{\"columns\":[{\"name\":\"x\",\"kind\":\"float\"}]}"),
      SchemaError);
}

}  // namespace
}  // namespace piqlb
