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

#ifndef PIQLB_SCHEMA_HPP_
#define PIQLB_SCHEMA_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "piqlb/bytes.hpp"

namespace piqlb {

// A cell value: unsigned integer or string.
using Value = std::variant<std::uint64_t, std::string>;

std::string ValueToString(const Value& v);

enum class ColumnKind : std::uint8_t { kNumeric = 0, kString = 1 };

inline constexpr unsigned kDefaultNumericBits = 32;
inline constexpr unsigned kHashedStringBits = 64;

// Fixed-width bit encoding of a condition value. The string form is MSB first.
struct BitString {
  u128 bits = 0;
  unsigned width = 0;

  std::string ToString() const;
  friend bool operator==(const BitString&, const BitString&) = default;
};

// Concatenation c1 || c2 || ... with c1 in the most significant position.
BitString Concat(std::span<const BitString> parts);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  unsigned bits = kDefaultNumericBits;
  // String columns: value -> code is the index in this list. Empty means
  // values are hashed (FNV-1a 64) and bits is 64.
  std::vector<std::string> dictionary;

  friend bool operator==(const ColumnSpec& a, const ColumnSpec& b) {
    return a.name == b.name && a.kind == b.kind && a.bits == b.bits &&
           a.dictionary == b.dictionary;
  }
};

// 64-bit FNV-1a, the encoding for string columns without a dictionary.
std::uint64_t HashString(std::string_view s);

// Encodes a value under the column's declared width. Throws InputError on
// overflow, kind mismatch, or a string missing from the dictionary.
BitString EncodeConditionValue(const ColumnSpec& column, const Value& value);

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }

  std::optional<std::size_t> Find(std::string_view name) const;
  // Throws InputError for unknown columns.
  std::size_t IndexOf(std::string_view name) const;
  const ColumnSpec& Column(std::string_view name) const {
    return columns_[IndexOf(name)];
  }

  // Cheap encoding of a stored cell: numeric values as-is, dictionary codes
  // via a prebuilt map, hashes otherwise.
  u128 EncodeCell(std::size_t column, const Value& value) const;

  // Throws SchemaError unless `row` has one well-formed value per column.
  void ValidateRow(std::span<const Value> row) const;

  std::string ToJson() const;
  static Schema FromJson(std::string_view json);

  friend bool operator==(const Schema& a, const Schema& b) {
    return a.columns_ == b.columns_;
  }

 private:
  std::vector<ColumnSpec> columns_;
  std::vector<std::unordered_map<std::string, std::uint64_t>> codes_;
};

}  // namespace piqlb

#endif  // PIQLB_SCHEMA_HPP_
