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

#include "piqlb/schema.hpp"

#include <set>

#include "json.hpp"
#include "piqlb/error.hpp"
#include "piqlb/group.hpp"

namespace piqlb {

std::string ValueToString(const Value& v) {
  if (const auto* n = std::get_if<std::uint64_t>(&v)) return std::to_string(*n);
  return std::get<std::string>(v);
}

std::string BitString::ToString() const {
  std::string out;
  out.reserve(width);
  for (unsigned i = width; i-- > 0;) out.push_back(((bits >> i) & 1) ? '1' : '0');
  return out;
}

BitString Concat(std::span<const BitString> parts) {
  BitString out;
  for (const auto& p : parts) {
    if (out.width + p.width > 128) {
      throw InputError("concatenated condition exceeds 128 bits");
    }
    out.bits = p.width == 128 ? p.bits : (out.bits << p.width) | p.bits;
    out.width += p.width;
  }
  return out;
}

std::uint64_t HashString(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

BitString EncodeConditionValue(const ColumnSpec& column, const Value& value) {
  if (column.kind == ColumnKind::kNumeric) {
    const auto* n = std::get_if<std::uint64_t>(&value);
    if (n == nullptr) {
      throw InputError("column " + column.name + " is numeric, got string '" +
                       std::get<std::string>(value) + "'");
    }
    if ((static_cast<u128>(*n) & ~LowMask(column.bits)) != 0) {
      throw InputError("value " + std::to_string(*n) + " overflows the " +
                       std::to_string(column.bits) + "-bit column " +
                       column.name);
    }
    return {*n, column.bits};
  }
  const std::string text = ValueToString(value);
  if (column.dictionary.empty()) return {HashString(text), kHashedStringBits};
  for (std::size_t i = 0; i < column.dictionary.size(); ++i) {
    if (column.dictionary[i] == text) return {i, column.bits};
  }
  throw InputError("'" + text + "' is not in the dictionary of column " +
                   column.name);
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::set<std::string> names;
  for (auto& c : columns_) {
    if (c.name.empty()) throw SchemaError("empty column name");
    if (!names.insert(c.name).second) {
      throw SchemaError("duplicate column " + c.name);
    }
    if (c.kind == ColumnKind::kNumeric) {
      if (c.bits < 1 || c.bits > 64) {
        throw SchemaError("numeric column " + c.name +
                          " must be 1..64 bits wide");
      }
      if (!c.dictionary.empty()) {
        throw SchemaError("numeric column " + c.name + " has a dictionary");
      }
    } else if (c.dictionary.empty()) {
      c.bits = kHashedStringBits;
    } else {
      if (c.bits < 1 || c.bits > 64 ||
          (c.bits < 64 && c.dictionary.size() > (std::uint64_t{1} << c.bits))) {
        throw SchemaError("dictionary of column " + c.name +
                          " does not fit in " + std::to_string(c.bits) +
                          " bits");
      }
    }
    auto& codes = codes_.emplace_back();
    for (std::size_t i = 0; i < c.dictionary.size(); ++i) {
      if (!codes.emplace(c.dictionary[i], i).second) {
        throw SchemaError("duplicate dictionary entry in column " + c.name);
      }
    }
  }
}

std::optional<std::size_t> Schema::Find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::IndexOf(std::string_view name) const {
  auto i = Find(name);
  if (!i) throw InputError("unknown column " + std::string(name));
  return *i;
}

u128 Schema::EncodeCell(std::size_t column, const Value& value) const {
  const ColumnSpec& c = columns_[column];
  if (c.kind == ColumnKind::kNumeric) return std::get<std::uint64_t>(value);
  const auto& s = std::get<std::string>(value);
  if (c.dictionary.empty()) return HashString(s);
  return codes_[column].at(s);
}

void Schema::ValidateRow(std::span<const Value> row) const {
  if (row.size() != columns_.size()) {
    throw SchemaError("expected " + std::to_string(columns_.size()) +
                      " columns, got " + std::to_string(row.size()));
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    const ColumnSpec& c = columns_[i];
    if (c.kind == ColumnKind::kNumeric) {
      if (!std::holds_alternative<std::uint64_t>(row[i])) {
        throw SchemaError("column " + c.name + " expects a number");
      }
    } else if (!std::holds_alternative<std::string>(row[i])) {
      throw SchemaError("column " + c.name + " expects a string");
    }
    try {
      EncodeConditionValue(c, row[i]);
    } catch (const InputError& e) {
      throw SchemaError(e.what());
    }
  }
}

std::string Schema::ToJson() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    nlohmann::json j = {{"name", c.name},
                        {"kind", c.kind == ColumnKind::kNumeric ? "numeric"
                                                                : "string"},
                        {"bits", c.bits}};
    if (!c.dictionary.empty()) j["dictionary"] = c.dictionary;
    cols.push_back(std::move(j));
  }
  return nlohmann::json{{"columns", cols}}.dump();
}

Schema Schema::FromJson(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") ||
      !doc["columns"].is_array()) {
    throw SchemaError("schema must be an object with a 'columns' array");
  }
  std::vector<ColumnSpec> columns;
  try {
    for (const auto& j : doc["columns"]) {
      ColumnSpec c;
      c.name = j.at("name").get<std::string>();
      const std::string kind = j.value("kind", "numeric");
      if (kind == "numeric") {
        c.kind = ColumnKind::kNumeric;
      } else if (kind == "string") {
        c.kind = ColumnKind::kString;
      } else {
        throw SchemaError("unknown column kind '" + kind + "'");
      }
      c.bits = j.value("bits", c.kind == ColumnKind::kNumeric
                                   ? kDefaultNumericBits
                                   : kHashedStringBits);
      if (j.contains("dictionary")) {
        c.dictionary = j["dictionary"].get<std::vector<std::string>>();
      }
      columns.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed column declaration: ") + e.what());
  }
  return Schema(std::move(columns));
}

}  // namespace piqlb
