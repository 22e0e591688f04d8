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

// Aggregate query language over the ledger.
//
//   query  := "SELECT" agg "(" column ")" "FROM" time "<" "blk_range_cond"
//             "<" time "WHERE" cond
//   agg    := "SUM" | "COUNT" | "AVG" | "MIN" | "MAX"
//   time   := "(" stamp ")" | stamp
//   stamp  := D/MM/YYYY | YYYY-MM-DD | YYYY-MM-DDTHH:MM:SS[Z] | unix-seconds
//   cond   := leaf { ("AND" | "∧") leaf } | leaf { ("OR" | "∨") leaf }
//   leaf   := column "=" value
//           | number cmp column cmp number
//   cmp    := "<" | "<=" | "≤"
//   value  := number | 'quoted string' | "quoted string" | bare-word
//
// Keywords are case-insensitive. The block window is half-open
// [begin, end): a date-only lower bound starts at 00:00 UTC of that day and a
// date-only upper bound covers the whole day (end = next day 00:00 UTC).
// Numeric stamps are used verbatim. Strict range bounds are normalised to a
// closed interval, so "4 < Price < 10" becomes [5, 9].

#ifndef PIQLB_QUERY_HPP_
#define PIQLB_QUERY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "piqlb/bytes.hpp"
#include "piqlb/schema.hpp"

namespace piqlb::query {

enum class AggregateType : std::uint8_t {
  kSum = 1,
  kCount = 2,
  kAvg = 3,
  kMin = 4,
  kMax = 5,
};

enum class ConditionKind : std::uint8_t {
  kSingle = 1,
  kRange = 2,
  kAnd = 3,
  kOr = 4,
};

const char* AggregateName(AggregateType t);
const char* ConditionName(ConditionKind k);

struct EqualsLeaf {
  std::string column;
  Value value;
  friend bool operator==(const EqualsLeaf&, const EqualsLeaf&) = default;
};

// Closed interval [lo, hi] on a numeric column.
struct RangeLeaf {
  std::string column;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  friend bool operator==(const RangeLeaf&, const RangeLeaf&) = default;
};

struct Condition {
  ConditionKind kind = ConditionKind::kSingle;
  std::vector<EqualsLeaf> leaves;  // SINGLE, AND, OR
  RangeLeaf range;                 // RANGE
  friend bool operator==(const Condition&, const Condition&) = default;
};

// Half-open block window [begin, end) in unix seconds.
struct TimeWindow {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct Query {
  AggregateType aggregate = AggregateType::kSum;
  std::string agg_column;
  TimeWindow window;
  Condition condition;
  friend bool operator==(const Query&, const Query&) = default;
};

inline constexpr std::int64_t kDefaultMaxWindowSeconds = 31 * 86400;

struct QueryLimits {
  // Largest accepted (end - begin); the client-side form of the window
  // threshold. Zero disables the check.
  std::int64_t max_window_seconds = kDefaultMaxWindowSeconds;
};

// Throws ParseError on grammar violations and ValidationError on semantic
// ones (window, range count, AND/OR mixing, duplicate leaves, empty range).
Query ParseQuery(std::string_view text, const QueryLimits& limits = {});
void ValidateQuery(const Query& q, const QueryLimits& limits = {});

// Canonical text that ParseQuery maps back to an identical Query.
std::string FormatQuery(const Query& q);

struct Timestamp {
  std::int64_t seconds = 0;
  bool date_only = false;
};
Timestamp ParseTimestamp(std::string_view text);
std::string FormatTimestamp(std::int64_t seconds);

// ---------------------------------------------------------------------------
// Private query

inline constexpr unsigned kDefaultResultBits = 64;
inline constexpr std::uint8_t kPrivateQueryVersion = 1;

struct PrivateLeaf {
  std::string column;
  bool secret = false;
  std::optional<Value> value;  // set only for plaintext leaves
  unsigned width = 0;          // encoding width of the column
  friend bool operator==(const PrivateLeaf&, const PrivateLeaf&) = default;
};

// The query with every secret condition value replaced by '?'. This is what
// service providers see.
struct PrivateQuery {
  AggregateType aggregate = AggregateType::kSum;
  std::string agg_column;
  TimeWindow window;
  ConditionKind kind = ConditionKind::kSingle;
  std::vector<PrivateLeaf> leaves;
  unsigned domain_bits = 0;  // sum of secret leaf widths, declared order
  unsigned result_bits = kDefaultResultBits;
  std::uint32_t avg_scale = 1;

  // Secret leaves, in key concatenation order.
  std::vector<const PrivateLeaf*> SecretLeaves() const;
  std::string ToText() const;

  friend bool operator==(const PrivateQuery&, const PrivateQuery&) = default;
};

Bytes SerializePrivateQuery(const PrivateQuery& q);
PrivateQuery DeserializePrivateQuery(std::span<const std::uint8_t> bytes);

// Encoded secrets ready to become a secret function.
struct SecretSpec {
  ConditionKind kind = ConditionKind::kSingle;
  unsigned domain_bits = 0;
  std::vector<BitString> points;  // SINGLE/AND: one; OR: one per leaf
  BitString range_lo;             // RANGE
  BitString range_hi;
  std::vector<EqualsLeaf> elided;  // original secret leaves
};

struct DerivedQuery {
  PrivateQuery private_query;
  SecretSpec secrets;
};

struct PrivateQueryOptions {
  unsigned result_bits = kDefaultResultBits;
  std::uint32_t avg_scale = 1;
};

// Splits q into the public q' and the secret values named by
// `secret_columns`. Throws ValidationError when a secret names a column that
// is not part of the condition, or the combination is unsupported.
DerivedQuery DerivePrivateQuery(const Query& q,
                                std::span<const std::string> secret_columns,
                                const Schema& schema,
                                const PrivateQueryOptions& options = {});

// Checks q' against the schema an SP holds: columns exist, widths agree,
// domain_bits is consistent. Throws ValidationError.
void CheckPrivateQuery(const PrivateQuery& q, const Schema& schema);

}  // namespace piqlb::query

#endif  // PIQLB_QUERY_HPP_
