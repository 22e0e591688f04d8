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

#include "piqlb/query.hpp"

#include <algorithm>
#include <cctype>
#include <ctime>
#include <limits>
#include <set>

#include "piqlb/error.hpp"

namespace piqlb::query {

const char* AggregateName(AggregateType t) {
  switch (t) {
    case AggregateType::kSum:
      return "SUM";
    case AggregateType::kCount:
      return "COUNT";
    case AggregateType::kAvg:
      return "AVG";
    case AggregateType::kMin:
      return "MIN";
    case AggregateType::kMax:
      return "MAX";
  }
  return "?";
}

const char* ConditionName(ConditionKind k) {
  switch (k) {
    case ConditionKind::kSingle:
      return "single";
    case ConditionKind::kRange:
      return "range";
    case ConditionKind::kAnd:
      return "and";
    case ConditionKind::kOr:
      return "or";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Timestamps

namespace {

std::optional<std::int64_t> CivilToUnix(int year, int month, int day, int hour,
                                        int minute, int second) {
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour < 0 ||
      hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 60) {
    return std::nullopt;
  }
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = month - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = minute;
  tm.tm_sec = second;
  const std::time_t t = timegm(&tm);
  // timegm normalises out-of-range days (31/02 -> 03/03); reject those.
  if (tm.tm_mday != day || tm.tm_mon != month - 1) return std::nullopt;
  return static_cast<std::int64_t>(t);
}

bool AllDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

std::optional<int> SmallInt(std::string_view s) {
  if (!AllDigits(s) || s.size() > 6) return std::nullopt;
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

Timestamp ParseTimestamp(std::string_view text) {
  auto fail = [&]() -> Timestamp {
    throw InputError("invalid timestamp '" + std::string(text) + "'");
  };
  if (AllDigits(text)) {
    if (text.size() > 18) fail();
    std::int64_t v = 0;
    for (char c : text) v = v * 10 + (c - '0');
    return {v, false};
  }
  if (text.find('/') != std::string_view::npos) {
    auto parts = Split(text, '/');
    if (parts.size() != 3) return fail();
    auto d = SmallInt(parts[0]), m = SmallInt(parts[1]), y = SmallInt(parts[2]);
    if (!d || !m || !y || parts[2].size() != 4) return fail();
    auto t = CivilToUnix(*y, *m, *d, 0, 0, 0);
    if (!t) return fail();
    return {*t, true};
  }
  std::string_view date = text, time;
  if (auto t = text.find('T'); t != std::string_view::npos) {
    date = text.substr(0, t);
    time = text.substr(t + 1);
    if (!time.empty() && time.back() == 'Z') time.remove_suffix(1);
  }
  auto dparts = Split(date, '-');
  if (dparts.size() != 3 || dparts[0].size() != 4) return fail();
  auto y = SmallInt(dparts[0]), m = SmallInt(dparts[1]), d = SmallInt(dparts[2]);
  if (!y || !m || !d) return fail();
  int hh = 0, mm = 0, ss = 0;
  const bool date_only = time.data() == nullptr;
  if (!date_only) {
    auto tparts = Split(time, ':');
    if (tparts.size() != 3) return fail();
    auto h = SmallInt(tparts[0]), mi = SmallInt(tparts[1]), s = SmallInt(tparts[2]);
    if (!h || !mi || !s) return fail();
    hh = *h;
    mm = *mi;
    ss = *s;
  }
  auto t = CivilToUnix(*y, *m, *d, hh, mm, ss);
  if (!t) return fail();
  return {*t, date_only};
}

std::string FormatTimestamp(std::int64_t seconds) {
  const std::time_t t = static_cast<std::time_t>(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

enum class Tok {
  kIdent,
  kNumber,
  kStamp,
  kString,
  kEq,
  kLt,
  kLe,
  kLParen,
  kRParen,
  kAndSym,
  kOrSym,
  kSemicolon,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> Tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view lit) { return s.substr(i, lit.size()) == lit; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t at = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                              s[i] == '_')) {
        ++i;
      }
      out.push_back({Tok::kIdent, std::string(s.substr(at, i - at)), at});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                              s[i] == '/' || s[i] == '-' || s[i] == ':' ||
                              s[i] == 'T' || s[i] == 'Z')) {
        ++i;
      }
      std::string text(s.substr(at, i - at));
      out.push_back({AllDigits(text) ? Tok::kNumber : Tok::kStamp, text, at});
    } else if (c == '\'' || c == '"') {
      const std::size_t close = s.find(c, i + 1);
      if (close == std::string_view::npos) {
        throw ParseError("unterminated string literal", at);
      }
      out.push_back({Tok::kString, std::string(s.substr(i + 1, close - i - 1)), at});
      i = close + 1;
    } else if (starts("<=") || starts("\xe2\x89\xa4")) {
      out.push_back({Tok::kLe, "<=", at});
      i += s[i] == '<' ? 2 : 3;
    } else if (c == '<') {
      out.push_back({Tok::kLt, "<", at});
      ++i;
    } else if (c == '=') {
      out.push_back({Tok::kEq, "=", at});
      i += starts("==") ? 2 : 1;
    } else if (c == '(') {
      out.push_back({Tok::kLParen, "(", at});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::kRParen, ")", at});
      ++i;
    } else if (c == ';') {
      out.push_back({Tok::kSemicolon, ";", at});
      ++i;
    } else if (starts("\xe2\x88\xa7")) {
      out.push_back({Tok::kAndSym, "\xe2\x88\xa7", at});
      i += 3;
    } else if (starts("\xe2\x88\xa8")) {
      out.push_back({Tok::kOrSym, "\xe2\x88\xa8", at});
      i += 3;
    } else {
      throw ParseError("unexpected character '" + std::string(1, c) + "'", at);
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool IsKeyword(std::string_view ident) {
  static const std::set<std::string> kKeywords = {
      "SELECT", "FROM", "WHERE", "AND", "OR", "BLK_RANGE_COND",
      "SUM",    "COUNT", "AVG",  "MIN", "MAX"};
  return kKeywords.count(Upper(ident)) != 0;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Tokenize(text)) {}

  Query Parse() {
    Query q;
    ExpectKeyword("SELECT");
    q.aggregate = ParseAggregate();
    Expect(Tok::kLParen, "'('");
    q.agg_column = ExpectIdent("column name");
    Expect(Tok::kRParen, "')'");
    ExpectKeyword("FROM");
    const Timestamp t1 = ParseTime();
    Expect(Tok::kLt, "'<'");
    ExpectKeyword("BLK_RANGE_COND");
    Expect(Tok::kLt, "'<'");
    const Timestamp t2 = ParseTime();
    q.window.begin = t1.seconds;
    q.window.end = t2.date_only ? t2.seconds + 86400 : t2.seconds;
    ExpectKeyword("WHERE");
    q.condition = ParseCondition();
    if (Peek().kind == Tok::kSemicolon) Next();
    if (Peek().kind != Tok::kEnd) {
      throw ParseError("unexpected '" + Peek().text + "'", Peek().pos,
                       {"AND", "OR", "end of query"});
    }
    return q;
  }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& Next() {
    const Token& t = Peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void Unexpected(std::vector<std::string> expected) const {
    const Token& t = Peek();
    throw ParseError(
        t.kind == Tok::kEnd ? "unexpected end of query"
                            : "unexpected '" + t.text + "'",
        t.pos, std::move(expected));
  }

  bool AtKeyword(std::string_view kw) const {
    return Peek().kind == Tok::kIdent && Upper(Peek().text) == kw;
  }

  void ExpectKeyword(std::string_view kw) {
    if (!AtKeyword(kw)) Unexpected({std::string(kw)});
    Next();
  }

  void Expect(Tok kind, std::string what) {
    if (Peek().kind != kind) Unexpected({std::move(what)});
    Next();
  }

  std::string ExpectIdent(std::string what) {
    if (Peek().kind != Tok::kIdent || IsKeyword(Peek().text)) {
      Unexpected({std::move(what)});
    }
    return Next().text;
  }

  AggregateType ParseAggregate() {
    static const std::pair<const char*, AggregateType> kAggs[] = {
        {"SUM", AggregateType::kSum},
        {"COUNT", AggregateType::kCount},
        {"AVG", AggregateType::kAvg},
        {"MIN", AggregateType::kMin},
        {"MAX", AggregateType::kMax}};
    if (Peek().kind == Tok::kIdent) {
      const std::string up = Upper(Peek().text);
      for (const auto& [name, type] : kAggs) {
        if (up == name) {
          Next();
          return type;
        }
      }
    }
    Unexpected({"SUM", "COUNT", "AVG", "MIN", "MAX"});
  }

  Timestamp ParseTime() {
    const bool paren = Peek().kind == Tok::kLParen;
    if (paren) Next();
    const Token& t = Peek();
    if (t.kind != Tok::kNumber && t.kind != Tok::kStamp) {
      Unexpected({"timestamp"});
    }
    Timestamp ts;
    try {
      ts = ParseTimestamp(t.text);
    } catch (const InputError& e) {
      throw ParseError(e.what(), t.pos, {"D/MM/YYYY", "YYYY-MM-DD",
                                         "YYYY-MM-DDTHH:MM:SSZ",
                                         "unix seconds"});
    }
    Next();
    if (paren) Expect(Tok::kRParen, "')'");
    return ts;
  }

  std::uint64_t ParseNumber() {
    const Token& t = Peek();
    if (t.kind != Tok::kNumber) Unexpected({"number"});
    std::uint64_t v = 0;
    for (char c : t.text) {
      const std::uint64_t d = static_cast<std::uint64_t>(c - '0');
      if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) {
        throw ParseError("number out of range", t.pos);
      }
      v = v * 10 + d;
    }
    Next();
    return v;
  }

  Value ParseValue() {
    const Token& t = Peek();
    switch (t.kind) {
      case Tok::kNumber:
        return ParseNumber();
      case Tok::kString: {
        std::string s = t.text;
        Next();
        return s;
      }
      case Tok::kIdent:
        if (!IsKeyword(t.text)) {
          std::string s = t.text;
          Next();
          return s;
        }
        break;
      default:
        break;
    }
    Unexpected({"value"});
  }

  // Returns true for an inclusive comparison.
  bool ParseComparison() {
    if (Peek().kind == Tok::kLt) {
      Next();
      return false;
    }
    if (Peek().kind == Tok::kLe) {
      Next();
      return true;
    }
    Unexpected({"'<'", "'<='"});
  }

  struct Leaf {
    bool is_range = false;
    EqualsLeaf eq;
    RangeLeaf range;
  };

  Leaf ParseLeaf() {
    Leaf leaf;
    if (Peek().kind == Tok::kIdent && Peek(1).kind == Tok::kEq) {
      leaf.eq.column = ExpectIdent("column name");
      Next();
      leaf.eq.value = ParseValue();
      return leaf;
    }
    if (Peek().kind != Tok::kNumber) Unexpected({"column name", "number"});
    leaf.is_range = true;
    const std::size_t at = Peek().pos;
    std::uint64_t lo = ParseNumber();
    const bool lo_inclusive = ParseComparison();
    leaf.range.column = ExpectIdent("column name");
    const bool hi_inclusive = ParseComparison();
    std::uint64_t hi = ParseNumber();
    if (!lo_inclusive) {
      if (lo == std::numeric_limits<std::uint64_t>::max()) {
        throw ValidationError("empty range condition on " + leaf.range.column);
      }
      ++lo;
    }
    if (!hi_inclusive) {
      if (hi == 0) {
        throw ValidationError("empty range condition on " + leaf.range.column);
      }
      --hi;
    }
    if (lo > hi) {
      throw ValidationError("empty range condition on " + leaf.range.column +
                            " at position " + std::to_string(at));
    }
    leaf.range.lo = lo;
    leaf.range.hi = hi;
    return leaf;
  }

  Condition ParseCondition() {
    std::vector<Leaf> leaves{ParseLeaf()};
    bool saw_and = false, saw_or = false;
    for (;;) {
      if (AtKeyword("AND") || Peek().kind == Tok::kAndSym) {
        saw_and = true;
      } else if (AtKeyword("OR") || Peek().kind == Tok::kOrSym) {
        saw_or = true;
      } else {
        break;
      }
      Next();
      leaves.push_back(ParseLeaf());
    }
    const auto ranges = std::count_if(leaves.begin(), leaves.end(),
                                      [](const Leaf& l) { return l.is_range; });
    if (ranges > 1) {
      throw ValidationError(
          "more than one range condition; at most one is supported per query");
    }
    if (saw_and && saw_or) {
      throw ValidationError("mixing AND and OR in one condition is not supported");
    }
    Condition c;
    if (leaves.size() == 1) {
      if (leaves[0].is_range) {
        c.kind = ConditionKind::kRange;
        c.range = leaves[0].range;
      } else {
        c.kind = ConditionKind::kSingle;
        c.leaves.push_back(leaves[0].eq);
      }
      return c;
    }
    if (ranges > 0) {
      throw ValidationError(
          "range conditions cannot be combined with AND or OR");
    }
    c.kind = saw_and ? ConditionKind::kAnd : ConditionKind::kOr;
    for (auto& l : leaves) c.leaves.push_back(std::move(l.eq));
    return c;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string FormatValue(const Value& v) {
  if (const auto* n = std::get_if<std::uint64_t>(&v)) return std::to_string(*n);
  const auto& s = std::get<std::string>(v);
  if (s.find('\'') == std::string::npos) return "'" + s + "'";
  if (s.find('"') == std::string::npos) return "\"" + s + "\"";
  throw InputError("string value contains both quote characters");
}

std::string FormatHead(AggregateType agg, const std::string& column,
                       const TimeWindow& w) {
  return std::string("SELECT ") + AggregateName(agg) + "(" + column +
         ") FROM (" + FormatTimestamp(w.begin) + ") < blk_range_cond < (" +
         FormatTimestamp(w.end) + ") WHERE ";
}

}  // namespace

// ---------------------------------------------------------------------------
// Query

void ValidateQuery(const Query& q, const QueryLimits& limits) {
  if (q.agg_column.empty()) throw ValidationError("missing aggregate column");
  if (q.window.begin >= q.window.end) {
    throw ValidationError("block window is empty: t1 must precede t2");
  }
  if (limits.max_window_seconds > 0 &&
      q.window.end - q.window.begin > limits.max_window_seconds) {
    throw ValidationError("block window of " +
                          std::to_string(q.window.end - q.window.begin) +
                          " s exceeds the threshold of " +
                          std::to_string(limits.max_window_seconds) + " s");
  }
  const Condition& c = q.condition;
  switch (c.kind) {
    case ConditionKind::kSingle:
      if (c.leaves.size() != 1) throw ValidationError("single condition needs one leaf");
      break;
    case ConditionKind::kRange:
      if (c.range.lo > c.range.hi) {
        throw ValidationError("empty range condition on " + c.range.column);
      }
      if (!c.leaves.empty()) throw ValidationError("range condition has extra leaves");
      break;
    case ConditionKind::kAnd: {
      if (c.leaves.size() < 2) throw ValidationError("AND needs at least two leaves");
      std::set<std::string> columns;
      for (const auto& l : c.leaves) {
        if (!columns.insert(l.column).second) {
          throw ValidationError("AND repeats column " + l.column);
        }
      }
      break;
    }
    case ConditionKind::kOr: {
      if (c.leaves.size() < 2) throw ValidationError("OR needs at least two leaves");
      std::set<std::string> values;
      for (const auto& l : c.leaves) {
        if (l.column != c.leaves.front().column) {
          throw ValidationError("OR leaves must all test the same column");
        }
        if (!values.insert(ValueToString(l.value)).second) {
          throw ValidationError("OR values must be pairwise distinct");
        }
      }
      break;
    }
  }
}

Query ParseQuery(std::string_view text, const QueryLimits& limits) {
  Query q = Parser(text).Parse();
  ValidateQuery(q, limits);
  return q;
}

std::string FormatQuery(const Query& q) {
  std::string out = FormatHead(q.aggregate, q.agg_column, q.window);
  const Condition& c = q.condition;
  if (c.kind == ConditionKind::kRange) {
    return out + std::to_string(c.range.lo) + " <= " + c.range.column +
           " <= " + std::to_string(c.range.hi);
  }
  const char* sep = c.kind == ConditionKind::kOr ? " OR " : " AND ";
  for (std::size_t i = 0; i < c.leaves.size(); ++i) {
    if (i > 0) out += sep;
    out += c.leaves[i].column + " = " + FormatValue(c.leaves[i].value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PrivateQuery

std::vector<const PrivateLeaf*> PrivateQuery::SecretLeaves() const {
  std::vector<const PrivateLeaf*> out;
  for (const auto& l : leaves) {
    if (l.secret) out.push_back(&l);
  }
  return out;
}

std::string PrivateQuery::ToText() const {
  std::string out = FormatHead(aggregate, agg_column, window);
  if (kind == ConditionKind::kRange) {
    return out + "? <= " + leaves.front().column + " <= ?";
  }
  const char* sep = kind == ConditionKind::kOr ? " OR " : " AND ";
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (i > 0) out += sep;
    out += leaves[i].column + " = " +
           (leaves[i].secret ? std::string("?") : FormatValue(*leaves[i].value));
  }
  return out;
}

Bytes SerializePrivateQuery(const PrivateQuery& q) {
  ByteWriter w;
  w.U8(kPrivateQueryVersion);
  w.U8(static_cast<std::uint8_t>(q.aggregate));
  w.ShortString(q.agg_column);
  w.I64(q.window.begin);
  w.I64(q.window.end);
  w.U8(static_cast<std::uint8_t>(q.kind));
  if (q.leaves.size() > 255) throw InputError("too many condition leaves");
  w.U8(static_cast<std::uint8_t>(q.leaves.size()));
  for (const auto& l : q.leaves) {
    w.ShortString(l.column);
    w.U8(l.secret ? 1 : 0);
    w.U16(static_cast<std::uint16_t>(l.width));
    if (!l.secret) {
      if (const auto* n = std::get_if<std::uint64_t>(&*l.value)) {
        w.U8(0);
        w.U64(*n);
      } else {
        w.U8(1);
        w.ShortString(std::get<std::string>(*l.value));
      }
    }
  }
  w.U16(static_cast<std::uint16_t>(q.domain_bits));
  w.U16(static_cast<std::uint16_t>(q.result_bits));
  w.U32(q.avg_scale);
  return w.Take();
}

PrivateQuery DeserializePrivateQuery(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  PrivateQuery q;
  std::size_t at = r.offset();
  const std::uint8_t version = r.U8();
  if (version != kPrivateQueryVersion) {
    throw DecodeError("unsupported private query version: expected " +
                          std::to_string(kPrivateQueryVersion) + ", got " +
                          std::to_string(version),
                      at);
  }
  at = r.offset();
  const std::uint8_t agg = r.U8();
  if (agg < 1 || agg > 5) throw DecodeError("invalid aggregate type", at);
  q.aggregate = static_cast<AggregateType>(agg);
  q.agg_column = r.ShortString();
  q.window.begin = r.I64();
  q.window.end = r.I64();
  at = r.offset();
  const std::uint8_t kind = r.U8();
  if (kind < 1 || kind > 4) throw DecodeError("invalid condition kind", at);
  q.kind = static_cast<ConditionKind>(kind);
  at = r.offset();
  const unsigned count = r.U8();
  if (count == 0) throw DecodeError("condition without leaves", at);
  for (unsigned i = 0; i < count; ++i) {
    PrivateLeaf l;
    l.column = r.ShortString();
    at = r.offset();
    const std::uint8_t secret = r.U8();
    if (secret > 1) throw DecodeError("invalid secret flag", at);
    l.secret = secret == 1;
    l.width = r.U16();
    if (!l.secret) {
      at = r.offset();
      const std::uint8_t tag = r.U8();
      if (tag == 0) {
        l.value = Value(r.U64());
      } else if (tag == 1) {
        l.value = Value(r.ShortString());
      } else {
        throw DecodeError("invalid literal tag", at);
      }
    }
    q.leaves.push_back(std::move(l));
  }
  q.domain_bits = r.U16();
  q.result_bits = r.U16();
  q.avg_scale = r.U32();
  r.ExpectEnd("private query");
  return q;
}

namespace {

bool IsNumericAggregate(AggregateType t) { return t != AggregateType::kCount; }

void CheckAggregateColumn(AggregateType agg, const std::string& column,
                          const Schema& schema) {
  auto idx = schema.Find(column);
  if (!idx) throw ValidationError("unknown aggregate column " + column);
  if (IsNumericAggregate(agg) &&
      schema.columns()[*idx].kind != ColumnKind::kNumeric) {
    throw ValidationError(std::string(AggregateName(agg)) +
                          " needs a numeric column, " + column +
                          " holds strings");
  }
}

void CheckOutputShape(unsigned result_bits, std::uint32_t avg_scale) {
  if (result_bits < 1 || result_bits > 64) {
    throw ValidationError("result width must be 1..64 bits, got " +
                          std::to_string(result_bits));
  }
  if (avg_scale == 0) throw ValidationError("AVG scale must be positive");
}

}  // namespace

DerivedQuery DerivePrivateQuery(const Query& q,
                                std::span<const std::string> secret_columns,
                                const Schema& schema,
                                const PrivateQueryOptions& options) {
  ValidateQuery(q, QueryLimits{.max_window_seconds = 0});
  CheckOutputShape(options.result_bits, options.avg_scale);
  CheckAggregateColumn(q.aggregate, q.agg_column, schema);
  if (secret_columns.empty()) {
    throw ValidationError("at least one condition column must be secret");
  }
  const Condition& c = q.condition;
  std::set<std::string> condition_columns;
  if (c.kind == ConditionKind::kRange) {
    condition_columns.insert(c.range.column);
  } else {
    for (const auto& l : c.leaves) condition_columns.insert(l.column);
  }
  std::set<std::string> secrets;
  for (const auto& s : secret_columns) {
    if (!condition_columns.count(s)) {
      throw ValidationError(s + " is not a condition column of the query");
    }
    secrets.insert(s);
  }
  auto column = [&](const std::string& name) -> const ColumnSpec& {
    auto idx = schema.Find(name);
    if (!idx) throw ValidationError("unknown condition column " + name);
    return schema.columns()[*idx];
  };

  DerivedQuery out;
  PrivateQuery& pq = out.private_query;
  SecretSpec& spec = out.secrets;
  pq.aggregate = q.aggregate;
  pq.agg_column = q.agg_column;
  pq.window = q.window;
  pq.kind = c.kind;
  pq.result_bits = options.result_bits;
  pq.avg_scale = options.avg_scale;
  spec.kind = c.kind;

  if (c.kind == ConditionKind::kRange) {
    const ColumnSpec& col = column(c.range.column);
    if (col.kind != ColumnKind::kNumeric) {
      throw ValidationError("range condition needs a numeric column, " +
                            col.name + " holds strings");
    }
    pq.leaves.push_back({col.name, true, std::nullopt, col.bits});
    spec.range_lo = EncodeConditionValue(col, Value(c.range.lo));
    spec.range_hi = EncodeConditionValue(col, Value(c.range.hi));
    spec.domain_bits = col.bits;
    pq.domain_bits = col.bits;
    return out;
  }

  std::vector<BitString> secret_bits;
  for (const auto& leaf : c.leaves) {
    const ColumnSpec& col = column(leaf.column);
    const bool secret = secrets.count(leaf.column) != 0;
    const BitString encoded = EncodeConditionValue(col, leaf.value);
    if (secret) {
      pq.leaves.push_back({col.name, true, std::nullopt, encoded.width});
      secret_bits.push_back(encoded);
      spec.elided.push_back(leaf);
    } else {
      pq.leaves.push_back({col.name, false, leaf.value, encoded.width});
    }
  }
  if (c.kind == ConditionKind::kOr) {
    spec.points = secret_bits;
    spec.domain_bits = secret_bits.front().width;
  } else {
    const BitString key = Concat(secret_bits);
    spec.points = {key};
    spec.domain_bits = key.width;
  }
  pq.domain_bits = spec.domain_bits;
  if (pq.domain_bits > 128) {
    throw ValidationError("secret condition key exceeds 128 bits");
  }
  return out;
}

void CheckPrivateQuery(const PrivateQuery& q, const Schema& schema) {
  if (q.window.begin >= q.window.end) {
    throw ValidationError("block window is empty");
  }
  CheckOutputShape(q.result_bits, q.avg_scale);
  CheckAggregateColumn(q.aggregate, q.agg_column, schema);
  unsigned secret_width = 0;
  std::size_t secret_count = 0;
  std::set<std::string> columns;
  for (const auto& l : q.leaves) {
    auto idx = schema.Find(l.column);
    if (!idx) throw ValidationError("unknown condition column " + l.column);
    const ColumnSpec& col = schema.columns()[*idx];
    if (col.bits != l.width) {
      throw ValidationError("width of column " + l.column + " is " +
                            std::to_string(col.bits) + " bits, query says " +
                            std::to_string(l.width));
    }
    if (l.secret) {
      secret_width += l.width;
      ++secret_count;
      if (l.value) throw ValidationError("secret leaf carries a value");
    } else if (!l.value) {
      throw ValidationError("plaintext leaf without a value");
    } else {
      try {
        EncodeConditionValue(col, *l.value);
      } catch (const InputError& e) {
        throw ValidationError(e.what());
      }
    }
    columns.insert(l.column);
  }
  if (secret_count == 0) throw ValidationError("no secret condition leaf");
  switch (q.kind) {
    case ConditionKind::kSingle:
      if (q.leaves.size() != 1) throw ValidationError("single condition needs one leaf");
      break;
    case ConditionKind::kRange:
      if (q.leaves.size() != 1) throw ValidationError("range condition needs one leaf");
      if (schema.Column(q.leaves[0].column).kind != ColumnKind::kNumeric) {
        throw ValidationError("range condition on a string column");
      }
      break;
    case ConditionKind::kAnd:
      if (q.leaves.size() < 2 || columns.size() != q.leaves.size()) {
        throw ValidationError("AND needs two or more distinct columns");
      }
      break;
    case ConditionKind::kOr:
      if (q.leaves.size() < 2 || columns.size() != 1 ||
          secret_count != q.leaves.size()) {
        throw ValidationError("OR needs two or more secret leaves on one column");
      }
      secret_width = q.leaves.front().width;
      break;
  }
  if (secret_width != q.domain_bits) {
    throw ValidationError("domain width " + std::to_string(q.domain_bits) +
                          " disagrees with secret columns (" +
                          std::to_string(secret_width) + " bits)");
  }
}

}  // namespace piqlb::query
