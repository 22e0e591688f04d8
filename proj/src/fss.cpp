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

#include "piqlb/fss.hpp"

#include <algorithm>

#include "piqlb/error.hpp"
#include "piqlb/prg.hpp"

namespace piqlb::fss {

const char* BackendName(Backend b) {
  switch (b) {
    case Backend::kNaive:
      return "naive";
    case Backend::kTree:
      return "tree";
  }
  return "unknown";
}

namespace {

void CheckDomainBits(unsigned domain_bits) {
  if (domain_bits < 1 || domain_bits > kMaxDomainBits) {
    throw InputError("domain must be between 1 and 128 bits, got " +
                     std::to_string(domain_bits));
  }
}

bool FitsDomain(u128 x, unsigned domain_bits) {
  return (x & ~LowMask(domain_bits)) == 0;
}

u128 TermLo(const Term& t) {
  return std::visit(
      [](const auto& v) -> u128 {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, PointTerm>) {
          return v.point;
        } else {
          return v.lo;
        }
      },
      t);
}

u128 TermHi(const Term& t) {
  return std::visit(
      [](const auto& v) -> u128 {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, PointTerm>) {
          return v.point;
        } else {
          return v.hi;
        }
      },
      t);
}

}  // namespace

// ---------------------------------------------------------------------------
// SecretFunction

SecretFunction SecretFunction::Point(unsigned domain_bits, u128 point,
                                     GroupElement y) {
  CheckDomainBits(domain_bits);
  if (!FitsDomain(point, domain_bits)) {
    throw InputError("point does not fit in " + std::to_string(domain_bits) +
                     " bits");
  }
  return SecretFunction(domain_bits, y, {PointTerm{point}});
}

SecretFunction SecretFunction::Interval(unsigned domain_bits, u128 lo, u128 hi,
                                        GroupElement y) {
  CheckDomainBits(domain_bits);
  if (lo > hi) throw InputError("interval lower bound exceeds upper bound");
  if (!FitsDomain(hi, domain_bits)) {
    throw InputError("interval does not fit in " +
                     std::to_string(domain_bits) + " bits");
  }
  return SecretFunction(domain_bits, y, {IntervalTerm{lo, hi}});
}

SecretFunction SecretFunction::Sum(std::span<const SecretFunction> parts) {
  if (parts.empty()) throw InputError("sum of zero functions");
  const unsigned n = parts.front().domain_bits();
  const GroupElement y = parts.front().y();
  std::vector<Term> terms;
  for (const auto& p : parts) {
    if (p.domain_bits() != n) {
      throw InputError("summed functions must share the input domain");
    }
    if (!(p.y() == y)) {
      throw InputError("summed functions must share the output element");
    }
    terms.insert(terms.end(), p.terms().begin(), p.terms().end());
  }
  std::vector<Term> sorted = terms;
  std::sort(sorted.begin(), sorted.end(), [](const Term& a, const Term& b) {
    return TermLo(a) < TermLo(b);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (TermLo(sorted[i]) <= TermHi(sorted[i - 1])) {
      throw InputError("summed functions must have disjoint supports");
    }
  }
  return SecretFunction(n, y, std::move(terms));
}

FunctionKind SecretFunction::kind() const {
  if (terms_.size() > 1) return FunctionKind::kSum;
  return std::holds_alternative<PointTerm>(terms_.front())
             ? FunctionKind::kPoint
             : FunctionKind::kInterval;
}

GroupElement SecretFunction::operator()(u128 x) const {
  for (const auto& t : terms_) {
    if (TermLo(t) <= x && x <= TermHi(t)) return y_;
  }
  return GroupElement(0, y_.group());
}

// ---------------------------------------------------------------------------
// Tree keys

namespace tree {
namespace {

bool InputBit(u128 x, unsigned domain_bits, unsigned level) {
  return ((x >> (domain_bits - 1 - level)) & 1) != 0;
}

}  // namespace

std::pair<TreeKey, TreeKey> GenPoint(unsigned domain_bits, u128 alpha,
                                     u128 beta, const Group& group,
                                     RandomSource& rng) {
  TreeKey k0, k1;
  u128 s0 = rng.NextU128() & prg::kSeedMask;
  u128 s1 = rng.NextU128() & prg::kSeedMask;
  bool t0 = false, t1 = true;
  k0.root_seed = s0;
  k1.root_seed = s1;
  k0.levels.reserve(domain_bits);
  for (unsigned i = 0; i < domain_bits; ++i) {
    const bool a = InputBit(alpha, domain_bits, i);
    const prg::Child c0[2] = {prg::ExpandChild(s0, false),
                              prg::ExpandChild(s0, true)};
    const prg::Child c1[2] = {prg::ExpandChild(s1, false),
                              prg::ExpandChild(s1, true)};
    const int keep = a ? 1 : 0;
    const int lose = 1 - keep;

    CorrectionWord cw;
    cw.seed = c0[lose].seed ^ c1[lose].seed;
    cw.control_left = c0[0].control ^ c1[0].control ^ a ^ true;
    cw.control_right = c0[1].control ^ c1[1].control ^ a;
    const bool keep_cw = a ? cw.control_right : cw.control_left;

    s0 = c0[keep].seed ^ (t0 ? cw.seed : 0);
    s1 = c1[keep].seed ^ (t1 ? cw.seed : 0);
    t0 = c0[keep].control ^ (t0 && keep_cw);
    t1 = c1[keep].control ^ (t1 && keep_cw);
    k0.levels.push_back(cw);
  }
  u128 fin = beta - (prg::Convert(s0) & group.mask()) +
             (prg::Convert(s1) & group.mask());
  if (t1) fin = ~fin + 1;
  k0.final_word = group.Reduce(fin);
  k1.levels = k0.levels;
  k1.final_word = k0.final_word;
  return {std::move(k0), std::move(k1)};
}

u128 EvalPoint(const TreeKey& key, bool party, unsigned domain_bits, u128 x,
               const Group& group) {
  u128 s = key.root_seed;
  bool t = party;
  for (unsigned i = 0; i < domain_bits; ++i) {
    const bool bit = InputBit(x, domain_bits, i);
    prg::Child c = prg::ExpandChild(s, bit);
    if (t) {
      const CorrectionWord& cw = key.levels[i];
      c.seed ^= cw.seed;
      c.control ^= bit ? cw.control_right : cw.control_left;
    }
    s = c.seed;
    t = c.control;
  }
  u128 out = prg::Convert(s) + (t ? key.final_word : 0);
  if (party) out = ~out + 1;
  return group.Reduce(out);
}

std::pair<TreeKey, TreeKey> GenLessThan(unsigned domain_bits, u128 alpha,
                                        u128 beta, const Group& group,
                                        RandomSource& rng) {
  const u128 mask = group.mask();
  TreeKey k0, k1;
  u128 s0 = rng.NextU128() & prg::kSeedMask;
  u128 s1 = rng.NextU128() & prg::kSeedMask;
  bool t0 = false, t1 = true;
  u128 v_alpha = 0;
  k0.root_seed = s0;
  k1.root_seed = s1;
  k0.levels.reserve(domain_bits);
  for (unsigned i = 0; i < domain_bits; ++i) {
    const bool a = InputBit(alpha, domain_bits, i);
    const prg::Child c0[2] = {prg::ExpandChild(s0, false),
                              prg::ExpandChild(s0, true)};
    const prg::Child c1[2] = {prg::ExpandChild(s1, false),
                              prg::ExpandChild(s1, true)};
    const u128 v0[2] = {prg::ExpandValue(s0, false) & mask,
                        prg::ExpandValue(s0, true) & mask};
    const u128 v1[2] = {prg::ExpandValue(s1, false) & mask,
                        prg::ExpandValue(s1, true) & mask};
    const int keep = a ? 1 : 0;
    const int lose = 1 - keep;
    auto signed_by_t1 = [&](u128 v) { return t1 ? ~v + 1 : v; };

    CorrectionWord cw;
    cw.seed = c0[lose].seed ^ c1[lose].seed;
    u128 vcw = signed_by_t1(v1[lose] - v0[lose] - v_alpha);
    // Losing the left branch means x went below alpha at this level.
    if (lose == 0) vcw += signed_by_t1(beta);
    cw.value = vcw & mask;
    v_alpha = (v_alpha - v1[keep] + v0[keep] + signed_by_t1(cw.value)) & mask;
    cw.control_left = c0[0].control ^ c1[0].control ^ a ^ true;
    cw.control_right = c0[1].control ^ c1[1].control ^ a;
    const bool keep_cw = a ? cw.control_right : cw.control_left;

    s0 = c0[keep].seed ^ (t0 ? cw.seed : 0);
    s1 = c1[keep].seed ^ (t1 ? cw.seed : 0);
    t0 = c0[keep].control ^ (t0 && keep_cw);
    t1 = c1[keep].control ^ (t1 && keep_cw);
    k0.levels.push_back(cw);
  }
  u128 fin = (prg::Convert(s1) & mask) - (prg::Convert(s0) & mask) - v_alpha;
  if (t1) fin = ~fin + 1;
  k0.final_word = group.Reduce(fin);
  k1.levels = k0.levels;
  k1.final_word = k0.final_word;
  return {std::move(k0), std::move(k1)};
}

u128 EvalLessThan(const TreeKey& key, bool party, unsigned domain_bits, u128 x,
                  const Group& group) {
  const u128 mask = group.mask();
  u128 s = key.root_seed;
  bool t = party;
  u128 acc = 0;
  for (unsigned i = 0; i < domain_bits; ++i) {
    const bool bit = InputBit(x, domain_bits, i);
    const CorrectionWord& cw = key.levels[i];
    prg::Child c = prg::ExpandChild(s, bit);
    acc += (prg::ExpandValue(s, bit) & mask) + (t ? cw.value : 0);
    if (t) {
      c.seed ^= cw.seed;
      c.control ^= bit ? cw.control_right : cw.control_left;
    }
    s = c.seed;
    t = c.control;
  }
  acc += (prg::Convert(s) & mask) + (t ? key.final_word : 0);
  if (party) acc = ~acc + 1;
  return group.Reduce(acc);
}

}  // namespace tree

// ---------------------------------------------------------------------------
// FunctionShare

FunctionShare::FunctionShare(unsigned party_index, Backend backend,
                             FunctionKind kind, unsigned domain_bits,
                             unsigned lambda_bits, SharePayload payload)
    : party_index_(party_index),
      backend_(backend),
      kind_(kind),
      domain_bits_(domain_bits),
      lambda_bits_(lambda_bits),
      payload_(std::move(payload)) {}

u128 FunctionShare::EvalRaw(u128 x) const {
  const Group g(lambda_bits_);
  const bool party = party_index_ == 2;
  if (const auto* table = std::get_if<NaiveTable>(&payload_)) {
    return table->entries[static_cast<std::size_t>(x)];
  }
  if (const auto* key = std::get_if<TreeKey>(&payload_)) {
    return tree::EvalPoint(*key, party, domain_bits_, x, g);
  }
  if (const auto* key = std::get_if<TreeIntervalKey>(&payload_)) {
    u128 upper = key->upper_is_constant
                     ? key->upper_constant
                     : tree::EvalLessThan(key->upper, party, domain_bits_, x, g);
    u128 lower = tree::EvalLessThan(key->lower, party, domain_bits_, x, g);
    return g.Reduce(upper - lower);
  }
  const auto& sum = std::get<SumShare>(payload_);
  u128 acc = 0;
  for (const auto& part : sum.parts) acc += part.EvalRaw(x);
  return g.Reduce(acc);
}

GroupElement FunctionShare::Eval(u128 x) const {
  if (!FitsDomain(x, domain_bits_)) {
    throw InputError("input does not fit in the share's " +
                     std::to_string(domain_bits_) + "-bit domain");
  }
  return GroupElement(EvalRaw(x), Group(lambda_bits_));
}

GroupElement Eval(const FunctionShare& share, u128 x) { return share.Eval(x); }

bool operator==(const FunctionShare& a, const FunctionShare& b) {
  return SerializeShare(a) == SerializeShare(b);
}

// ---------------------------------------------------------------------------
// Gen

namespace {

std::vector<FunctionShare> GenNaive(const SecretFunction& f,
                                    const GenOptions& opts,
                                    RandomSource& rng) {
  const unsigned n = f.domain_bits();
  const Group g = f.y().group();
  const std::size_t size = std::size_t{1} << n;
  std::vector<NaiveTable> tables(opts.party_count);
  NaiveTable& last = tables.back();
  last.entries.resize(size);
  for (std::size_t x = 0; x < size; ++x) last.entries[x] = f(x).value();
  for (unsigned p = 0; p + 1 < opts.party_count; ++p) {
    tables[p].entries.resize(size);
    for (std::size_t x = 0; x < size; ++x) {
      const u128 r = g.Random(rng);
      tables[p].entries[x] = r;
      last.entries[x] = g.Reduce(last.entries[x] - r);
    }
  }
  std::vector<FunctionShare> out;
  out.reserve(opts.party_count);
  for (unsigned p = 0; p < opts.party_count; ++p) {
    out.emplace_back(p + 1, Backend::kNaive, f.kind(), n, g.bits(),
                     std::move(tables[p]));
  }
  return out;
}

std::vector<FunctionShare> GenTreeTerm(const Term& term, unsigned n,
                                       const GroupElement& y,
                                       RandomSource& rng) {
  const Group g = y.group();
  const u128 beta = y.value();
  std::vector<FunctionShare> out;
  if (const auto* point = std::get_if<PointTerm>(&term)) {
    auto [k0, k1] = tree::GenPoint(n, point->point, beta, g, rng);
    out.emplace_back(1, Backend::kTree, FunctionKind::kPoint, n, g.bits(),
                     std::move(k0));
    out.emplace_back(2, Backend::kTree, FunctionKind::kPoint, n, g.bits(),
                     std::move(k1));
    return out;
  }
  const auto& interval = std::get<IntervalTerm>(term);
  TreeIntervalKey k0, k1;
  if (interval.hi == LowMask(n)) {
    k0.upper_is_constant = k1.upper_is_constant = true;
    k0.upper_constant = g.Random(rng);
    k1.upper_constant = g.Reduce(beta - k0.upper_constant);
  } else {
    std::tie(k0.upper, k1.upper) =
        tree::GenLessThan(n, interval.hi + 1, beta, g, rng);
  }
  std::tie(k0.lower, k1.lower) =
      tree::GenLessThan(n, interval.lo, beta, g, rng);
  out.emplace_back(1, Backend::kTree, FunctionKind::kInterval, n, g.bits(),
                   std::move(k0));
  out.emplace_back(2, Backend::kTree, FunctionKind::kInterval, n, g.bits(),
                   std::move(k1));
  return out;
}

}  // namespace

std::vector<FunctionShare> Gen(const SecretFunction& f, const GenOptions& opts,
                               RandomSource& rng) {
  if (opts.party_count < 2 || opts.party_count > 255) {
    throw ConfigError("party count must be between 2 and 255, got " +
                      std::to_string(opts.party_count));
  }
  const unsigned n = f.domain_bits();
  if (opts.backend == Backend::kTree) {
    if (opts.party_count != 2) {
      throw UnsupportedError("tree backend supports exactly 2 parties, got " +
                             std::to_string(opts.party_count));
    }
    if (f.terms().size() == 1) {
      return GenTreeTerm(f.terms().front(), n, f.y(), rng);
    }
    std::vector<SumShare> sums(2);
    for (const auto& term : f.terms()) {
      auto parts = GenTreeTerm(term, n, f.y(), rng);
      sums[0].parts.push_back(std::move(parts[0]));
      sums[1].parts.push_back(std::move(parts[1]));
    }
    std::vector<FunctionShare> out;
    out.emplace_back(1, Backend::kTree, FunctionKind::kSum, n,
                     f.y().lambda_bits(), std::move(sums[0]));
    out.emplace_back(2, Backend::kTree, FunctionKind::kSum, n,
                     f.y().lambda_bits(), std::move(sums[1]));
    return out;
  }

  const unsigned cap = std::min(opts.naive_max_domain_bits, kNaiveMaxDomainBits);
  if (n > cap) {
    throw ResourceError("naive backend domain of " + std::to_string(n) +
                        " bits exceeds the cap of " + std::to_string(cap));
  }
  if (f.terms().size() == 1) return GenNaive(f, opts, rng);
  std::vector<SumShare> sums(opts.party_count);
  for (const auto& term : f.terms()) {
    const SecretFunction sub =
        std::holds_alternative<PointTerm>(term)
            ? SecretFunction::Point(n, std::get<PointTerm>(term).point, f.y())
            : SecretFunction::Interval(n, std::get<IntervalTerm>(term).lo,
                                       std::get<IntervalTerm>(term).hi, f.y());
    auto parts = GenNaive(sub, opts, rng);
    for (unsigned p = 0; p < opts.party_count; ++p) {
      sums[p].parts.push_back(std::move(parts[p]));
    }
  }
  std::vector<FunctionShare> out;
  for (unsigned p = 0; p < opts.party_count; ++p) {
    out.emplace_back(p + 1, Backend::kNaive, FunctionKind::kSum, n,
                     f.y().lambda_bits(), std::move(sums[p]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
//
//   u8  version            (kShareFormatVersion)
//   u8  backend            1 = naive, 2 = tree
//   u8  kind               1 = point, 2 = interval, 3 = sum
//   u8  party_index
//   u16 lambda_bits
//   u16 domain_bits
//   payload:
//     naive point/interval: 2^n elements of ceil(lambda/8) bytes
//     tree point:           tree key (no per-level values)
//     tree interval:        u8 upper_is_constant, upper constant element or
//                           comparison key, lower comparison key
//     sum:                  u16 count, count x (u32 length, nested share)
//   tree key: 16-byte root seed, n x (16-byte seed, [element], u8 control
//             flags bit0=left bit1=right), final element

namespace {

void WriteTreeKey(ByteWriter& w, const TreeKey& key, bool with_values,
                  std::size_t width) {
  w.Uint(key.root_seed, 16);
  for (const auto& cw : key.levels) {
    w.Uint(cw.seed, 16);
    if (with_values) w.Uint(cw.value, width);
    w.U8(static_cast<std::uint8_t>((cw.control_left ? 1 : 0) |
                                   (cw.control_right ? 2 : 0)));
  }
  w.Uint(key.final_word, width);
}

u128 ReadElement(ByteReader& r, const Group& g) {
  const std::size_t at = r.offset();
  u128 v = r.Uint(g.byte_width());
  if (v != g.Reduce(v)) {
    throw DecodeError("group element has bits above lambda", at);
  }
  return v;
}

TreeKey ReadTreeKey(ByteReader& r, unsigned domain_bits, bool with_values,
                    const Group& g) {
  TreeKey key;
  key.root_seed = r.Uint(16);
  const std::size_t per_level = 17 + (with_values ? g.byte_width() : 0);
  if (r.remaining() / per_level < domain_bits) {
    r.Fail("truncated tree key");
  }
  key.levels.resize(domain_bits);
  for (auto& cw : key.levels) {
    cw.seed = r.Uint(16);
    if (with_values) cw.value = ReadElement(r, g);
    const std::size_t at = r.offset();
    const std::uint8_t flags = r.U8();
    if (flags > 3) throw DecodeError("invalid control flags", at);
    cw.control_left = (flags & 1) != 0;
    cw.control_right = (flags & 2) != 0;
  }
  key.final_word = ReadElement(r, g);
  return key;
}

void WriteShare(ByteWriter& w, const FunctionShare& share) {
  const Group g = share.group();
  const std::size_t width = g.byte_width();
  w.U8(kShareFormatVersion);
  w.U8(static_cast<std::uint8_t>(share.backend()));
  w.U8(static_cast<std::uint8_t>(share.kind()));
  w.U8(static_cast<std::uint8_t>(share.party_index()));
  w.U16(static_cast<std::uint16_t>(share.lambda_bits()));
  w.U16(static_cast<std::uint16_t>(share.domain_bits()));
  std::visit(
      [&](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, NaiveTable>) {
          for (u128 e : payload.entries) w.Uint(e, width);
        } else if constexpr (std::is_same_v<T, TreeKey>) {
          WriteTreeKey(w, payload, false, width);
        } else if constexpr (std::is_same_v<T, TreeIntervalKey>) {
          w.U8(payload.upper_is_constant ? 1 : 0);
          if (payload.upper_is_constant) {
            w.Uint(payload.upper_constant, width);
          } else {
            WriteTreeKey(w, payload.upper, true, width);
          }
          WriteTreeKey(w, payload.lower, true, width);
        } else {
          w.U16(static_cast<std::uint16_t>(payload.parts.size()));
          for (const auto& part : payload.parts) {
            ByteWriter nested;
            WriteShare(nested, part);
            w.Blob(nested.bytes());
          }
        }
      },
      share.payload());
}

FunctionShare ReadShare(ByteReader& r, bool nested) {
  const std::size_t version_at = r.offset();
  const std::uint8_t version = r.U8();
  if (version != kShareFormatVersion) {
    throw DecodeError("unsupported share format version: expected " +
                          std::to_string(kShareFormatVersion) + ", got " +
                          std::to_string(version),
                      version_at);
  }
  const std::size_t backend_at = r.offset();
  const std::uint8_t backend_tag = r.U8();
  if (backend_tag != 1 && backend_tag != 2) {
    throw DecodeError("unknown backend tag " + std::to_string(backend_tag),
                      backend_at);
  }
  const auto backend = static_cast<Backend>(backend_tag);
  const std::size_t kind_at = r.offset();
  const std::uint8_t kind_tag = r.U8();
  if (kind_tag < 1 || kind_tag > 3 || (nested && kind_tag == 3)) {
    throw DecodeError("invalid function kind " + std::to_string(kind_tag),
                      kind_at);
  }
  const auto kind = static_cast<FunctionKind>(kind_tag);
  const std::size_t party_at = r.offset();
  const unsigned party = r.U8();
  if (party == 0 || (backend == Backend::kTree && party > 2)) {
    throw DecodeError("invalid party index " + std::to_string(party),
                      party_at);
  }
  const std::size_t lambda_at = r.offset();
  const unsigned lambda = r.U16();
  if (lambda < kMinLambdaBits || lambda > kMaxLambdaBits) {
    throw DecodeError("invalid lambda " + std::to_string(lambda), lambda_at);
  }
  const std::size_t domain_at = r.offset();
  const unsigned domain = r.U16();
  if (domain < 1 || domain > kMaxDomainBits) {
    throw DecodeError("invalid domain size " + std::to_string(domain),
                      domain_at);
  }
  const Group g(lambda);

  if (kind == FunctionKind::kSum) {
    const std::size_t count_at = r.offset();
    const unsigned count = r.U16();
    if (count == 0) throw DecodeError("empty sum share", count_at);
    SumShare sum;
    for (unsigned i = 0; i < count; ++i) {
      const std::size_t part_at = r.offset();
      ByteReader inner(r.Blob());
      FunctionShare part = [&] {
        try {
          FunctionShare s = ReadShare(inner, true);
          inner.ExpectEnd("nested share");
          return s;
        } catch (const DecodeError& e) {
          throw DecodeError(std::string("in sum part: ") + e.what(),
                            part_at + 4 + e.offset());
        }
      }();
      if (part.backend() != backend || part.party_index() != party ||
          part.lambda_bits() != lambda || part.domain_bits() != domain) {
        throw DecodeError("sum part header disagrees with outer share",
                          part_at);
      }
      sum.parts.push_back(std::move(part));
    }
    return FunctionShare(party, backend, kind, domain, lambda, std::move(sum));
  }

  if (backend == Backend::kNaive) {
    if (domain > kNaiveMaxDomainBits) {
      throw DecodeError("naive share domain too large", domain_at);
    }
    const std::size_t size = std::size_t{1} << domain;
    if (r.remaining() / g.byte_width() < size) r.Fail("truncated truth table");
    NaiveTable table;
    table.entries.resize(size);
    for (auto& e : table.entries) e = ReadElement(r, g);
    return FunctionShare(party, backend, kind, domain, lambda,
                         std::move(table));
  }
  if (kind == FunctionKind::kPoint) {
    return FunctionShare(party, backend, kind, domain, lambda,
                         ReadTreeKey(r, domain, false, g));
  }
  TreeIntervalKey key;
  const std::size_t mode_at = r.offset();
  const std::uint8_t mode = r.U8();
  if (mode > 1) throw DecodeError("invalid interval upper mode", mode_at);
  key.upper_is_constant = mode == 1;
  if (key.upper_is_constant) {
    key.upper_constant = ReadElement(r, g);
  } else {
    key.upper = ReadTreeKey(r, domain, true, g);
  }
  key.lower = ReadTreeKey(r, domain, true, g);
  return FunctionShare(party, backend, kind, domain, lambda, std::move(key));
}

}  // namespace

Bytes SerializeShare(const FunctionShare& share) {
  ByteWriter w;
  WriteShare(w, share);
  return w.Take();
}

FunctionShare DeserializeShare(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  FunctionShare share = ReadShare(r, false);
  r.ExpectEnd("function share");
  return share;
}

}  // namespace piqlb::fss
