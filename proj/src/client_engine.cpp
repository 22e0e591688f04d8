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


#include "piqlb/client_engine.hpp"

#include <set>

#include "piqlb/error.hpp"

namespace piqlb::client {

using query::ConditionKind;

fss::SecretFunction MakeSecretFunction(const query::SecretSpec& spec,
                                       const GroupElement& y) {
  switch (spec.kind) {
    case ConditionKind::kSingle:
    case ConditionKind::kAnd:
      return fss::SecretFunction::Point(spec.domain_bits, spec.points.at(0).bits, y);
    case ConditionKind::kRange:
      return fss::SecretFunction::Interval(spec.domain_bits, spec.range_lo.bits,
                                           spec.range_hi.bits, y);
    case ConditionKind::kOr: {
      std::vector<fss::SecretFunction> parts;
      for (const auto& p : spec.points) {
        parts.push_back(fss::SecretFunction::Point(spec.domain_bits, p.bits, y));
      }
      return fss::SecretFunction::Sum(parts);
    }
  }
  throw InputError("unknown condition kind");
}

QuerySession Gen(const query::Query& q, std::span<const std::string> secrets,
                 const Schema& schema, const SessionOptions& options,
                 RandomSource& rng) {
  if (options.parties < 2) throw ConfigError("need at least two parties");
  const Group group(options.lambda_bits);
  query::DerivedQuery derived = query::DerivePrivateQuery(
      q, secrets, schema,
      {.result_bits = options.result_bits, .avg_scale = options.avg_scale});
  const GroupElement y(group.RandomNonZero(rng), group);
  fss::SecretFunction f = MakeSecretFunction(derived.secrets, y);
  std::vector<fss::FunctionShare> shares = fss::Gen(
      f, {.backend = options.backend, .party_count = options.parties}, rng);
  return QuerySession(q, std::move(derived), std::move(f), std::move(shares));
}

u128 DecodeBits(std::span<const bool> bits) {
  u128 v = 0;
  for (std::size_t k = bits.size(); k-- > 0;) v = (v << 1) | (bits[k] ? 1 : 0);
  return v;
}

double DecodeResult(std::span<const bool> bits, query::AggregateType agg,
                    std::uint32_t scale) {
  const auto raw = static_cast<double>(DecodeBits(bits));
  if (agg == query::AggregateType::kAvg && scale > 1) return raw / scale;
  return raw;
}

std::string QueryResult::ToString() const {
  if (status == Status::kAbort) {
    return "ABORT at bit " + std::to_string(abort_position) + " (sum " +
           U128ToString(observed) + " is neither 0 nor y)";
  }
  std::string out = "VALUE " + U128ToString(raw);
  if (zero_or_absent) out += " (zero or absent)";
  return out;
}

QueryResult Verif(const QuerySession& session,
                  std::span<const sp::ShareOutput> outputs) {
  const unsigned p = session.parties();
  const unsigned l = session.private_query().result_bits;
  const Group group = session.y().group();
  if (outputs.size() != p) {
    throw ProtocolError("expected " + std::to_string(p) + " outputs, got " +
                        std::to_string(outputs.size()));
  }
  std::set<unsigned> parties;
  for (const auto& o : outputs) {
    if (o.party_index < 1 || o.party_index > p || !parties.insert(o.party_index).second) {
      throw ProtocolError("party index " + std::to_string(o.party_index) +
                          " missing, duplicated or out of range");
    }
    if (o.values.size() != l) {
      throw ProtocolError("party " + std::to_string(o.party_index) + " returned " +
                          std::to_string(o.values.size()) + " values, expected " +
                          std::to_string(l));
    }
    if (o.lambda_bits != group.bits()) {
      throw ProtocolError("party " + std::to_string(o.party_index) +
                          " answered in the wrong group");
    }
    for (const auto& v : o.values) {
      if (v.group() != group) {
        throw ProtocolError("party " + std::to_string(o.party_index) +
                            " answered in the wrong group");
      }
    }
  }

  QueryResult result;
  bool bits[64] = {};
  const u128 y = session.y().value();
  for (unsigned k = 0; k < l; ++k) {
    u128 temp = 0;
    for (const auto& o : outputs) temp += o.values[k].value();
    temp = group.Reduce(temp);
    if (temp == y) {
      bits[k] = true;
    } else if (temp != 0) {
      result.status = QueryResult::Status::kAbort;
      result.abort_position = k;
      result.observed = temp;
      return result;
    }
  }
  const std::span<const bool> verified(bits, l);
  result.raw = DecodeBits(verified);
  result.value = DecodeResult(verified,
                              session.private_query().aggregate,
                              session.private_query().avg_scale);
  result.zero_or_absent = result.raw == 0;
  return result;
}

}  // namespace piqlb::client
