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


// Client side of the protocol: building the secret function and its shares
// (Gen) and checking the providers' answers bit by bit (Verif).

#ifndef PIQLB_CLIENT_ENGINE_HPP_
#define PIQLB_CLIENT_ENGINE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "piqlb/fss.hpp"
#include "piqlb/group.hpp"
#include "piqlb/query.hpp"
#include "piqlb/random.hpp"
#include "piqlb/sp_engine.hpp"

namespace piqlb::client {

struct SessionOptions {
  unsigned lambda_bits = kDefaultLambdaBits;
  unsigned parties = 2;
  fss::Backend backend = fss::Backend::kTree;
  unsigned result_bits = query::kDefaultResultBits;
  std::uint32_t avg_scale = 1;
};

class QuerySession {
 public:
  const query::Query& query() const { return query_; }
  const query::PrivateQuery& private_query() const { return private_query_; }
  const query::SecretSpec& secrets() const { return secrets_; }
  const fss::SecretFunction& function() const { return function_; }
  const GroupElement& y() const { return y_; }
  const std::vector<fss::FunctionShare>& shares() const { return shares_; }
  unsigned parties() const { return static_cast<unsigned>(shares_.size()); }

 private:
  friend QuerySession Gen(const query::Query&, std::span<const std::string>,
                          const Schema&, const SessionOptions&, RandomSource&);
  QuerySession(query::Query q, query::DerivedQuery d, fss::SecretFunction f,
               std::vector<fss::FunctionShare> shares)
      : query_(std::move(q)),
        private_query_(std::move(d.private_query)),
        secrets_(std::move(d.secrets)),
        function_(std::move(f)),
        y_(function_.y()),
        shares_(std::move(shares)) {}

  query::Query query_;
  query::PrivateQuery private_query_;
  query::SecretSpec secrets_;
  fss::SecretFunction function_;
  GroupElement y_;
  std::vector<fss::FunctionShare> shares_;
};

// The secret function for a derived query: a point for SINGLE and AND, an
// interval for RANGE, a sum of points for OR.
fss::SecretFunction MakeSecretFunction(const query::SecretSpec& spec,
                                       const GroupElement& y);

// y is drawn uniformly from the nonzero elements of Z_{2^lambda}.
QuerySession Gen(const query::Query& q, std::span<const std::string> secrets,
                 const Schema& schema, const SessionOptions& options,
                 RandomSource& rng);

struct QueryResult {
  enum class Status { kValue, kAbort };
  Status status = Status::kValue;
  // kValue
  u128 raw = 0;  // decoded l-bit integer; AVG keeps the fixed-point scale
  double value = 0;
  bool zero_or_absent = false;
  // kAbort
  unsigned abort_position = 0;
  u128 observed = 0;  // the offending reconstructed sum

  bool ok() const { return status == Status::kValue; }
  std::string ToString() const;
};

// Throws ProtocolError when the outputs do not have the expected shape
// (count, length, group, party indices). Tampering yields an ABORT result.
QueryResult Verif(const QuerySession& session,
                  std::span<const sp::ShareOutput> outputs);

// LSB-first bits to an integer.
u128 DecodeBits(std::span<const bool> bits);
// AVG divides by the fixed-point scale; other aggregates are returned as-is.
double DecodeResult(std::span<const bool> bits, query::AggregateType agg,
                    std::uint32_t scale);

}  // namespace piqlb::client

#endif  // PIQLB_CLIENT_ENGINE_HPP_
