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


#include "piqlb/bench_harness.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <ostream>
#include <tuple>

#include "json.hpp"
#include "piqlb/client_engine.hpp"
#include "piqlb/datagen.hpp"
#include "piqlb/error.hpp"
#include "piqlb/transport.hpp"

namespace piqlb::bench {

void BenchScenario::Validate() const {
  if (records.empty()) throw ConfigError("scenario needs at least one record count");
  if (result_bits.empty()) throw ConfigError("scenario needs at least one l");
  for (unsigned l : result_bits) {
    if (l < 1 || l > 64) throw ConfigError("l must be 1..64");
  }
  if (repetitions < 3) throw ConfigError("repetitions must be at least 3");
  if (parties < 2) throw ConfigError("parties must be at least 2");
  if (lambda_bits < 1 || lambda_bits > 128) throw ConfigError("lambda must be 1..128");
  if (faults.empty()) throw ConfigError("scenario needs at least one fault mode");
  for (const auto& f : faults) transport::FaultPolicy::Parse(f);
}

BenchScenario BenchScenario::FromJson(std::string_view text) {
  BenchScenario s;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    for (const auto& [key, _] : j.items()) {
      static const char* kKeys[] = {"records", "l", "lambda", "parties", "backend",
                                    "repetitions", "faults", "tcp", "seed"};
      if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
        throw ConfigError("unknown scenario key '" + key + "'");
      }
    }
    if (j.contains("records")) s.records = j["records"].get<std::vector<std::size_t>>();
    if (j.contains("l")) s.result_bits = j["l"].get<std::vector<unsigned>>();
    s.lambda_bits = j.value("lambda", s.lambda_bits);
    s.parties = j.value("parties", s.parties);
    const std::string backend = j.value("backend", std::string("tree"));
    if (backend == "tree") {
      s.backend = fss::Backend::kTree;
    } else if (backend == "naive") {
      s.backend = fss::Backend::kNaive;
    } else {
      throw ConfigError("backend must be 'tree' or 'naive'");
    }
    s.repetitions = j.value("repetitions", s.repetitions);
    if (j.contains("faults")) s.faults = j["faults"].get<std::vector<std::string>>();
    s.tcp = j.value("tcp", s.tcp);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  s.Validate();
  return s;
}

std::string BenchScenario::ToJson() const {
  return nlohmann::json{{"records", records},
                        {"l", result_bits},
                        {"lambda", lambda_bits},
                        {"parties", parties},
                        {"backend", backend == fss::Backend::kTree ? "tree" : "naive"},
                        {"repetitions", repetitions},
                        {"faults", faults},
                        {"tcp", tcp},
                        {"seed", seed}}
      .dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

struct Providers {
  std::vector<std::shared_ptr<transport::SpService>> services;
  std::vector<std::unique_ptr<transport::TcpServer>> servers;
  std::vector<std::unique_ptr<transport::Endpoint>> endpoints;

  std::vector<transport::Endpoint*> Raw() const {
    std::vector<transport::Endpoint*> out;
    for (const auto& e : endpoints) out.push_back(e.get());
    return out;
  }
};

Providers StartProviders(const Ledger& ledger, const BenchScenario& s,
                         const transport::FaultPolicy& fault) {
  Providers p;
  const sp::SpLimits unlimited{.max_blocks = ~std::size_t{0}};
  for (unsigned i = 0; i < s.parties; ++i) {
    const bool faulty = i + 1 == s.parties;
    auto svc = std::make_shared<transport::SpService>(
        ledger, faulty ? fault : transport::FaultPolicy::Honest(), unlimited);
    p.services.push_back(svc);
    if (s.tcp) {
      auto server = std::make_unique<transport::TcpServer>(svc, "127.0.0.1", 0);
      p.endpoints.push_back(
          std::make_unique<transport::TcpEndpoint>("127.0.0.1", server->port()));
      p.servers.push_back(std::move(server));
    } else {
      p.endpoints.push_back(std::make_unique<transport::LocalEndpoint>(
          svc, "sp" + std::to_string(i + 1)));
    }
  }
  return p;
}

}  // namespace

std::vector<BenchRow> RunBench(const BenchScenario& scenario, std::ostream* progress) {
  scenario.Validate();
  std::vector<BenchRow> rows;
  SeededRandom rng(scenario.seed);
  for (std::size_t n : scenario.records) {
    const Ledger ledger = datagen::RandomLedger(
        {.records = n, .block_size = kDefaultBlockSize, .min_step = 1, .max_step = 1},
        rng);
    const std::int64_t begin = ledger.size() ? ledger.blocks().front().timestamp : 0;
    const std::int64_t end = ledger.size() ? ledger.blocks().back().timestamp + 1 : 1;
    const std::uint64_t serial = n > 0 ? 1 + rng.Uniform(n) : 1;
    const query::Query q = query::ParseQuery(
        "SELECT SUM(Price) FROM " + std::to_string(begin) + " < blk_range_cond < " +
            std::to_string(end) + " WHERE Serial = " + std::to_string(serial),
        {.max_window_seconds = 0});
    const std::vector<std::string> secrets = {"Serial"};
    for (const auto& fault_text : scenario.faults) {
      const auto fault = transport::FaultPolicy::Parse(fault_text);
      Providers providers = StartProviders(ledger, scenario, fault);
      const auto endpoints = providers.Raw();
      for (unsigned l : scenario.result_bits) {
        const client::SessionOptions options{.lambda_bits = scenario.lambda_bits,
                                             .parties = scenario.parties,
                                             .backend = scenario.backend,
                                             .result_bits = l};
        BenchRow row;
        row.records = n;
        row.result_bits = l;
        row.lambda_bits = scenario.lambda_bits;
        row.parties = scenario.parties;
        row.backend = fss::BackendName(scenario.backend);
        row.fault = fault.ToString();
        std::vector<double> evals, latencies;
        for (unsigned rep = 0; rep < scenario.repetitions; ++rep) {
          const auto session = client::Gen(q, secrets, ledger.schema(), options, rng);
          const auto t0 = Clock::now();
          sp::Eval(session.shares()[0], ledger, session.private_query(),
                   {.max_blocks = ~std::size_t{0}});
          evals.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
          const auto report = transport::ClientExecute(endpoints, session);
          latencies.push_back(report.seconds);
          row.request_bytes = report.request_bytes[0];
          row.response_bytes = report.response_bytes[0];
          row.outcome = report.result.ok() ? "VALUE " + U128ToString(report.result.raw)
                                           : "ABORT";
        }
        row.eval_seconds = Median(evals);
        row.latency_seconds = Median(latencies);
        if (progress != nullptr) {
          *progress << "N=" << n << " l=" << l << " fault=" << row.fault
                    << " eval=" << row.eval_seconds << "s " << row.outcome << "\n";
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void WriteCsv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "records,l,lambda,parties,backend,fault,eval_seconds,latency_seconds,"
         "request_bytes,response_bytes,outcome\n";
  for (const auto& r : rows) {
    out << r.records << ',' << r.result_bits << ',' << r.lambda_bits << ','
        << r.parties << ',' << r.backend << ',' << r.fault << ',' << r.eval_seconds
        << ',' << r.latency_seconds << ',' << r.request_bytes << ','
        << r.response_bytes << ',' << r.outcome << '\n';
  }
}

BenchCheck CheckBench(const std::vector<BenchRow>& rows) {
  BenchCheck check;
  // Byte counts may depend on (l, lambda, parties, backend) but not on N.
  using Key = std::tuple<unsigned, unsigned, unsigned, std::string>;
  std::map<Key, std::pair<std::size_t, std::size_t>> bytes;
  for (const auto& r : rows) {
    const Key key{r.result_bits, r.lambda_bits, r.parties, r.backend};
    auto [it, fresh] = bytes.emplace(key, std::make_pair(r.request_bytes, r.response_bytes));
    if (fresh) continue;
    if (it->second.second != r.response_bytes) {
      check.constant_response = false;
      check.notes.push_back("response bytes vary with N at l=" +
                            std::to_string(r.result_bits));
    }
    if (it->second.first != r.request_bytes) {
      check.constant_request = false;
      check.notes.push_back("request bytes vary with N at l=" +
                            std::to_string(r.result_bits));
    }
  }
  // Least-squares fit t = a + b * (N * l) over honest rows.
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.fault == "honest") {
      pts.emplace_back(static_cast<double>(r.records) * r.result_bits, r.eval_seconds);
    }
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double den = n * sxx - sx * sx;
    const double b = den != 0 ? (n * sxy - sx * sy) / den : 0;
    const double a = (sy - b * sx) / n;
    for (auto [x, y] : pts) {
      const double fit = a + b * x;
      if (fit <= 0 || y > 2 * fit || y < fit / 2) {
        check.linear = false;
        check.notes.push_back("eval time " + std::to_string(y) + "s at N*l=" +
                              std::to_string(static_cast<long long>(x)) +
                              " is outside 2x of the fit " + std::to_string(fit) + "s");
      }
    }
  }
  return check;
}

}  // namespace piqlb::bench
