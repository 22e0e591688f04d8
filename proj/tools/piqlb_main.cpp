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


// piqlb: data generation, service providers, private queries and benchmarks.
//
// Exit codes: 0 success, 1 runtime failure (I/O, integrity), 2 ABORT,
// 3 protocol error, 4 usage error (flags, query text, configuration).

#include <csignal>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "piqlb/bench_harness.hpp"
#include "piqlb/client_engine.hpp"
#include "piqlb/datagen.hpp"
#include "piqlb/error.hpp"
#include "piqlb/ledger.hpp"
#include "piqlb/oracle.hpp"
#include "piqlb/transport.hpp"

namespace {

using namespace piqlb;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitAbort = 2;
constexpr int kExitProtocol = 3;
constexpr int kExitUsage = 4;

fss::Backend ParseBackend(const std::string& name) {
  if (name == "tree") return fss::Backend::kTree;
  if (name == "naive") return fss::Backend::kNaive;
  throw ConfigError("backend must be 'tree' or 'naive'");
}

query::QueryLimits Limits(std::int64_t window_days) {
  return {.max_window_seconds = window_days * 86400};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A schema JSON file, or any ledger file (its schema is used).
Schema LoadSchemaFrom(const std::string& path) {
  const std::string text = ReadFile(path);
  if (text.rfind("PQLB", 0) == 0 || text.rfind("{\"schema\"", 0) == 0) {
    return LoadLedger(path).schema();
  }
  return Schema::FromJson(text);
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
  std::string preset = "random";
  std::size_t records = 64;
  std::uint64_t seed = 1;
  std::size_t block_size = kDefaultBlockSize;
  std::string out;
  std::string format;
  std::string schema;
};

int RunGenData(const GenDataArgs& a) {
  SeededRandom rng(a.seed);
  Ledger ledger;
  datagen::RandomLedgerOptions opts{.records = a.records, .block_size = a.block_size};
  if (a.preset == "paper-fixture") {
    ledger = datagen::PaperFixture();
  } else if (a.preset == "random") {
    ledger = a.schema.empty() ? datagen::RandomLedger(opts, rng)
                              : datagen::RandomLedger(LoadSchemaFrom(a.schema), opts, rng);
  } else if (a.preset == "bench") {
    opts.min_step = opts.max_step = 1;
    ledger = datagen::RandomLedger(opts, rng);
  } else {
    throw ConfigError("unknown preset '" + a.preset + "'");
  }
  std::string format = a.format;
  if (format.empty()) {
    format = a.out.size() >= 6 && a.out.ends_with(".jsonl") ? "jsonl" : "binary";
  }
  if (format == "jsonl") {
    std::ofstream out(a.out);
    if (!out) throw InputError("cannot write " + a.out);
    WriteJsonl(out, ledger);
  } else if (format == "binary") {
    SaveLedger(a.out, ledger);
  } else {
    throw ConfigError("format must be 'jsonl' or 'binary'");
  }
  std::cout << "wrote " << ledger.record_count() << " records in " << ledger.size()
            << " blocks to " << a.out << " (" << format << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ServeArgs {
  std::string ledger;
  std::string listen = "127.0.0.1:7001";
  std::string fault = "honest";
  std::size_t max_blocks = sp::SpLimits{}.max_blocks;
};

int RunServe(const ServeArgs& a) {
  // Port 0 is allowed here (ephemeral), unlike in provider address lists.
  const std::size_t colon = a.listen.rfind(':');
  unsigned long port = 0;
  try {
    if (colon == std::string::npos || colon + 1 == a.listen.size()) throw std::exception();
    std::size_t used = 0;
    port = std::stoul(a.listen.substr(colon + 1), &used);
    if (used != a.listen.size() - colon - 1 || port > 65535) throw std::exception();
  } catch (const std::exception&) {
    throw ConfigError("--listen takes host:port, got '" + a.listen + "'");
  }
  const std::string host = a.listen.substr(0, colon);
  // Block the stop signals before any thread starts so sigwait receives them.
  sigset_t stop;
  sigemptyset(&stop);
  sigaddset(&stop, SIGINT);
  sigaddset(&stop, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop, nullptr);

  auto service = std::make_shared<transport::SpService>(
      LoadLedger(a.ledger), transport::FaultPolicy::Parse(a.fault),
      sp::SpLimits{.max_blocks = a.max_blocks});
  transport::TcpServer server(service, host, static_cast<std::uint16_t>(port));
  std::cout << "listening on " << host << ":" << server.port() << " with "
            << service->ledger().record_count() << " records, fault "
            << service->fault().ToString() << std::endl;
  int sig = 0;
  sigwait(&stop, &sig);
  server.Stop();
  std::cout << "stopped after " << service->requests_served() << " requests\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct QueryArgs {
  std::string text;
  std::vector<std::string> secrets;
  std::vector<std::string> sps;
  std::string local;
  std::string schema;
  std::string fault = "honest";
  unsigned parties = 2;
  unsigned lambda = kDefaultLambdaBits;
  unsigned l = query::kDefaultResultBits;
  std::string backend = "tree";
  std::uint32_t avg_scale = 1;
  std::int64_t window_days = 31;
  unsigned timeout_ms = 30000;
  unsigned retries = 1;
  std::optional<std::uint64_t> seed;
  bool show_envelopes = false;
};

int RunQuery(const QueryArgs& a) {
  const query::Query q = query::ParseQuery(a.text, Limits(a.window_days));

  std::vector<std::unique_ptr<transport::Endpoint>> endpoints;
  std::optional<Schema> schema;
  if (!a.local.empty()) {
    if (!a.sps.empty()) throw ConfigError("--local and --sp are exclusive");
    Ledger ledger = LoadLedger(a.local);
    schema = ledger.schema();
    for (unsigned i = 0; i < a.parties; ++i) {
      const bool faulty = i + 1 == a.parties;
      auto svc = std::make_shared<transport::SpService>(
          ledger,
          faulty ? transport::FaultPolicy::Parse(a.fault) : transport::FaultPolicy{});
      endpoints.push_back(
          std::make_unique<transport::LocalEndpoint>(svc, "sp" + std::to_string(i + 1)));
    }
  } else {
    if (a.fault != "honest") throw ConfigError("--fault needs --local");
    std::vector<std::pair<std::string, std::uint16_t>> addrs;
    for (const auto& s : a.sps) {
      for (auto& addr : transport::ParseAddressList(s)) addrs.push_back(std::move(addr));
    }
    if (addrs.empty()) addrs = transport::AddressesFromEnv();
    if (addrs.empty()) throw ConfigError("no service providers: use --sp, --local or PIQLB_SP_ADDRS");
    if (a.schema.empty()) throw ConfigError("--schema is required with remote providers");
    schema = LoadSchemaFrom(a.schema);
    for (auto& [host, port] : addrs) {
      endpoints.push_back(std::make_unique<transport::TcpEndpoint>(host, port));
    }
  }

  const client::SessionOptions options{.lambda_bits = a.lambda,
                                       .parties = static_cast<unsigned>(endpoints.size()),
                                       .backend = ParseBackend(a.backend),
                                       .result_bits = a.l,
                                       .avg_scale = a.avg_scale};
  std::unique_ptr<RandomSource> rng;
  if (a.seed) {
    rng = std::make_unique<SeededRandom>(*a.seed);
  } else {
    rng = std::make_unique<SystemRandom>();
  }
  const auto session = client::Gen(q, a.secrets, *schema, options, *rng);
  std::cout << "query:   " << query::FormatQuery(q) << "\n"
            << "sent q': " << session.private_query().ToText() << "\n";
  if (a.show_envelopes) {
    const transport::RequestId id{};
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
      std::cout << "request " << endpoints[i]->name() << ": "
                << transport::RequestToJson(transport::BuildRequest(session, i, id)) << "\n";
    }
  }

  std::vector<transport::Endpoint*> raw;
  for (const auto& e : endpoints) raw.push_back(e.get());
  const auto report = transport::ClientExecute(
      raw, session,
      {.timeout = std::chrono::milliseconds(a.timeout_ms), .retries = a.retries});

  std::cout << report.result.ToString() << "\n";
  std::cout << "latency: " << std::fixed << std::setprecision(3) << report.seconds * 1e3
            << " ms\n";
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    std::cout << endpoints[i]->name() << ": sent " << report.request_bytes[i]
              << " bytes, received " << report.response_bytes[i] << " bytes\n";
  }
  return report.result.ok() ? kExitOk : kExitAbort;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string ledger;
  std::string text;
  std::uint32_t avg_scale = 1;
  std::int64_t window_days = 0;
};

int RunOracle(const OracleArgs& a) {
  const Ledger ledger = LoadLedger(a.ledger);
  const query::Query q = query::ParseQuery(a.text, Limits(a.window_days));
  const OracleResult r = EvaluatePlain(ledger, q, a.avg_scale);
  std::cout << "VALUE " << U128ToString(r.value);
  if (r.zero_or_absent) std::cout << " (zero or no match)";
  std::cout << "\nmatched " << r.records << " records, " << r.rows << " table rows\n";
  return kExitOk;
}

int RunVerify(const std::string& path) {
  const Ledger ledger = LoadLedger(path);
  std::cout << "ok: " << ledger.size() << " blocks, " << ledger.record_count()
            << " records\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string scenario;
  std::vector<std::size_t> records;
  std::vector<unsigned> l;
  std::optional<unsigned> lambda;
  std::optional<unsigned> parties;
  std::string backend;
  std::optional<unsigned> reps;
  std::vector<std::string> faults;
  bool tcp = false;
  std::optional<std::uint64_t> seed;
  std::string csv;
  bool strict = false;
};

int RunBenchCommand(const BenchArgs& a) {
  bench::BenchScenario s;
  if (!a.scenario.empty()) s = bench::BenchScenario::FromJson(ReadFile(a.scenario));
  if (!a.records.empty()) s.records = a.records;
  if (!a.l.empty()) s.result_bits = a.l;
  if (a.lambda) s.lambda_bits = *a.lambda;
  if (a.parties) s.parties = *a.parties;
  if (!a.backend.empty()) s.backend = ParseBackend(a.backend);
  if (a.reps) s.repetitions = *a.reps;
  if (!a.faults.empty()) s.faults = a.faults;
  if (a.tcp) s.tcp = true;
  if (a.seed) s.seed = *a.seed;
  s.Validate();

  const auto rows = bench::RunBench(s, &std::cerr);
  if (a.csv.empty() || a.csv == "-") {
    bench::WriteCsv(std::cout, rows);
  } else {
    std::ofstream out(a.csv);
    if (!out) throw InputError("cannot write " + a.csv);
    bench::WriteCsv(out, rows);
  }
  const auto check = bench::CheckBench(rows);
  std::cerr << "check: response bytes constant in N: "
            << (check.constant_response ? "yes" : "no") << "\n"
            << "check: request bytes constant in N: "
            << (check.constant_request ? "yes" : "no") << "\n"
            << "check: eval time within 2x of a linear fit in N*l: "
            << (check.linear ? "yes" : "no") << "\n";
  for (const auto& note : check.notes) std::cerr << "  " << note << "\n";
  return a.strict && !check.ok() ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------

int RunDemo(std::uint64_t seed) {
  const Ledger ledger = datagen::PaperFixture();
  SeededRandom rng(seed);
  struct Item {
    const char* text;
    const char* secret;
    std::uint32_t scale;
  };
  const Item items[] = {
      {"SELECT SUM(Price) FROM 1/06/2022 < blk_range_cond < 4/06/2022 WHERE Item = 2",
       "Item", 1},
      {"SELECT COUNT(Item) FROM 1/06/2022 < blk_range_cond < 4/06/2022 WHERE 4 < Price < 10",
       "Price", 1},
      {"SELECT AVG(Price) FROM 1/06/2022 < blk_range_cond < 4/06/2022 WHERE Item = 2",
       "Item", 100},
      {"SELECT MAX(Price) FROM 1/06/2022 < blk_range_cond < 4/06/2022 WHERE Item = 2 AND "
       "Color = \"red\"",
       "Item", 1},
      {"SELECT MIN(Price) FROM 1/06/2022 < blk_range_cond < 4/06/2022 WHERE 2 <= Item <= 5",
       "Item", 1},
  };
  auto run = [&](const Item& item, const transport::FaultPolicy& fault) {
    const query::Query q = query::ParseQuery(item.text);
    std::vector<std::unique_ptr<transport::Endpoint>> owned;
    std::vector<transport::Endpoint*> raw;
    for (int i = 0; i < 2; ++i) {
      auto svc = std::make_shared<transport::SpService>(
          ledger, i == 1 ? fault : transport::FaultPolicy{});
      owned.push_back(
          std::make_unique<transport::LocalEndpoint>(svc, "sp" + std::to_string(i + 1)));
      raw.push_back(owned.back().get());
    }
    const std::vector<std::string> secrets = {item.secret};
    const auto session = client::Gen(q, secrets, ledger.schema(),
                                     {.avg_scale = item.scale}, rng);
    const auto report = transport::ClientExecute(raw, session);
    const auto expected = EvaluatePlain(ledger, q, item.scale);
    std::cout << query::FormatQuery(q) << "\n  secret " << item.secret << ", SP2 "
              << fault.ToString() << ": " << report.result.ToString()
              << " (plaintext answer " << U128ToString(expected.value);
    if (item.scale != 1) std::cout << " at scale " << item.scale;
    std::cout << ", " << expected.rows << " table rows)\n";
    if (expected.rows > 1) {
      std::cout << "  a range matching several table rows cannot be verified\n";
    }
  };
  std::cout << "ledger: " << ledger.record_count() << " records in " << ledger.size()
            << " blocks\n\n";
  for (const auto& item : items) run(item, transport::FaultPolicy::Honest());
  std::cout << "\nfaulty second provider:\n";
  run(items[0], transport::FaultPolicy::AddDelta(0, 1));
  run(items[0], transport::FaultPolicy::TamperLedger(0, 1));
  run(items[0], transport::FaultPolicy::RandomOutput());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piqlb: private, verifiable aggregate queries over a hash-chained ledger"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "write a ledger file");
  gen_cmd->add_option("--preset", gen.preset, "paper-fixture | random | bench")
      ->check(CLI::IsMember({"paper-fixture", "random", "bench"}));
  gen_cmd->add_option("--records,-n", gen.records, "number of records");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--block-size", gen.block_size, "records per block");
  gen_cmd->add_option("--schema", gen.schema, "schema JSON for the random preset");
  gen_cmd->add_option("--format", gen.format, "jsonl | binary (default from extension)");
  gen_cmd->add_option("--out,-o", gen.out, "output path")->required();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve-sp", "run a service provider over TCP");
  serve_cmd->add_option("--ledger", serve.ledger, "ledger file")->required();
  serve_cmd->add_option("--listen", serve.listen, "host:port (port 0 picks one)");
  serve_cmd->add_option("--fault", serve.fault,
                        "honest | add-delta[:bit[:delta]] | random-output | "
                        "tamper-ledger[:record[:column[:value]]] | wrong-query");
  serve_cmd->add_option("--max-blocks", serve.max_blocks, "largest accepted window");

  QueryArgs qa;
  std::uint64_t query_seed = 0;
  auto* query_cmd = app.add_subcommand("query", "run a private query");
  query_cmd->add_option("--query,-q", qa.text, "query text")->required();
  query_cmd->add_option("--secret,-s", qa.secrets, "column to keep private")->required();
  query_cmd->add_option("--sp", qa.sps, "provider host:port (repeatable)");
  query_cmd->add_option("--local", qa.local, "run providers in-process on this ledger");
  query_cmd->add_option("--schema", qa.schema, "schema or ledger file (remote providers)");
  query_cmd->add_option("--fault", qa.fault, "fault for the last in-process provider");
  query_cmd->add_option("--parties,-p", qa.parties, "in-process provider count");
  query_cmd->add_option("--lambda", qa.lambda, "group bits");
  query_cmd->add_option("--l", qa.l, "result bits");
  query_cmd->add_option("--backend", qa.backend, "tree | naive");
  query_cmd->add_option("--avg-scale", qa.avg_scale, "fixed-point scale for AVG");
  query_cmd->add_option("--max-window-days", qa.window_days, "0 disables the cap");
  query_cmd->add_option("--timeout-ms", qa.timeout_ms, "per-provider timeout");
  query_cmd->add_option("--retries", qa.retries, "retries per provider");
  auto* seed_opt = query_cmd->add_option("--seed", query_seed, "deterministic keys (testing)");
  query_cmd->add_flag("--show-envelopes", qa.show_envelopes, "print requests as JSON");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "plaintext answer for a query");
  oracle_cmd->add_option("--ledger", oracle.ledger, "ledger file")->required();
  oracle_cmd->add_option("--query,-q", oracle.text, "query text")->required();
  oracle_cmd->add_option("--avg-scale", oracle.avg_scale, "fixed-point scale for AVG");
  oracle_cmd->add_option("--max-window-days", oracle.window_days, "0 disables the cap");

  std::string verify_path;
  auto* verify_cmd = app.add_subcommand("verify", "check a ledger's hash chain");
  verify_cmd->add_option("ledger", verify_path, "ledger file")->required();

  BenchArgs ba;
  unsigned bench_lambda = 0, bench_parties = 0, bench_reps = 0;
  std::uint64_t bench_seed = 0;
  auto* bench_cmd = app.add_subcommand("bench", "timing and bandwidth as N grows, as CSV");
  bench_cmd->add_option("--scenario", ba.scenario, "scenario JSON file");
  bench_cmd->add_option("--records,-n", ba.records, "ledger sizes")->delimiter(',');
  bench_cmd->add_option("--l", ba.l, "result bit widths")->delimiter(',');
  auto* bl = bench_cmd->add_option("--lambda", bench_lambda, "group bits");
  auto* bp = bench_cmd->add_option("--parties,-p", bench_parties, "providers");
  bench_cmd->add_option("--backend", ba.backend, "tree | naive");
  auto* br = bench_cmd->add_option("--reps", bench_reps, "repetitions (at least 3)");
  bench_cmd->add_option("--fault", ba.faults, "fault on the last provider")->delimiter(',');
  bench_cmd->add_flag("--tcp", ba.tcp, "use loopback TCP providers");
  auto* bs = bench_cmd->add_option("--seed", bench_seed, "seed");
  bench_cmd->add_option("--csv", ba.csv, "output file (default stdout)");
  bench_cmd->add_flag("--strict", ba.strict, "exit 1 when the companion check fails");

  std::uint64_t demo_seed = 1;
  auto* demo_cmd = app.add_subcommand("demo", "the five example queries on the fixture");
  demo_cmd->add_option("--seed", demo_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return RunGenData(gen);
    if (*serve_cmd) return RunServe(serve);
    if (*query_cmd) {
      if (*seed_opt) qa.seed = query_seed;
      return RunQuery(qa);
    }
    if (*oracle_cmd) return RunOracle(oracle);
    if (*verify_cmd) return RunVerify(verify_path);
    if (*bench_cmd) {
      if (*bl) ba.lambda = bench_lambda;
      if (*bp) ba.parties = bench_parties;
      if (*br) ba.reps = bench_reps;
      if (*bs) ba.seed = bench_seed;
      return RunBenchCommand(ba);
    }
    if (*demo_cmd) return RunDemo(demo_seed);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: invalid query: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
