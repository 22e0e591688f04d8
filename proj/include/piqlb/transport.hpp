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


// Wire protocol between the client and the service providers.
//
// Frames are a 4-byte little-endian length followed by an envelope. All
// integers in envelopes are little-endian.
//
// Request (type 1):
//   u8 version | u8 type | u8[16] request_id | u16 lambda_bits | u16 l |
//   u32 len | private query | u32 len | function share
// Response (type 2):
//   u8 version | u8 type | u8[16] request_id | u8 party_index | u16 status |
//   status 0: u16 lambda_bits | u16 l | l values of ceil(lambda/8) bytes
//   otherwise: u16 len | message
//
// An OK response is therefore 25 + l * ceil(lambda/8) bytes regardless of the
// ledger behind it.

#ifndef PIQLB_TRANSPORT_HPP_
#define PIQLB_TRANSPORT_HPP_

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "piqlb/bytes.hpp"
#include "piqlb/client_engine.hpp"
#include "piqlb/ledger.hpp"
#include "piqlb/query.hpp"
#include "piqlb/sp_engine.hpp"

namespace piqlb::transport {

inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::uint32_t kMaxFrameBytes = 64u << 20;

using RequestId = std::array<std::uint8_t, 16>;

enum class MessageType : std::uint8_t { kRequest = 1, kResponse = 2 };

enum class Status : std::uint16_t {
  kOk = 0,
  kDecode = 1,
  kVersion = 2,
  kValidation = 3,
  kEval = 4,
  kResource = 5,
  kUnsupported = 6,
  kInternal = 7,
};

const char* StatusName(Status s);

struct Request {
  std::uint8_t version = kWireVersion;
  RequestId request_id{};
  std::uint16_t lambda_bits = 0;
  std::uint16_t l = 0;
  Bytes private_query;
  Bytes share;

  friend bool operator==(const Request&, const Request&) = default;
};

struct Response {
  std::uint8_t version = kWireVersion;
  RequestId request_id{};
  std::uint8_t party_index = 0;
  Status status = Status::kOk;
  std::string message;  // errors only
  std::uint16_t lambda_bits = 0;
  std::vector<u128> values;

  friend bool operator==(const Response&, const Response&) = default;
};

Bytes EncodeRequest(const Request& r);
Request DecodeRequest(std::span<const std::uint8_t> bytes);
Bytes EncodeResponse(const Response& r);
Response DecodeResponse(std::span<const std::uint8_t> bytes);

// Debug rendering; the binary form is normative.
std::string RequestToJson(const Request& r);
std::string ResponseToJson(const Response& r);

Bytes Frame(std::span<const std::uint8_t> envelope);

// ---------------------------------------------------------------------------
// Fault injection

struct FaultPolicy {
  enum class Mode { kHonest, kAddDelta, kRandomOutput, kTamperLedger, kWrongQuery };

  Mode mode = Mode::kHonest;
  // kAddDelta
  unsigned bit = 0;
  u128 delta = 1;
  // kTamperLedger: record_index counts records across blocks in height order.
  // Without a new value the lowest bit of a numeric cell is flipped (a string
  // cell gets a '*' appended).
  std::size_t record_index = 0;
  std::size_t column = 0;
  std::optional<Value> new_value;
  // kWrongQuery: evaluated instead of the received q'. When empty the SP
  // answers COUNT instead of the requested aggregate (or, for COUNT, widens
  // the window to the whole ledger).
  std::optional<query::PrivateQuery> substitute;

  static FaultPolicy Honest() { return {}; }
  static FaultPolicy AddDelta(unsigned bit, u128 delta);
  static FaultPolicy RandomOutput();
  static FaultPolicy TamperLedger(std::size_t record, std::size_t column,
                                  std::optional<Value> v = std::nullopt);
  static FaultPolicy WrongQuery(std::optional<query::PrivateQuery> q = std::nullopt);

  // "honest", "add-delta[:bit[:delta]]", "random-output",
  // "tamper-ledger[:record[:column[:value]]]", "wrong-query".
  static FaultPolicy Parse(std::string_view text);
  std::string ToString() const;
};

// One service provider: owns a ledger replica and turns request envelopes
// into response envelopes.
class SpService {
 public:
  // Verifies the ledger, then applies a TAMPER_LEDGER fault to the replica.
  SpService(Ledger ledger, FaultPolicy fault = {}, sp::SpLimits limits = {});

  // Never throws; every failure becomes an error response.
  Bytes Handle(std::span<const std::uint8_t> envelope) const;

  const Ledger& ledger() const { return ledger_; }
  const FaultPolicy& fault() const { return fault_; }
  std::uint64_t requests_served() const { return served_.load(); }

 private:
  Response Process(const Request& req) const;

  Ledger ledger_;
  FaultPolicy fault_;
  sp::SpLimits limits_;
  mutable std::atomic<std::uint64_t> served_{0};
};

// ---------------------------------------------------------------------------
// Endpoints

class Endpoint {
 public:
  virtual ~Endpoint() = default;
  // Sends one request envelope and returns the response envelope. Throws
  // ProtocolError on transport failure or timeout.
  virtual Bytes Call(std::span<const std::uint8_t> envelope,
                     std::chrono::milliseconds timeout) = 0;
  virtual std::string name() const = 0;
};

class LocalEndpoint final : public Endpoint {
 public:
  LocalEndpoint(std::shared_ptr<const SpService> service, std::string name)
      : service_(std::move(service)), name_(std::move(name)) {}
  Bytes Call(std::span<const std::uint8_t> envelope,
             std::chrono::milliseconds timeout) override;
  std::string name() const override { return name_; }

 private:
  std::shared_ptr<const SpService> service_;
  std::string name_;
};

// One connection per call.
class TcpEndpoint final : public Endpoint {
 public:
  TcpEndpoint(std::string host, std::uint16_t port)
      : host_(std::move(host)), port_(port) {}
  Bytes Call(std::span<const std::uint8_t> envelope,
             std::chrono::milliseconds timeout) override;
  std::string name() const override { return host_ + ":" + std::to_string(port_); }

 private:
  std::string host_;
  std::uint16_t port_;
};

// "host:port" pairs separated by commas.
std::vector<std::pair<std::string, std::uint16_t>> ParseAddressList(std::string_view text);
// PIQLB_SP_ADDRS, or an empty list when unset.
std::vector<std::pair<std::string, std::uint16_t>> AddressesFromEnv();

class TcpServer {
 public:
  // port 0 binds an ephemeral port. Throws Error when binding fails.
  TcpServer(std::shared_ptr<const SpService> service, const std::string& host,
            std::uint16_t port);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }
  void Stop();

 private:
  void AcceptLoop();
  void Serve(int fd);

  std::shared_ptr<const SpService> service_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::condition_variable idle_;
  std::size_t active_ = 0;
  std::vector<int> open_fds_;
};

// ---------------------------------------------------------------------------
// Client driver

struct ExecuteOptions {
  std::chrono::milliseconds timeout{30000};
  unsigned retries = 1;
};

struct ExecuteReport {
  client::QueryResult result;
  std::vector<std::size_t> request_bytes;   // per SP, framed
  std::vector<std::size_t> response_bytes;  // per SP, framed
  double seconds = 0;
};

Request BuildRequest(const client::QuerySession& session, std::size_t party,
                     const RequestId& id);
// Checks the echoed id and status and converts to a ShareOutput. Throws
// ProtocolError naming `endpoint`.
sp::ShareOutput ToShareOutput(const Response& r, const RequestId& id,
                              const std::string& endpoint);

// Sends share i to endpoints[i] concurrently, then verifies. Throws
// ProtocolError on any transport failure, error response or mismatch.
ExecuteReport ClientExecute(std::span<Endpoint* const> endpoints,
                            const client::QuerySession& session,
                            const ExecuteOptions& options = {});

}  // namespace piqlb::transport

#endif  // PIQLB_TRANSPORT_HPP_
