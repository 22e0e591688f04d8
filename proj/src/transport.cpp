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


#include "piqlb/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <future>
#include <limits>

#include "json.hpp"
#include "piqlb/error.hpp"
#include "piqlb/fss.hpp"
#include "piqlb/random.hpp"

namespace piqlb::transport {

const char* StatusName(Status s) {
  switch (s) {
    case Status::kOk:
      return "OK";
    case Status::kDecode:
      return "DECODE";
    case Status::kVersion:
      return "VERSION";
    case Status::kValidation:
      return "VALIDATION";
    case Status::kEval:
      return "EVAL";
    case Status::kResource:
      return "RESOURCE";
    case Status::kUnsupported:
      return "UNSUPPORTED";
    case Status::kInternal:
      return "INTERNAL";
  }
  return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// Envelopes

namespace {

void ReadHeader(ByteReader& r, MessageType want, std::uint8_t& version,
                RequestId& id) {
  version = r.U8();
  if (version != kWireVersion) {
    throw DecodeError("unsupported wire version: expected " +
                          std::to_string(kWireVersion) + ", got " +
                          std::to_string(version),
                      0);
  }
  const std::size_t at = r.offset();
  if (r.U8() != static_cast<std::uint8_t>(want)) {
    throw DecodeError("unexpected message type", at);
  }
  auto raw = r.Raw(16);
  std::copy(raw.begin(), raw.end(), id.begin());
}

unsigned ByteWidth(unsigned lambda) { return (lambda + 7) / 8; }

}  // namespace

Bytes EncodeRequest(const Request& r) {
  ByteWriter w;
  w.U8(r.version);
  w.U8(static_cast<std::uint8_t>(MessageType::kRequest));
  w.Raw(r.request_id);
  w.U16(r.lambda_bits);
  w.U16(r.l);
  w.Blob(r.private_query);
  w.Blob(r.share);
  return w.Take();
}

Request DecodeRequest(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Request req;
  ReadHeader(r, MessageType::kRequest, req.version, req.request_id);
  std::size_t at = r.offset();
  req.lambda_bits = r.U16();
  if (req.lambda_bits < 1 || req.lambda_bits > 128) {
    throw DecodeError("lambda must be 1..128", at);
  }
  at = r.offset();
  req.l = r.U16();
  if (req.l < 1 || req.l > 64) throw DecodeError("l must be 1..64", at);
  auto q = r.Blob();
  req.private_query.assign(q.begin(), q.end());
  auto s = r.Blob();
  req.share.assign(s.begin(), s.end());
  r.ExpectEnd("request");
  return req;
}

Bytes EncodeResponse(const Response& r) {
  ByteWriter w;
  w.U8(r.version);
  w.U8(static_cast<std::uint8_t>(MessageType::kResponse));
  w.Raw(r.request_id);
  w.U8(r.party_index);
  w.U16(static_cast<std::uint16_t>(r.status));
  if (r.status == Status::kOk) {
    w.U16(r.lambda_bits);
    w.U16(static_cast<std::uint16_t>(r.values.size()));
    for (u128 v : r.values) w.Uint(v, ByteWidth(r.lambda_bits));
  } else {
    w.ShortString(r.message.substr(0, 4096));
  }
  return w.Take();
}

Response DecodeResponse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Response resp;
  ReadHeader(r, MessageType::kResponse, resp.version, resp.request_id);
  resp.party_index = r.U8();
  std::size_t at = r.offset();
  const std::uint16_t status = r.U16();
  if (status > static_cast<std::uint16_t>(Status::kInternal)) {
    throw DecodeError("unknown status " + std::to_string(status), at);
  }
  resp.status = static_cast<Status>(status);
  if (resp.status == Status::kOk) {
    at = r.offset();
    resp.lambda_bits = r.U16();
    if (resp.lambda_bits < 1 || resp.lambda_bits > 128) {
      throw DecodeError("lambda must be 1..128", at);
    }
    at = r.offset();
    const unsigned l = r.U16();
    if (l < 1 || l > 64) throw DecodeError("l must be 1..64", at);
    const u128 mask = LowMask(resp.lambda_bits);
    for (unsigned k = 0; k < l; ++k) {
      at = r.offset();
      const u128 v = r.Uint(ByteWidth(resp.lambda_bits));
      if ((v & ~mask) != 0) throw DecodeError("value outside the group", at);
      resp.values.push_back(v);
    }
  } else {
    resp.message = r.ShortString();
  }
  r.ExpectEnd("response");
  return resp;
}

std::string RequestToJson(const Request& r) {
  nlohmann::json j = {{"version", r.version},
                      {"request_id", ToHex(r.request_id)},
                      {"lambda_bits", r.lambda_bits},
                      {"l", r.l},
                      {"private_query_hex", ToHex(r.private_query)},
                      {"share_bytes", r.share.size()}};
  try {
    j["private_query"] =
        query::DeserializePrivateQuery(r.private_query).ToText();
  } catch (const Error&) {
    j["private_query"] = nullptr;
  }
  return j.dump(2);
}

std::string ResponseToJson(const Response& r) {
  nlohmann::json j = {{"version", r.version},
                      {"request_id", ToHex(r.request_id)},
                      {"party_index", r.party_index},
                      {"status", StatusName(r.status)}};
  if (r.status == Status::kOk) {
    j["lambda_bits"] = r.lambda_bits;
    std::vector<std::string> values;
    for (u128 v : r.values) values.push_back(U128ToString(v));
    j["values"] = values;
  } else {
    j["message"] = r.message;
  }
  return j.dump(2);
}

Bytes Frame(std::span<const std::uint8_t> envelope) {
  ByteWriter w;
  w.U32(static_cast<std::uint32_t>(envelope.size()));
  w.Raw(envelope);
  return w.Take();
}

// ---------------------------------------------------------------------------
// Fault policy

FaultPolicy FaultPolicy::AddDelta(unsigned bit, u128 delta) {
  FaultPolicy f;
  f.mode = Mode::kAddDelta;
  f.bit = bit;
  f.delta = delta;
  return f;
}

FaultPolicy FaultPolicy::RandomOutput() {
  FaultPolicy f;
  f.mode = Mode::kRandomOutput;
  return f;
}

FaultPolicy FaultPolicy::TamperLedger(std::size_t record, std::size_t column,
                                      std::optional<Value> v) {
  FaultPolicy f;
  f.mode = Mode::kTamperLedger;
  f.record_index = record;
  f.column = column;
  f.new_value = std::move(v);
  return f;
}

FaultPolicy FaultPolicy::WrongQuery(std::optional<query::PrivateQuery> q) {
  FaultPolicy f;
  f.mode = Mode::kWrongQuery;
  f.substitute = std::move(q);
  return f;
}

namespace {

std::uint64_t ParseUnsigned(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  if (s.empty()) throw InputError("missing " + std::string(what));
  for (char c : s) {
    if (c < '0' || c > '9' || v > (std::numeric_limits<std::uint64_t>::max() - 9) / 10) {
      throw InputError("invalid " + std::string(what) + " '" + std::string(s) + "'");
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

FaultPolicy FaultPolicy::Parse(std::string_view text) {
  std::vector<std::string_view> parts;
  for (std::size_t start = 0;;) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const std::string_view mode = parts[0];
  auto arg = [&](std::size_t i) -> std::optional<std::string_view> {
    if (i < parts.size()) return parts[i];
    return std::nullopt;
  };
  if (mode == "honest" && parts.size() == 1) return Honest();
  if (mode == "random-output" && parts.size() == 1) return RandomOutput();
  if (mode == "wrong-query" && parts.size() == 1) return WrongQuery();
  if (mode == "add-delta" && parts.size() <= 3) {
    const unsigned bit = arg(1) ? static_cast<unsigned>(ParseUnsigned(*arg(1), "bit")) : 0;
    const u128 delta = arg(2) ? ParseUnsigned(*arg(2), "delta") : 1;
    if (delta == 0) throw InputError("delta must be nonzero");
    return AddDelta(bit, delta);
  }
  if (mode == "tamper-ledger" && parts.size() <= 4) {
    const std::size_t record = arg(1) ? ParseUnsigned(*arg(1), "record index") : 0;
    const std::size_t column = arg(2) ? ParseUnsigned(*arg(2), "column index") : 0;
    std::optional<Value> v;
    if (arg(3)) {
      bool digits = !arg(3)->empty();
      for (char c : *arg(3)) digits = digits && c >= '0' && c <= '9';
      v = digits ? Value(ParseUnsigned(*arg(3), "value")) : Value(std::string(*arg(3)));
    }
    return TamperLedger(record, column, v);
  }
  throw InputError("unknown fault '" + std::string(text) +
                   "' (honest, add-delta[:bit[:delta]], random-output, "
                   "tamper-ledger[:record[:column[:value]]], wrong-query)");
}

std::string FaultPolicy::ToString() const {
  switch (mode) {
    case Mode::kHonest:
      return "honest";
    case Mode::kAddDelta:
      return "add-delta:" + std::to_string(bit) + ":" + U128ToString(delta);
    case Mode::kRandomOutput:
      return "random-output";
    case Mode::kTamperLedger:
      return "tamper-ledger:" + std::to_string(record_index) + ":" +
             std::to_string(column) +
             (new_value ? ":" + ValueToString(*new_value) : std::string());
    case Mode::kWrongQuery:
      return "wrong-query";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Service

namespace {

void ApplyTamper(Ledger& ledger, const FaultPolicy& f) {
  std::size_t index = f.record_index;
  for (Block& b : ledger.mutable_blocks()) {
    if (index < b.records.size()) {
      if (f.column >= ledger.schema().size()) {
        throw InputError("tamper column out of range");
      }
      Value& cell = b.records[index].fields[f.column];
      if (f.new_value) {
        cell = *f.new_value;
      } else if (auto* n = std::get_if<std::uint64_t>(&cell)) {
        // Flip the lowest bit so the value stays inside its column width.
        *n ^= 1;
      } else {
        std::get<std::string>(cell) += "*";
      }
      return;
    }
    index -= b.records.size();
  }
  throw InputError("tamper record index beyond the ledger");
}

query::PrivateQuery DefaultSubstitute(const query::PrivateQuery& q) {
  query::PrivateQuery out = q;
  if (q.aggregate != query::AggregateType::kCount) {
    out.aggregate = query::AggregateType::kCount;
  } else {
    out.window = {std::numeric_limits<std::int64_t>::min() / 2,
                  std::numeric_limits<std::int64_t>::max() / 2};
  }
  return out;
}

Response ErrorResponse(const RequestId& id, Status status, std::string message) {
  Response r;
  r.request_id = id;
  r.status = status;
  r.message = std::move(message);
  return r;
}

}  // namespace

SpService::SpService(Ledger ledger, FaultPolicy fault, sp::SpLimits limits)
    : ledger_(std::move(ledger)), fault_(std::move(fault)), limits_(limits) {
  ledger_.Verify();
  if (fault_.mode == FaultPolicy::Mode::kTamperLedger) ApplyTamper(ledger_, fault_);
}

Response SpService::Process(const Request& req) const {
  const query::PrivateQuery received = query::DeserializePrivateQuery(req.private_query);
  const fss::FunctionShare share = fss::DeserializeShare(req.share);
  if (share.lambda_bits() != req.lambda_bits) {
    throw ValidationError("share group does not match the request");
  }
  if (received.result_bits != req.l) {
    throw ValidationError("l does not match the private query");
  }
  query::PrivateQuery q = received;
  if (fault_.mode == FaultPolicy::Mode::kWrongQuery) {
    q = fault_.substitute ? *fault_.substitute : DefaultSubstitute(received);
  }
  sp::ShareOutput out = sp::Eval(share, ledger_, q, limits_);

  Response resp;
  resp.request_id = req.request_id;
  resp.party_index = static_cast<std::uint8_t>(share.party_index());
  resp.lambda_bits = req.lambda_bits;
  const Group g(req.lambda_bits);
  for (const auto& v : out.values) resp.values.push_back(v.value());
  // Keep the advertised l even when a substituted query asked for another.
  resp.values.resize(req.l, 0);
  switch (fault_.mode) {
    case FaultPolicy::Mode::kAddDelta:
      if (fault_.bit < resp.values.size()) {
        resp.values[fault_.bit] = g.Reduce(resp.values[fault_.bit] + fault_.delta);
      }
      break;
    case FaultPolicy::Mode::kRandomOutput: {
      SystemRandom rng;
      for (auto& v : resp.values) v = g.Random(rng);
      break;
    }
    default:
      break;
  }
  return resp;
}

Bytes SpService::Handle(std::span<const std::uint8_t> envelope) const {
  ++served_;
  RequestId id{};
  if (envelope.size() >= 18) std::copy_n(envelope.begin() + 2, 16, id.begin());
  Response resp;
  try {
    Request req;
    try {
      req = DecodeRequest(envelope);
    } catch (const DecodeError& e) {
      const bool version = !envelope.empty() && envelope[0] != kWireVersion;
      resp = ErrorResponse(id, version ? Status::kVersion : Status::kDecode, e.what());
      return EncodeResponse(resp);
    }
    resp = Process(req);
  } catch (const DecodeError& e) {
    resp = ErrorResponse(id, Status::kDecode, e.what());
  } catch (const ValidationError& e) {
    resp = ErrorResponse(id, Status::kValidation, e.what());
  } catch (const SchemaError& e) {
    resp = ErrorResponse(id, Status::kValidation, e.what());
  } catch (const InputError& e) {
    resp = ErrorResponse(id, Status::kValidation, e.what());
  } catch (const EvalError& e) {
    resp = ErrorResponse(id, Status::kEval, e.what());
  } catch (const ResourceError& e) {
    resp = ErrorResponse(id, Status::kResource, e.what());
  } catch (const UnsupportedError& e) {
    resp = ErrorResponse(id, Status::kUnsupported, e.what());
  } catch (const std::exception& e) {
    resp = ErrorResponse(id, Status::kInternal, e.what());
  } catch (...) {
    resp = ErrorResponse(id, Status::kInternal, "unknown failure");
  }
  try {
    return EncodeResponse(resp);
  } catch (...) {
    return {};
  }
}

// ---------------------------------------------------------------------------
// Sockets

namespace {

using Clock = std::chrono::steady_clock;

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

// Waits until fd is ready or the deadline passes. Returns false on timeout.
bool WaitFor(int fd, short events, Clock::time_point deadline) {
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) return false;
    pollfd p{fd, events, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) return false;
  }
}

// Reads exactly out.size() bytes. Returns false on EOF before any byte when
// allow_eof is set; throws ProtocolError otherwise.
bool ReadAll(int fd, std::span<std::uint8_t> out, Clock::time_point deadline,
             bool allow_eof) {
  std::size_t got = 0;
  while (got < out.size()) {
    if (!WaitFor(fd, POLLIN, deadline)) throw ProtocolError("timed out reading");
    const ssize_t n = ::recv(fd, out.data() + got, out.size() - got, 0);
    if (n == 0) {
      if (allow_eof && got == 0) return false;
      throw ProtocolError("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ProtocolError(std::string("recv failed: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

void WriteAll(int fd, std::span<const std::uint8_t> data, Clock::time_point deadline) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    if (!WaitFor(fd, POLLOUT, deadline)) throw ProtocolError("timed out writing");
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ProtocolError(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

// Reads one frame; nullopt on clean EOF. Oversized lengths throw.
std::optional<Bytes> ReadFrame(int fd, Clock::time_point deadline) {
  std::uint8_t len_bytes[4];
  if (!ReadAll(fd, len_bytes, deadline, true)) return std::nullopt;
  const std::uint32_t len = static_cast<std::uint32_t>(len_bytes[0]) |
                            static_cast<std::uint32_t>(len_bytes[1]) << 8 |
                            static_cast<std::uint32_t>(len_bytes[2]) << 16 |
                            static_cast<std::uint32_t>(len_bytes[3]) << 24;
  if (len > kMaxFrameBytes) {
    throw DecodeError("frame of " + std::to_string(len) + " bytes exceeds the limit", 0);
  }
  Bytes body(len);
  ReadAll(fd, body, deadline, false);
  return body;
}

}  // namespace

Bytes LocalEndpoint::Call(std::span<const std::uint8_t> envelope,
                          std::chrono::milliseconds) {
  return service_->Handle(envelope);
}

Bytes TcpEndpoint::Call(std::span<const std::uint8_t> envelope,
                        std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(port_);
  if (const int rc = ::getaddrinfo(host_.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw ProtocolError(name() + ": cannot resolve: " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
  std::string last_error = "no address";
  for (addrinfo* a = res; a != nullptr; a = a->ai_next) {
    Fd fd(::socket(a->ai_family, a->ai_socktype, a->ai_protocol));
    if (fd.get() < 0) continue;
    if (::connect(fd.get(), a->ai_addr, a->ai_addrlen) != 0) {
      last_error = std::strerror(errno);
      continue;
    }
    int one = 1;
    ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    try {
      WriteAll(fd.get(), Frame(envelope), deadline);
      auto reply = ReadFrame(fd.get(), deadline);
      if (!reply) throw ProtocolError("connection closed without a reply");
      return std::move(*reply);
    } catch (const Error& e) {
      throw ProtocolError(name() + ": " + e.what());
    }
  }
  throw ProtocolError(name() + ": cannot connect: " + last_error);
}

std::vector<std::pair<std::string, std::uint16_t>> ParseAddressList(std::string_view text) {
  std::vector<std::pair<std::string, std::uint16_t>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const std::size_t colon = item.rfind(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw InputError("address '" + std::string(item) + "' is not host:port");
      }
      const std::uint64_t port = ParseUnsigned(item.substr(colon + 1), "port");
      if (port == 0 || port > 65535) throw InputError("port out of range in '" + std::string(item) + "'");
      out.emplace_back(std::string(item.substr(0, colon)), static_cast<std::uint16_t>(port));
    }
    start = comma + 1;
  }
  return out;
}

std::vector<std::pair<std::string, std::uint16_t>> AddressesFromEnv() {
  const char* env = std::getenv("PIQLB_SP_ADDRS");
  if (env == nullptr) return {};
  return ParseAddressList(env);
}

TcpServer::TcpServer(std::shared_ptr<const SpService> service,
                     const std::string& host, std::uint16_t port)
    : service_(std::move(service)) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port_text = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res); rc != 0) {
    throw Error("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
  for (addrinfo* a = res; a != nullptr; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
      listen_fd_ = fd;
      break;
    }
    ::close(fd);
  }
  if (listen_fd_ < 0) {
    throw Error("cannot bind " + host + ":" + port_text + ": " + std::strerror(errno));
  }
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.ss_family == AF_INET6
                    ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                    : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  acceptor_ = std::thread([this] { AcceptLoop(); });
}

TcpServer::~TcpServer() { Stop(); }

void TcpServer::Stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  std::unique_lock<std::mutex> lock(mu_);
  for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  idle_.wait(lock, [this] { return active_ == 0; });
}

void TcpServer::AcceptLoop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, 100);
    if (rc <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    open_fds_.push_back(fd);
    ++active_;
    std::thread([this, fd] { Serve(fd); }).detach();
  }
}

void TcpServer::Serve(int fd) {
  try {
    for (;;) {
      const auto deadline = Clock::now() + std::chrono::minutes(5);
      std::optional<Bytes> frame;
      try {
        frame = ReadFrame(fd, deadline);
      } catch (const DecodeError& e) {
        // Oversized length: answer once, then drop the connection since the
        // stream position is lost.
        WriteAll(fd, Frame(EncodeResponse(ErrorResponse({}, Status::kDecode, e.what()))),
                 Clock::now() + std::chrono::seconds(5));
        break;
      }
      if (!frame) break;
      const Bytes reply = service_->Handle(*frame);
      WriteAll(fd, Frame(reply), Clock::now() + std::chrono::seconds(30));
    }
  } catch (const std::exception&) {
    // Connection-level failure; the server keeps running.
  }
  std::lock_guard<std::mutex> lock(mu_);
  std::erase(open_fds_, fd);
  ::close(fd);
  --active_;
  idle_.notify_all();
}

// ---------------------------------------------------------------------------
// Client

Request BuildRequest(const client::QuerySession& session, std::size_t party,
                     const RequestId& id) {
  Request r;
  r.request_id = id;
  r.lambda_bits = static_cast<std::uint16_t>(session.y().lambda_bits());
  r.l = static_cast<std::uint16_t>(session.private_query().result_bits);
  r.private_query = query::SerializePrivateQuery(session.private_query());
  r.share = fss::SerializeShare(session.shares().at(party));
  return r;
}

sp::ShareOutput ToShareOutput(const Response& r, const RequestId& id,
                              const std::string& endpoint) {
  if (r.request_id != id) throw ProtocolError(endpoint + ": mismatched request id");
  if (r.status != Status::kOk) {
    throw ProtocolError(endpoint + ": " + StatusName(r.status) + " error: " + r.message);
  }
  sp::ShareOutput out;
  out.party_index = r.party_index;
  out.lambda_bits = r.lambda_bits;
  const Group g(r.lambda_bits);
  for (u128 v : r.values) out.values.emplace_back(v, g);
  return out;
}

ExecuteReport ClientExecute(std::span<Endpoint* const> endpoints,
                            const client::QuerySession& session,
                            const ExecuteOptions& options) {
  const std::size_t p = session.parties();
  if (endpoints.size() != p) {
    throw ProtocolError("need " + std::to_string(p) + " endpoints, got " +
                        std::to_string(endpoints.size()));
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (endpoints[i] == endpoints[j] || endpoints[i]->name() == endpoints[j]->name()) {
        throw ProtocolError("endpoint " + endpoints[i]->name() + " listed twice");
      }
    }
  }
  const auto start = Clock::now();
  SystemRandom rng;
  struct Call {
    RequestId id{};
    Bytes request;
    std::size_t response_bytes = 0;
    sp::ShareOutput output;
  };
  std::vector<Call> calls(p);
  for (std::size_t i = 0; i < p; ++i) {
    rng.Fill(calls[i].id);
    calls[i].request = EncodeRequest(BuildRequest(session, i, calls[i].id));
  }
  std::vector<std::future<void>> pending;
  for (std::size_t i = 0; i < p; ++i) {
    pending.push_back(std::async(std::launch::async, [&, i] {
      Endpoint& ep = *endpoints[i];
      for (unsigned attempt = 0;; ++attempt) {
        try {
          const Bytes reply = ep.Call(calls[i].request, options.timeout);
          calls[i].response_bytes = reply.size() + 4;
          Response resp;
          try {
            resp = DecodeResponse(reply);
          } catch (const DecodeError& e) {
            throw ProtocolError(ep.name() + ": malformed response: " + e.what());
          }
          calls[i].output = ToShareOutput(resp, calls[i].id, ep.name());
          return;
        } catch (const ProtocolError&) {
          if (attempt >= options.retries) throw;
        }
      }
    }));
  }
  std::optional<ProtocolError> failure;
  for (auto& f : pending) {
    try {
      f.get();
    } catch (const ProtocolError& e) {
      if (!failure) failure = e;
    }
  }
  if (failure) throw *failure;

  ExecuteReport report;
  std::vector<sp::ShareOutput> outputs;
  for (auto& c : calls) {
    report.request_bytes.push_back(c.request.size() + 4);
    report.response_bytes.push_back(c.response_bytes);
    outputs.push_back(std::move(c.output));
  }
  report.result = client::Verif(session, outputs);
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace piqlb::transport
