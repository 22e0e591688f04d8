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


#include "piqlb/ledger.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "piqlb/error.hpp"
#include "piqlb/query.hpp"

namespace piqlb {

Digest Sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw Error("SHA-256 failed");
  }
  return out;
}

void EncodeRecord(ByteWriter& w, const Record& r) {
  w.ShortString(r.object_id);
  w.I64(r.t);
  w.U64(r.v);
  w.U16(static_cast<std::uint16_t>(r.fields.size()));
  for (const auto& f : r.fields) {
    if (const auto* n = std::get_if<std::uint64_t>(&f)) {
      w.U8(0);
      w.U64(*n);
    } else {
      w.U8(1);
      w.ShortString(std::get<std::string>(f));
    }
  }
}

Record DecodeRecord(ByteReader& r) {
  Record rec;
  rec.object_id = r.ShortString();
  rec.t = r.I64();
  rec.v = r.U64();
  const unsigned count = r.U16();
  rec.fields.reserve(count);
  for (unsigned i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    const std::uint8_t tag = r.U8();
    if (tag == 0) {
      rec.fields.emplace_back(r.U64());
    } else if (tag == 1) {
      rec.fields.emplace_back(r.ShortString());
    } else {
      throw DecodeError("invalid field tag " + std::to_string(tag), at);
    }
  }
  return rec;
}

Digest RecordsDigest(std::span<const Record> records) {
  ByteWriter w;
  w.U32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) EncodeRecord(w, r);
  return Sha256(w.bytes());
}

Bytes BlockHeaderBytes(const Block& b) {
  ByteWriter w;
  w.U8(kBlockFormatVersion);
  w.U64(b.height);
  w.I64(b.timestamp);
  w.Raw(b.prev_hash);
  w.Raw(b.records_hash);
  w.U32(static_cast<std::uint32_t>(b.records.size()));
  return w.Take();
}

namespace {

void CheckWindow(const Record& r, std::optional<std::int64_t> prev,
                 std::int64_t timestamp, std::uint64_t height) {
  if (r.t > timestamp || (prev && r.t <= *prev)) {
    throw InputError("record " + r.object_id + " at t=" + std::to_string(r.t) +
                     " lies outside the window of block " +
                     std::to_string(height));
  }
}

}  // namespace

const Block& Ledger::AppendBlock(std::vector<Record> records,
                                 std::int64_t timestamp) {
  std::optional<std::int64_t> prev;
  if (!blocks_.empty()) prev = blocks_.back().timestamp;
  if (prev && timestamp <= *prev) {
    throw InputError("block timestamp " + std::to_string(timestamp) +
                     " does not exceed its predecessor's " +
                     std::to_string(*prev));
  }
  Block b;
  b.height = blocks_.size();
  b.timestamp = timestamp;
  if (!blocks_.empty()) b.prev_hash = blocks_.back().hash;
  for (const auto& r : records) {
    CheckWindow(r, prev, timestamp, b.height);
    schema_.ValidateRow(r.fields);
  }
  b.records = std::move(records);
  b.records_hash = RecordsDigest(b.records);
  b.hash = Sha256(BlockHeaderBytes(b));
  blocks_.push_back(std::move(b));
  return blocks_.back();
}

std::size_t Ledger::record_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.records.size();
  return n;
}

std::span<const Block> Ledger::SelectBlocks(std::int64_t begin,
                                            std::int64_t end) const {
  if (begin >= end) return {};
  auto by_time = [](const Block& b, std::int64_t t) { return b.timestamp < t; };
  auto lo = std::lower_bound(blocks_.begin(), blocks_.end(), begin, by_time);
  auto hi = std::lower_bound(lo, blocks_.end(), end, by_time);
  return {blocks_.data() + (lo - blocks_.begin()),
          static_cast<std::size_t>(hi - lo)};
}

void Ledger::Verify() const {
  Digest prev{};
  std::optional<std::int64_t> prev_time;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    auto fail = [&](const std::string& what) {
      throw IntegrityError("block " + std::to_string(i) + ": " + what);
    };
    if (b.height != i) fail("height " + std::to_string(b.height) + " out of sequence");
    if (b.prev_hash != prev) fail("prev_hash does not match the previous header");
    if (prev_time && b.timestamp <= *prev_time) fail("timestamp not increasing");
    if (RecordsDigest(b.records) != b.records_hash) fail("records digest mismatch");
    if (Sha256(BlockHeaderBytes(b)) != b.hash) fail("header digest mismatch");
    for (const auto& r : b.records) {
      try {
        CheckWindow(r, prev_time, b.timestamp, b.height);
        schema_.ValidateRow(r.fields);
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    prev = b.hash;
    prev_time = b.timestamp;
  }
}

// ---------------------------------------------------------------------------
// Binary file

namespace {
constexpr std::uint8_t kMagic[4] = {'P', 'Q', 'L', 'B'};
}

Bytes SerializeLedger(const Ledger& ledger) {
  ByteWriter w;
  w.Raw(kMagic);
  w.U16(kLedgerFileVersion);
  const std::string schema = ledger.schema().ToJson();
  w.Blob(AsBytes(schema));
  w.U64(ledger.size());
  for (const Block& b : ledger.blocks()) {
    w.U64(b.height);
    w.I64(b.timestamp);
    w.Raw(b.prev_hash);
    w.Raw(b.records_hash);
    w.Raw(b.hash);
    w.U32(static_cast<std::uint32_t>(b.records.size()));
    for (const auto& r : b.records) EncodeRecord(w, r);
  }
  return w.Take();
}

Ledger DeserializeLedger(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.Raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw DecodeError("not a ledger file", 0);
  }
  const std::size_t at = r.offset();
  const std::uint16_t version = r.U16();
  if (version != kLedgerFileVersion) {
    throw DecodeError("unsupported ledger file version " + std::to_string(version),
                      at);
  }
  auto schema_bytes = r.Blob();
  Ledger ledger(Schema::FromJson(
      std::string_view(reinterpret_cast<const char*>(schema_bytes.data()),
                       schema_bytes.size())));
  const std::uint64_t count = r.U64();
  // Each block takes at least 116 bytes; reject absurd counts before reserving.
  if (count > r.remaining() / 116) r.Fail("block count exceeds file size");
  auto& blocks = ledger.mutable_blocks();
  blocks.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Block b;
    b.height = r.U64();
    b.timestamp = r.I64();
    auto copy = [&](Digest& d) {
      auto raw = r.Raw(32);
      std::copy(raw.begin(), raw.end(), d.begin());
    };
    copy(b.prev_hash);
    copy(b.records_hash);
    copy(b.hash);
    const std::uint32_t n = r.U32();
    if (n > r.remaining() / 29) r.Fail("record count exceeds file size");
    b.records.reserve(n);
    for (std::uint32_t j = 0; j < n; ++j) b.records.push_back(DecodeRecord(r));
    blocks.push_back(std::move(b));
  }
  r.ExpectEnd("ledger file");
  return ledger;
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

using nlohmann::json;

std::int64_t JsonTime(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return query::ParseTimestamp(j.get<std::string>()).seconds;
  throw SchemaError("field 't' must be a number or timestamp string");
}

Record JsonRecord(const json& j, const Schema& schema) {
  if (!j.is_object()) throw SchemaError("record must be a JSON object");
  Record r;
  for (const auto& [key, _] : j.items()) {
    if (key != "id" && key != "t" && key != "V" && key != "W") {
      throw SchemaError("unknown record field '" + key + "'");
    }
  }
  if (!j.contains("id") || !j.contains("t") || !j.contains("W")) {
    throw SchemaError("record needs 'id', 't' and 'W'");
  }
  const json& id = j["id"];
  if (id.is_string()) {
    r.object_id = id.get<std::string>();
  } else if (id.is_number_unsigned() || id.is_number_integer()) {
    r.object_id = id.dump();
  } else {
    throw SchemaError("'id' must be a string or integer");
  }
  r.t = JsonTime(j["t"]);
  if (j.contains("V")) {
    if (!j["V"].is_number_unsigned()) throw SchemaError("'V' must be unsigned");
    r.v = j["V"].get<std::uint64_t>();
  }
  const json& w = j["W"];
  if (!w.is_object()) throw SchemaError("'W' must be an object");
  for (const auto& [key, _] : w.items()) {
    if (!schema.Find(key)) throw SchemaError("unknown column '" + key + "'");
  }
  r.fields.reserve(schema.size());
  for (const auto& col : schema.columns()) {
    if (!w.contains(col.name)) throw SchemaError("missing column '" + col.name + "'");
    const json& v = w[col.name];
    if (v.is_number_unsigned()) {
      r.fields.emplace_back(v.get<std::uint64_t>());
    } else if (v.is_string()) {
      r.fields.emplace_back(v.get<std::string>());
    } else {
      throw SchemaError("column '" + col.name +
                        "' must be an unsigned integer or string");
    }
  }
  schema.ValidateRow(r.fields);
  return r;
}

}  // namespace

Ledger IngestJsonl(std::istream& in, const std::optional<Schema>& schema,
                   const IngestOptions& options) {
  if (options.block_size == 0) throw ConfigError("block size must be positive");
  std::optional<Ledger> ledger;
  if (schema) ledger.emplace(*schema);
  std::vector<Record> pending;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::int64_t> last_t;

  auto flush = [&] {
    if (pending.empty()) return;
    const std::int64_t ts = pending.back().t;
    ledger->AppendBlock(std::move(pending), ts);
    pending.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      if (j.is_object() && j.contains("schema")) {
        if (ledger) throw SchemaError("schema line must come first");
        ledger.emplace(Schema::FromJson(j["schema"].dump()));
        continue;
      }
      if (!ledger) throw SchemaError("no schema given before the first record");
      Record r = JsonRecord(j, ledger->schema());
      if (last_t && r.t < *last_t) {
        throw SchemaError("timestamps out of order (" + std::to_string(r.t) +
                          " after " + std::to_string(*last_t) + ")");
      }
      if (pending.size() >= options.block_size && r.t != pending.back().t) {
        flush();
      }
      last_t = r.t;
      pending.push_back(std::move(r));
    } catch (const SchemaError& e) {
      if (e.line() != 0) throw;
      throw SchemaError(e.what(), line_no);
    } catch (const json::exception& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), line_no);
    } catch (const InputError& e) {
      throw SchemaError(e.what(), line_no);
    }
  }
  if (!ledger) throw SchemaError("input has no schema");
  flush();
  return std::move(*ledger);
}

void WriteJsonl(std::ostream& out, const Ledger& ledger, bool with_schema) {
  const Schema& schema = ledger.schema();
  if (with_schema) {
    out << json{{"schema", json::parse(schema.ToJson())}}.dump() << '\n';
  }
  for (const Block& b : ledger.blocks()) {
    for (const Record& r : b.records) {
      json w = json::object();
      for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& f = r.fields[i];
        if (const auto* n = std::get_if<std::uint64_t>(&f)) {
          w[schema.columns()[i].name] = *n;
        } else {
          w[schema.columns()[i].name] = std::get<std::string>(f);
        }
      }
      out << json{{"id", r.object_id}, {"t", r.t}, {"V", r.v}, {"W", w}}.dump()
          << '\n';
    }
  }
}

Ledger LoadLedger(const std::string& path, const std::optional<Schema>& schema,
                  const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  char head[4] = {};
  in.read(head, 4);
  const bool binary = in.gcount() == 4 && std::equal(head, head + 4, kMagic);
  in.clear();
  in.seekg(0);
  Ledger ledger;
  if (binary) {
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();
    ledger = DeserializeLedger(AsBytes(data));
  } else {
    ledger = IngestJsonl(in, schema, options);
  }
  ledger.Verify();
  return ledger;
}

void SaveLedger(const std::string& path, const Ledger& ledger) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  const Bytes bytes = SerializeLedger(ledger);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing " + path);
}

}  // namespace piqlb
