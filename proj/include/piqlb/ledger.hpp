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


// Append-only hash-chained block store.
//
// A block header is hashed as
//   u8 version | u64 height | i64 timestamp | prev_hash[32] |
//   records_hash[32] | u32 record_count
// with SHA-256; records_hash is SHA-256 over the canonical encoding of the
// records in order. Every record in block h satisfies
//   block[h-1].timestamp < t <= block[h].timestamp.
//
// Line-delimited ingest format, one JSON object per line:
//   {"schema": {"columns": [...]}}                    optional first line
//   {"id": "o1", "t": "2022-06-01T12:00:00Z", "V": 0, "W": {"Item": 2, ...}}
// "t" may be unix seconds or any stamp the query grammar accepts; "V" is
// optional (default 0).

#ifndef PIQLB_LEDGER_HPP_
#define PIQLB_LEDGER_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "piqlb/bytes.hpp"
#include "piqlb/schema.hpp"

namespace piqlb {

using Digest = std::array<std::uint8_t, 32>;

Digest Sha256(std::span<const std::uint8_t> data);

struct Record {
  std::string object_id;
  std::int64_t t = 0;
  std::uint64_t v = 0;
  std::vector<Value> fields;  // W, one value per schema column

  friend bool operator==(const Record&, const Record&) = default;
};

struct Block {
  std::uint64_t height = 0;
  std::int64_t timestamp = 0;
  Digest prev_hash{};
  Digest records_hash{};
  Digest hash{};  // digest of this block's header
  std::vector<Record> records;

  friend bool operator==(const Block&, const Block&) = default;
};

inline constexpr std::uint8_t kBlockFormatVersion = 1;
inline constexpr std::size_t kDefaultBlockSize = 16;

void EncodeRecord(ByteWriter& w, const Record& r);
Record DecodeRecord(ByteReader& r);
Digest RecordsDigest(std::span<const Record> records);
Bytes BlockHeaderBytes(const Block& b);

class Ledger {
 public:
  Ledger() = default;
  explicit Ledger(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const { return schema_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  std::size_t record_count() const;

  // Throws InputError when the timestamp does not exceed the last block's or
  // a record falls outside the block's time window, SchemaError when a row
  // violates the schema.
  const Block& AppendBlock(std::vector<Record> records, std::int64_t timestamp);

  // Blocks with begin <= timestamp < end, in height order.
  std::span<const Block> SelectBlocks(std::int64_t begin, std::int64_t end) const;

  // Recomputes every digest and link. Throws IntegrityError naming the first
  // bad block.
  void Verify() const;

  // Direct access for fault injection. Stored hashes are left as they are.
  std::vector<Block>& mutable_blocks() { return blocks_; }

 private:
  Schema schema_;
  std::vector<Block> blocks_;
};

// Binary ledger file: "PQLB" | u16 version | blob(schema JSON) |
// u64 block_count | blocks.
inline constexpr std::uint16_t kLedgerFileVersion = 1;

Bytes SerializeLedger(const Ledger& ledger);
// Parses without verifying the chain. Throws DecodeError or SchemaError.
Ledger DeserializeLedger(std::span<const std::uint8_t> bytes);

struct IngestOptions {
  std::size_t block_size = kDefaultBlockSize;
};

// Records must be sorted by t. Blocks are cut every block_size records but
// never between two records with equal t. Throws SchemaError citing the line.
Ledger IngestJsonl(std::istream& in, const std::optional<Schema>& schema,
                   const IngestOptions& options = {});

void WriteJsonl(std::ostream& out, const Ledger& ledger, bool with_schema = true);

// Loads a binary or JSONL ledger (detected by the magic) and verifies it.
Ledger LoadLedger(const std::string& path,
                  const std::optional<Schema>& schema = std::nullopt,
                  const IngestOptions& options = {});
void SaveLedger(const std::string& path, const Ledger& ledger);

}  // namespace piqlb

#endif  // PIQLB_LEDGER_HPP_
