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

// Little-endian byte writer/reader shared by every canonical encoding in the
// library (shares, private queries, blocks, wire envelopes).

#ifndef PIQLB_BYTES_HPP_
#define PIQLB_BYTES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "piqlb/error.hpp"

namespace piqlb {

using u128 = unsigned __int128;
using Bytes = std::vector<std::uint8_t>;

std::string ToHex(std::span<const std::uint8_t> bytes);
Bytes FromHex(std::string_view hex);
std::string U128ToString(u128 v);

class ByteWriter {
 public:
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U16(std::uint16_t v) { Uint(v, 2); }
  void U32(std::uint32_t v) { Uint(v, 4); }
  void U64(std::uint64_t v) { Uint(v, 8); }
  void I64(std::int64_t v) { Uint(static_cast<std::uint64_t>(v), 8); }
  // Lowest `width` bytes of `v`, little-endian. width <= 16.
  void Uint(u128 v, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void Raw(std::span<const std::uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  // u16 length prefix.
  void ShortString(std::string_view s);
  // u32 length prefix.
  void Blob(std::span<const std::uint8_t> bytes);

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t U8() { return static_cast<std::uint8_t>(Uint(1)); }
  std::uint16_t U16() { return static_cast<std::uint16_t>(Uint(2)); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Uint(4)); }
  std::uint64_t U64() { return static_cast<std::uint64_t>(Uint(8)); }
  std::int64_t I64() { return static_cast<std::int64_t>(U64()); }
  u128 Uint(std::size_t width) {
    Need(width);
    u128 v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      v |= static_cast<u128>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += width;
    return v;
  }
  std::span<const std::uint8_t> Raw(std::size_t n) {
    Need(n);
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::string ShortString();
  std::span<const std::uint8_t> Blob();

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

  // Throws unless every input byte was consumed.
  void ExpectEnd(std::string_view what) const;

  [[noreturn]] void Fail(const std::string& what) const {
    throw DecodeError(what, pos_);
  }

 private:
  void Need(std::size_t n) const {
    if (n > remaining()) {
      throw DecodeError("truncated input: need " + std::to_string(n) +
                            " bytes, " + std::to_string(remaining()) +
                            " left",
                        pos_);
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

inline std::span<const std::uint8_t> AsBytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace piqlb

#endif  // PIQLB_BYTES_HPP_
