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

#include "piqlb/bytes.hpp"

#include <algorithm>

namespace piqlb {

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes FromHex(std::string_view hex) {
  auto nibble = [&](char c, std::size_t pos) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw DecodeError("invalid hex digit", pos);
  };
  if (hex.size() % 2 != 0) {
    throw DecodeError("odd-length hex string", hex.size());
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i], 2 * i) << 4 |
                                       nibble(hex[2 * i + 1], 2 * i + 1));
  }
  return out;
}

std::string U128ToString(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void ByteWriter::ShortString(std::string_view s) {
  if (s.size() > 0xffff) throw InputError("string too long to encode");
  U16(static_cast<std::uint16_t>(s.size()));
  Raw(AsBytes(s));
}

void ByteWriter::Blob(std::span<const std::uint8_t> bytes) {
  if (bytes.size() > 0xffffffffu) throw InputError("blob too long to encode");
  U32(static_cast<std::uint32_t>(bytes.size()));
  Raw(bytes);
}

std::string ByteReader::ShortString() {
  auto len = U16();
  auto raw = Raw(len);
  return std::string(raw.begin(), raw.end());
}

std::span<const std::uint8_t> ByteReader::Blob() {
  auto len = U32();
  return Raw(len);
}

void ByteReader::ExpectEnd(std::string_view what) const {
  if (!done()) {
    throw DecodeError(std::to_string(remaining()) + " trailing bytes after " +
                          std::string(what),
                      pos_);
  }
}

}  // namespace piqlb
