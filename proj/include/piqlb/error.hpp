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

#ifndef PIQLB_ERROR_HPP_
#define PIQLB_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace piqlb {

// Root of every error thrown by the library. Integrity failures detected by
// the client are not errors: they are reported as an ABORT result.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched or out-of-range configuration (group sizes, party counts, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An argument outside the operation's domain.
class InputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A request that would exceed a configured resource cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Malformed binary input. `offset` is the byte position where decoding failed.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Query text that does not match the grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position,
             std::vector<std::string> expected = {})
      : Error(Format(what, position, expected)),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string Format(const std::string& what, std::size_t position,
                            const std::vector<std::string>& expected) {
    std::string out = "parse error at position " + std::to_string(position) +
                      ": " + what;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out += i + 1 == expected.size() ? " or " : ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  std::size_t position_;
  std::vector<std::string> expected_;
};

// A syntactically valid query that violates a semantic rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Ingested data that does not conform to the schema. `line` is 1-based, or 0
// when the failure is not tied to an input line.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what
                        : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Hash chain or stored digest mismatch.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Service-provider side evaluation failure (overflow, shape mismatch, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

// Transport or protocol-shape failure on the client side. Distinct from an
// integrity ABORT.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace piqlb

#endif  // PIQLB_ERROR_HPP_
