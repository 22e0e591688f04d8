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

#include <openssl/evp.h>

#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fss_helpers.hpp"
#include "piqlb/error.hpp"
#include "piqlb/fss.hpp"
#include "piqlb/prg.hpp"
#include "stats.hpp"

namespace piqlb::fss {
namespace {

using testing::RandomFunction;
using testing::Reconstruct;

GenOptions Naive(unsigned parties) {
  return {.backend = Backend::kNaive, .party_count = parties};
}
GenOptions Tree() { return {.backend = Backend::kTree, .party_count = 2}; }

TEST_CASE("point function reconstructs on both backends") {
  SeededRandom rng(10);
  Group g(64);
  auto f = SecretFunction::Point(4, 5, GroupElement(7, g));
  for (const auto& opts : {Naive(2), Tree()}) {
    auto shares = Gen(f, opts, rng);
    REQUIRE(shares.size() == 2);
    CHECK(Reconstruct(shares, 5).value() == 7);
    CHECK(Reconstruct(shares, 3).value() == 0);
  }
}

TEST_CASE("interval function with three naive parties") {
  SeededRandom rng(11);
  Group g(64);
  auto f = SecretFunction::Interval(5, 1, 10, GroupElement(9, g));
  auto shares = Gen(f, Naive(3), rng);
  REQUIRE(shares.size() == 3);
  CHECK(Reconstruct(shares, 4).value() == 9);
  CHECK(Reconstruct(shares, 11).value() == 0);
  CHECK(Reconstruct(shares, 1).value() == 9);
  CHECK(Reconstruct(shares, 10).value() == 9);
  CHECK(Reconstruct(shares, 0).value() == 0);
}

TEST_CASE("zero function reconstructs to zero everywhere") {
  SeededRandom rng(12);
  Group g(64);
  auto f = SecretFunction::Point(6, 0, GroupElement(0, g));
  for (const auto& opts : {Naive(2), Naive(4), Tree()}) {
    auto shares = Gen(f, opts, rng);
    for (u128 x = 0; x < 64; ++x) CHECK(Reconstruct(shares, x).is_zero());
  }
}

TEST_CASE("exhaustive truth table of POINT(3, 5) over 3 bits") {
  SeededRandom rng(13);
  Group g(64);
  auto f = SecretFunction::Point(3, 3, GroupElement(5, g));
  const std::uint64_t expected[8] = {0, 0, 0, 5, 0, 0, 0, 0};
  for (const auto& opts : {Naive(2), Tree()}) {
    auto shares = Gen(f, opts, rng);
    for (u128 x = 0; x < 8; ++x) {
      const auto sum = shares[0].Eval(x) + shares[1].Eval(x);
      CHECK(sum.value() == expected[static_cast<int>(x)]);
    }
  }
}

TEST_CASE("evaluation is deterministic") {
  SeededRandom rng(14);
  Group g(64);
  auto f = SecretFunction::Interval(12, 100, 2000, GroupElement(77, g));
  for (const auto& opts : {Naive(2), Tree()}) {
    auto shares = Gen(f, opts, rng);
    for (u128 x : {u128{0}, u128{100}, u128{1500}, u128{4095}}) {
      CHECK(shares[0].Eval(x) == shares[0].Eval(x));
    }
  }
}

TEST_CASE("exhaustive correctness for random functions, n <= 10") {
  SeededRandom rng(15);
  for (unsigned n = 1; n <= 10; ++n) {
    Group g(n % 2 == 0 ? 64 : 13);
    for (auto kind :
         {FunctionKind::kPoint, FunctionKind::kInterval, FunctionKind::kSum}) {
      for (int rep = 0; rep < 5; ++rep) {
        GroupElement y(g.RandomNonZero(rng), g);
        auto f = RandomFunction(kind, n, y, rng);
        for (const auto& opts : {Naive(2), Naive(3), Naive(4), Tree()}) {
          auto shares = Gen(f, opts, rng);
          bool ok = true;
          for (u128 x = 0; x < (u128{1} << n); ++x) {
            ok = ok && Reconstruct(shares, x) == f(x);
          }
          CHECK_MESSAGE(ok, "n=" << n << " backend=" << BackendName(opts.backend)
                                 << " parties=" << opts.party_count);
        }
      }
    }
  }
}

TEST_CASE("naive and tree backends reconstruct the same function") {
  SeededRandom rng(16);
  Group g(32);
  for (int rep = 0; rep < 20; ++rep) {
    const unsigned n = 1 + static_cast<unsigned>(rng.Uniform(10));
    GroupElement y(g.RandomNonZero(rng), g);
    auto f = RandomFunction(static_cast<FunctionKind>(1 + rng.Uniform(3)), n, y,
                            rng);
    auto naive = Gen(f, Naive(2), rng);
    auto tree = Gen(f, Tree(), rng);
    CHECK(SerializeShare(naive[0]) != SerializeShare(tree[0]));
    for (u128 x = 0; x < (u128{1} << n); ++x) {
      CHECK(Reconstruct(naive, x) == Reconstruct(tree, x));
    }
  }
}

TEST_CASE("interval edges on the tree backend") {
  SeededRandom rng(17);
  Group g(64);
  GroupElement y(0xdeadbeef, g);
  const unsigned n = 6;
  const u128 top = 63;
  for (auto [lo, hi] : {std::pair<u128, u128>{0, top}, {0, 0}, {top, top},
                        {5, top}, {0, 5}}) {
    auto f = SecretFunction::Interval(n, lo, hi, y);
    auto shares = Gen(f, Tree(), rng);
    for (u128 x = 0; x <= top; ++x) CHECK(Reconstruct(shares, x) == f(x));
  }
}

TEST_CASE("wide domains on the tree backend") {
  SeededRandom rng(18);
  Group g(128);
  GroupElement y(g.RandomNonZero(rng), g);
  const u128 alpha = (u128{0x0123456789abcdefULL} << 64) | 0xfedcba9876543210ULL;
  auto point = SecretFunction::Point(128, alpha, y);
  auto shares = Gen(point, Tree(), rng);
  CHECK(Reconstruct(shares, alpha) == y);
  CHECK(Reconstruct(shares, alpha + 1).is_zero());
  CHECK(Reconstruct(shares, alpha - 1).is_zero());

  auto top = SecretFunction::Interval(128, alpha, ~u128{0}, y);
  auto top_shares = Gen(top, Tree(), rng);
  CHECK(Reconstruct(top_shares, ~u128{0}) == y);
  CHECK(Reconstruct(top_shares, alpha) == y);
  CHECK(Reconstruct(top_shares, alpha - 1).is_zero());
}

TEST_CASE("sum shares evaluate to the sum of their parts") {
  SeededRandom rng(19);
  Group g(64);
  for (const auto& opts : {Naive(3), Tree()}) {
    for (int rep = 0; rep < 10; ++rep) {
      const unsigned n = 2 + static_cast<unsigned>(rng.Uniform(9));
      GroupElement y(g.RandomNonZero(rng), g);
      auto f = RandomFunction(FunctionKind::kSum, n, y, rng);
      auto shares = Gen(f, opts, rng);
      for (const auto& share : shares) {
        const auto& parts = std::get<SumShare>(share.payload()).parts;
        for (u128 x = 0; x < (u128{1} << n); ++x) {
          GroupElement acc(0, g);
          for (const auto& part : parts) acc = acc + part.Eval(x);
          CHECK(acc == share.Eval(x));
        }
      }
    }
  }
}

TEST_CASE("single naive share is uniform at the secret point") {
  SeededRandom rng(20);
  Group g(8);
  std::vector<std::uint64_t> first(256, 0), second(256, 0);
  for (int i = 0; i < 20000; ++i) {
    auto f = SecretFunction::Point(3, 6, GroupElement(0x5a, g));
    auto shares = Gen(f, Naive(2), rng);
    ++first[static_cast<std::size_t>(shares[0].Eval(6).value())];
    ++second[static_cast<std::size_t>(shares[1].Eval(6).value())];
  }
  CHECK(testing::UniformityPValue(first) > 0.01);
  CHECK(testing::UniformityPValue(second) > 0.01);
}

TEST_CASE("gen rejects unsupported configurations") {
  SeededRandom rng(21);
  Group g(64);
  auto f = SecretFunction::Point(4, 1, GroupElement(1, g));
  CHECK_THROWS_AS(Gen(f, {.backend = Backend::kTree, .party_count = 3}, rng),
                  UnsupportedError);
  CHECK_THROWS_AS(Gen(f, Naive(1), rng), ConfigError);
  auto wide = SecretFunction::Point(25, 1, GroupElement(1, g));
  CHECK_THROWS_AS(Gen(wide, Naive(2), rng), ResourceError);
  CHECK_THROWS_AS(Gen(f, {.backend = Backend::kNaive,
                          .party_count = 2,
                          .naive_max_domain_bits = 3},
                      rng),
                  ResourceError);
}

TEST_CASE("secret function validation") {
  Group g(8);
  GroupElement y(1, g);
  CHECK_THROWS_AS(SecretFunction::Point(4, 16, y), InputError);
  CHECK_THROWS_AS(SecretFunction::Interval(4, 5, 4, y), InputError);
  CHECK_THROWS_AS(SecretFunction::Interval(4, 0, 16, y), InputError);
  CHECK_THROWS_AS(SecretFunction::Point(0, 0, y), InputError);
  auto a = SecretFunction::Interval(6, 1, 10, y);
  auto b = SecretFunction::Point(6, 10, y);
  const SecretFunction overlapping[] = {a, b};
  CHECK_THROWS_AS(SecretFunction::Sum(overlapping), InputError);
  auto c = SecretFunction::Point(6, 11, GroupElement(2, g));
  const SecretFunction mixed_y[] = {a, c};
  CHECK_THROWS_AS(SecretFunction::Sum(mixed_y), InputError);
}

TEST_CASE("eval rejects inputs outside the domain") {
  SeededRandom rng(22);
  Group g(64);
  auto f = SecretFunction::Point(4, 1, GroupElement(1, g));
  for (const auto& opts : {Naive(2), Tree()}) {
    auto shares = Gen(f, opts, rng);
    CHECK_THROWS_AS(shares[0].Eval(16), InputError);
  }
}

TEST_CASE("serialization round-trips random shares") {
  SeededRandom rng(23);
  for (int i = 0; i < 1000; ++i) {
    const unsigned lambda = 1 + static_cast<unsigned>(rng.Uniform(128));
    Group g(lambda);
    const unsigned n = 1 + static_cast<unsigned>(rng.Uniform(8));
    GroupElement y(g.Random(rng), g);
    auto kind = static_cast<FunctionKind>(1 + rng.Uniform(3));
    auto f = RandomFunction(kind, n, y, rng);
    const bool tree = rng.Coin();
    auto shares = Gen(f, tree ? Tree() : Naive(2 + static_cast<unsigned>(rng.Uniform(3))), rng);
    const auto& share = shares[rng.Uniform(shares.size())];
    const Bytes bytes = SerializeShare(share);
    CHECK(bytes[0] == kShareFormatVersion);
    CHECK(bytes[1] == static_cast<std::uint8_t>(share.backend()));
    const FunctionShare decoded = DeserializeShare(bytes);
    CHECK(SerializeShare(decoded) == bytes);
    const u128 x = rng.Uniform(std::uint64_t{1} << n);
    CHECK(decoded.Eval(x) == share.Eval(x));
  }
}

TEST_CASE("tree key size is linear in the domain") {
  SeededRandom rng(24);
  Group g(64);
  GroupElement y(5, g);
  auto s16 = SerializeShare(Gen(SecretFunction::Point(16, 3, y), Tree(), rng)[0]);
  auto s32 = SerializeShare(Gen(SecretFunction::Point(32, 3, y), Tree(), rng)[0]);
  // header + root seed + n * (seed + flags) + final word
  CHECK(s16.size() == 8 + 16 + 16 * 17 + 8);
  CHECK(s32.size() == 8 + 16 + 32 * 17 + 8);
  auto naive = SerializeShare(Gen(SecretFunction::Point(6, 3, y), Naive(2), rng)[0]);
  CHECK(naive.size() == 8 + 64 * 8);
}

TEST_CASE("deserialization errors") {
  SeededRandom rng(25);
  Group g(64);
  auto shares = Gen(SecretFunction::Point(5, 3, GroupElement(9, g)), Tree(), rng);
  Bytes bytes = SerializeShare(shares[0]);

  CHECK_THROWS_AS(DeserializeShare(Bytes{}), DecodeError);

  Bytes bad_version = bytes;
  bad_version[0] = 7;
  try {
    DeserializeShare(bad_version);
    FAIL("expected a decode error");
  } catch (const DecodeError& e) {
    const std::string what = e.what();
    CHECK(what.find("expected 1") != std::string::npos);
    CHECK(what.find("got 7") != std::string::npos);
    CHECK(e.offset() == 0);
  }

  Bytes bad_backend = bytes;
  bad_backend[1] = 9;
  CHECK_THROWS_AS(DeserializeShare(bad_backend), DecodeError);

  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    CHECK_THROWS_AS(DeserializeShare(std::span(bytes).first(cut)), DecodeError);
  }
  Bytes trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(DeserializeShare(trailing), DecodeError);
}

TEST_CASE("fixed-key AES matches OpenSSL") {
  const unsigned char key[16] = {'p', 'i', 'q', 'l', 'b', '/', 'p', 'r',
                                 'g', '/', 'k', 'e', 'y', '/', 'v', '1'};
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  REQUIRE(EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key, nullptr) == 1);
  EVP_CIPHER_CTX_set_padding(ctx, 0);
  SeededRandom rng(26);
  for (int i = 0; i < 100; ++i) {
    const u128 block = rng.NextU128();
    unsigned char in[16], out[16];
    for (int b = 0; b < 16; ++b) in[b] = static_cast<unsigned char>(block >> (8 * b));
    int len = 0;
    REQUIRE(EVP_EncryptUpdate(ctx, out, &len, in, 16) == 1);
    u128 expected = 0;
    for (int b = 0; b < 16; ++b) expected |= static_cast<u128>(out[b]) << (8 * b);
    CHECK(prg::FixedKeyAes(block) == expected);
  }
  EVP_CIPHER_CTX_free(ctx);
}

TEST_CASE("PRG outputs match the pinned test vectors") {
  std::ifstream in(std::string(PIQLB_TEST_DATA_DIR) + "/prg_vectors.hex");
  REQUIRE(in.good());
  auto block = [](const std::string& hex) {
    Bytes b = FromHex(hex);
    u128 v = 0;
    for (int i = 0; i < 16; ++i) v |= static_cast<u128>(b[i]) << (8 * i);
    return v;
  };
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string seed, c0, c1, v0, v1, conv;
    fields >> seed >> c0 >> c1 >> v0 >> v1 >> conv;
    const u128 s = block(seed);
    const auto left = prg::ExpandChild(s, false);
    const auto right = prg::ExpandChild(s, true);
    CHECK(left.seed == (block(c0) & prg::kSeedMask));
    CHECK(left.control == ((block(c0) & 1) != 0));
    CHECK(right.seed == (block(c1) & prg::kSeedMask));
    CHECK(right.control == ((block(c1) & 1) != 0));
    CHECK(prg::ExpandValue(s, false) == block(v0));
    CHECK(prg::ExpandValue(s, true) == block(v1));
    CHECK(prg::Convert(s) == block(conv));
    ++rows;
  }
  CHECK(rows == 32);
}

}  // namespace
}  // namespace piqlb::fss
