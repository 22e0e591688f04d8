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

#include "piqlb/prg.hpp"

#include <array>
#include <cstring>

#include "piqlb/error.hpp"

#if defined(__AES__) && defined(__SSE2__)
#include <wmmintrin.h>
#define PIQLB_PRG_AESNI 1
#else
#include <openssl/evp.h>
#endif

namespace piqlb::prg {
namespace {

constexpr std::array<std::uint8_t, 16> kKey = {'p', 'i', 'q', 'l', 'b', '/',
                                               'p', 'r', 'g', '/', 'k', 'e',
                                               'y', '/', 'v', '1'};

#ifdef PIQLB_PRG_AESNI

template <int kRcon>
__m128i ExpandRound(__m128i key) {
  __m128i t = _mm_aeskeygenassist_si128(key, kRcon);
  t = _mm_shuffle_epi32(t, 0xff);
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  return _mm_xor_si128(key, t);
}

struct RoundKeys {
  __m128i k[11];

  RoundKeys() {
    k[0] = _mm_loadu_si128(reinterpret_cast<const __m128i*>(kKey.data()));
    k[1] = ExpandRound<0x01>(k[0]);
    k[2] = ExpandRound<0x02>(k[1]);
    k[3] = ExpandRound<0x04>(k[2]);
    k[4] = ExpandRound<0x08>(k[3]);
    k[5] = ExpandRound<0x10>(k[4]);
    k[6] = ExpandRound<0x20>(k[5]);
    k[7] = ExpandRound<0x40>(k[6]);
    k[8] = ExpandRound<0x80>(k[7]);
    k[9] = ExpandRound<0x1b>(k[8]);
    k[10] = ExpandRound<0x36>(k[9]);
  }
};

const RoundKeys& Keys() {
  static const RoundKeys keys;
  return keys;
}

#else

struct CipherContext {
  EVP_CIPHER_CTX* ctx;
  CipherContext() : ctx(EVP_CIPHER_CTX_new()) {
    if (ctx == nullptr ||
        EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, kKey.data(),
                           nullptr) != 1) {
      throw Error("failed to initialise AES-128");
    }
    EVP_CIPHER_CTX_set_padding(ctx, 0);
  }
  ~CipherContext() { EVP_CIPHER_CTX_free(ctx); }
  CipherContext(const CipherContext&) = delete;
  CipherContext& operator=(const CipherContext&) = delete;
};

#endif

}  // namespace

u128 FixedKeyAes(u128 block) {
#ifdef PIQLB_PRG_AESNI
  const auto& keys = Keys().k;
  __m128i b;
  std::memcpy(&b, &block, sizeof(b));
  b = _mm_xor_si128(b, keys[0]);
  for (int r = 1; r < 10; ++r) b = _mm_aesenc_si128(b, keys[r]);
  b = _mm_aesenclast_si128(b, keys[10]);
  u128 out;
  std::memcpy(&out, &b, sizeof(out));
  return out;
#else
  thread_local CipherContext cipher;
  std::array<std::uint8_t, 16> in, out;
  for (int i = 0; i < 16; ++i) in[i] = static_cast<std::uint8_t>(block >> (8 * i));
  int len = 0;
  if (EVP_EncryptUpdate(cipher.ctx, out.data(), &len, in.data(), 16) != 1) {
    throw Error("AES-128 encryption failed");
  }
  u128 v = 0;
  for (int i = 0; i < 16; ++i) v |= static_cast<u128>(out[i]) << (8 * i);
  return v;
#endif
}

const char* BackendName() {
#ifdef PIQLB_PRG_AESNI
  return "aes-ni";
#else
  return "openssl";
#endif
}

}  // namespace piqlb::prg
