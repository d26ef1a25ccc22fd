#include "hab/common/crypto.h"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/kdf.h>

#include <memory>

#include "hab/common/error.h"
#include "hab/common/random.h"

namespace hab {

crypto::Digest sha256(ByteView data) {
  crypto::Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::kStorageFailure, "EVP_Digest failed");
  return out;
}

}  // namespace hab

namespace hab::crypto {

namespace {

struct CipherCtxFree {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree>;

struct PkeyFree {
  void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
using Pkey = std::unique_ptr<EVP_PKEY, PkeyFree>;

struct MdCtxFree {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;

[[noreturn]] void openssl_fail(const char* what) {
  throw Error(ErrorCode::kStorageFailure, std::string("openssl: ") + what);
}

void check_aead_params(ByteView key, ByteView nonce) {
  if (key.size() != kAeadKeySize) throw Error(ErrorCode::kInvalidArgument, "AEAD key must be 32 bytes");
  if (nonce.size() != kAeadNonceSize)
    throw Error(ErrorCode::kInvalidArgument, "AEAD nonce must be 12 bytes");
}

}  // namespace

Digest hmac_sha256(ByteView key, ByteView data) {
  Digest out{};
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
            out.data(), &len))
    openssl_fail("HMAC");
  return out;
}

bool constant_time_equal(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

Bytes aead_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext) {
  check_aead_params(key, nonce);
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) openssl_fail("EVP_CIPHER_CTX_new");
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
    openssl_fail("EncryptInit");
  int len = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
    openssl_fail("EncryptUpdate(aad)");
  Bytes out(plaintext.size() + kAeadTagSize);
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1)
    openssl_fail("EncryptUpdate");
  int total = len;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) openssl_fail("EncryptFinal");
  total += len;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagSize, out.data() + total) != 1)
    openssl_fail("GET_TAG");
  out.resize(static_cast<std::size_t>(total) + kAeadTagSize);
  return out;
}

Bytes aead_open(ByteView key, ByteView nonce, ByteView aad, ByteView sealed) {
  check_aead_params(key, nonce);
  if (sealed.size() < kAeadTagSize) throw Error(ErrorCode::kIntegrityFailure, "ciphertext too short");
  const std::size_t body = sealed.size() - kAeadTagSize;
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) openssl_fail("EVP_CIPHER_CTX_new");
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
    openssl_fail("DecryptInit");
  int len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
    openssl_fail("DecryptUpdate(aad)");
  Bytes out(body + 1);
  if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(body)) != 1)
    openssl_fail("DecryptUpdate");
  int total = len;
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagSize, tag.data()) != 1)
    openssl_fail("SET_TAG");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1)
    throw Error(ErrorCode::kIntegrityFailure, "authentication tag mismatch");
  total += len;
  out.resize(static_cast<std::size_t>(total));
  return out;
}

Bytes scrypt(std::string_view password, ByteView salt, const ScryptCost& cost, std::size_t out_len) {
  Bytes out(out_len);
  // maxmem must cover 128 * r * N plus the p blocks.
  const std::uint64_t maxmem = 128 * cost.r * (cost.n + cost.p + 2) + (1u << 20);
  if (EVP_PBE_scrypt(password.data(), password.size(), salt.data(), salt.size(), cost.n, cost.r,
                     cost.p, maxmem, out.data(), out.size()) != 1)
    openssl_fail("EVP_PBE_scrypt");
  return out;
}

SigningKey ed25519_from_seed(ByteView seed32) {
  if (seed32.size() != 32) throw Error(ErrorCode::kInvalidArgument, "ed25519 seed must be 32 bytes");
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed32.data(), seed32.size()));
  if (!key) openssl_fail("new_raw_private_key");
  SigningKey out;
  out.private_key.assign(seed32.begin(), seed32.end());
  std::size_t len = 32;
  out.public_key.resize(32);
  if (EVP_PKEY_get_raw_public_key(key.get(), out.public_key.data(), &len) != 1)
    openssl_fail("get_raw_public_key");
  return out;
}

SigningKey ed25519_generate() {
  Bytes seed = system_random().bytes(32);
  return ed25519_from_seed(seed);
}

Bytes ed25519_sign(const SigningKey& key, ByteView message) {
  Pkey pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, key.private_key.data(),
                                         key.private_key.size()));
  if (!pkey) openssl_fail("new_raw_private_key");
  MdCtx ctx(EVP_MD_CTX_new());
  if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1)
    openssl_fail("DigestSignInit");
  Bytes sig(64);
  std::size_t len = sig.size();
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1)
    openssl_fail("DigestSign");
  sig.resize(len);
  return sig;
}

bool ed25519_verify(ByteView public_key, ByteView message, ByteView signature) {
  if (public_key.size() != 32 || signature.size() != 64) return false;
  Pkey pkey(
      EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
  if (!pkey) return false;
  MdCtx ctx(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

}  // namespace hab::crypto
