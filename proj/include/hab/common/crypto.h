#pragma once

// Thin wrappers over OpenSSL primitives used across the project.

#include <array>
#include <cstdint>
#include <string>

#include "hab/common/bytes.h"

namespace hab::crypto {

using Digest = std::array<std::uint8_t, 32>;

}  // namespace hab::crypto

namespace hab {

crypto::Digest sha256(ByteView data);
inline crypto::Digest sha256(std::string_view s) {
  return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace hab

namespace hab::crypto {

Digest hmac_sha256(ByteView key, ByteView data);

bool constant_time_equal(ByteView a, ByteView b);

inline constexpr std::size_t kAeadKeySize = 32;
inline constexpr std::size_t kAeadNonceSize = 12;
inline constexpr std::size_t kAeadTagSize = 16;

/// AES-256-GCM. Output is ciphertext followed by the 16-byte tag.
Bytes aead_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext);
/// Throws Error(kIntegrityFailure) when the tag does not verify.
Bytes aead_open(ByteView key, ByteView nonce, ByteView aad, ByteView sealed);

struct ScryptCost {
  std::uint64_t n = 1u << 14;
  std::uint64_t r = 8;
  std::uint64_t p = 1;
};

/// Memory-hard password hash.
Bytes scrypt(std::string_view password, ByteView salt, const ScryptCost& cost,
             std::size_t out_len = 32);

/// Ed25519 keypair; raw 32-byte encodings.
struct SigningKey {
  Bytes private_key;
  Bytes public_key;
};

SigningKey ed25519_generate();
SigningKey ed25519_from_seed(ByteView seed32);
Bytes ed25519_sign(const SigningKey& key, ByteView message);
bool ed25519_verify(ByteView public_key, ByteView message, ByteView signature);

}  // namespace hab::crypto
