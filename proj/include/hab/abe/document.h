#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hab/abe/cpabe.h"

namespace hab::abe {

/// CP-ABE wrap of a document's data-encryption key under one policy.
struct KeyWrap {
  PolicyTree policy;
  AbeCiphertext wrapped_dek;

  Bytes serialize() const;
  static KeyWrap deserialize(ByteView data);
};

/// Hybrid ciphertext. Wire format (big-endian):
///   "HABE" | version u8 | doc_id[16] | u32 len | policy text | u32 len | wrapped DEK |
///   nonce[12] | u64 len | AES-256-GCM ciphertext||tag
/// The body is authenticated with doc_id as associated data.
struct EncryptedDocument {
  Id128 doc_id;
  KeyWrap header;
  std::array<std::uint8_t, 12> nonce{};
  Bytes body;

  Bytes serialize() const;
  static EncryptedDocument deserialize(ByteView data);
};

/// A document plus further wraps of the same data key (owner copy, break-glass access).
struct SealedDocument {
  EncryptedDocument document;
  std::vector<KeyWrap> extra_wraps;
};

/// Throws Error(kInvalidArgument) for an empty plaintext.
EncryptedDocument encrypt(const PublicParams& pp, const PolicyTree& policy, ByteView plaintext,
                          RandomSource& rng = system_random());

/// Encrypts once and wraps the data key under `policy` and under each of `extra_policies`.
SealedDocument encrypt_with_wraps(const PublicParams& pp, const PolicyTree& policy,
                                  const std::vector<PolicyTree>& extra_policies,
                                  ByteView plaintext, RandomSource& rng = system_random());

/// Same document body under a different key wrap (e.g. the emergency wrap).
EncryptedDocument rewrap(const EncryptedDocument& doc, KeyWrap header);

/// Unwraps the data key of `doc` with `key` (checking it against the body tag) and wraps it
/// again under `policy`. Throws like decrypt().
KeyWrap rewrap_key(const PublicParams& pp, const UserKey& key, const EncryptedDocument& doc,
                   const PolicyTree& policy, RandomSource& rng = system_random());

/// Throws Error(kNotSatisfied) or Error(kIntegrityFailure).
Bytes decrypt(const PublicParams& pp, const UserKey& key, const EncryptedDocument& doc);

}  // namespace hab::abe
