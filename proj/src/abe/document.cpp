#include "hab/abe/document.h"

#include "hab/common/crypto.h"
#include "hab/common/error.h"

namespace hab::abe {

namespace {

constexpr std::uint8_t kDocumentVersion = 1;

Bytes derive_dek(const PublicParams& pp, const GT& element) {
  ByteWriter w;
  w.raw("hab/dek/v1");
  pp.group().encode(w, element);
  auto digest = sha256(w.bytes());
  return Bytes(digest.begin(), digest.end());
}

GT random_gt(const PublicParams& pp, RandomSource& rng) {
  const Group& grp = pp.group();
  return grp.gt_pow(pp.egg_alpha, grp.random_scalar(rng));
}

EncryptedDocument seal_body(const PublicParams& pp, const GT& element, KeyWrap header,
                            ByteView plaintext, RandomSource& rng) {
  EncryptedDocument doc;
  doc.doc_id = Id128::from_bytes(rng.bytes(16));
  doc.header = std::move(header);
  rng.fill(doc.nonce);
  Bytes dek = derive_dek(pp, element);
  doc.body = crypto::aead_seal(dek, doc.nonce, doc.doc_id.raw(), plaintext);
  return doc;
}

}  // namespace

Bytes KeyWrap::serialize() const {
  ByteWriter w;
  w.blob32(to_bytes(policy.to_string()));
  w.blob32(wrapped_dek.serialize());
  return std::move(w).take();
}

KeyWrap KeyWrap::deserialize(ByteView data) {
  ByteReader r(data);
  Bytes policy = r.blob32();
  Bytes wrapped = r.blob32();
  r.expect_end();
  return KeyWrap{parse_policy(to_string(policy)), AbeCiphertext::deserialize(wrapped)};
}

Bytes EncryptedDocument::serialize() const {
  ByteWriter w;
  w.raw("HABE");
  w.u8(kDocumentVersion);
  w.raw(doc_id.raw());
  w.blob32(to_bytes(header.policy.to_string()));
  w.blob32(header.wrapped_dek.serialize());
  w.raw(nonce);
  w.u64(body.size());
  w.raw(body);
  return std::move(w).take();
}

EncryptedDocument EncryptedDocument::deserialize(ByteView data) {
  ByteReader r(data);
  r.expect("HABE");
  if (r.u8() != kDocumentVersion) throw Error(ErrorCode::kMalformed, "unknown document version");
  EncryptedDocument doc;
  doc.doc_id = Id128::from_bytes(r.raw(16));
  Bytes policy = r.blob32();
  Bytes wrapped = r.blob32();
  auto nonce = r.raw(doc.nonce.size());
  std::copy(nonce.begin(), nonce.end(), doc.nonce.begin());
  const std::uint64_t n = r.u64();
  if (n > r.remaining()) throw Error(ErrorCode::kMalformed, "truncated document body");
  auto body = r.raw(static_cast<std::size_t>(n));
  doc.body.assign(body.begin(), body.end());
  r.expect_end();
  doc.header.policy = parse_policy(to_string(policy));
  doc.header.wrapped_dek = AbeCiphertext::deserialize(wrapped);
  if (doc.header.wrapped_dek.leaves.size() != doc.header.policy.leaf_count())
    throw Error(ErrorCode::kMalformed, "wrapped key does not match policy");
  return doc;
}

EncryptedDocument encrypt(const PublicParams& pp, const PolicyTree& policy, ByteView plaintext,
                          RandomSource& rng) {
  if (plaintext.empty()) throw Error(ErrorCode::kInvalidArgument, "plaintext must be non-empty");
  const GT element = random_gt(pp, rng);
  KeyWrap header{policy, encrypt_element(pp, policy, element, rng)};
  return seal_body(pp, element, std::move(header), plaintext, rng);
}

SealedDocument encrypt_with_wraps(const PublicParams& pp, const PolicyTree& policy,
                                  const std::vector<PolicyTree>& extra_policies,
                                  ByteView plaintext, RandomSource& rng) {
  if (plaintext.empty()) throw Error(ErrorCode::kInvalidArgument, "plaintext must be non-empty");
  const GT element = random_gt(pp, rng);
  KeyWrap header{policy, encrypt_element(pp, policy, element, rng)};
  SealedDocument out;
  out.document = seal_body(pp, element, std::move(header), plaintext, rng);
  for (const auto& extra : extra_policies)
    out.extra_wraps.push_back(KeyWrap{extra, encrypt_element(pp, extra, element, rng)});
  return out;
}

EncryptedDocument rewrap(const EncryptedDocument& doc, KeyWrap header) {
  EncryptedDocument out = doc;
  out.header = std::move(header);
  return out;
}

KeyWrap rewrap_key(const PublicParams& pp, const UserKey& key, const EncryptedDocument& doc,
                   const PolicyTree& policy, RandomSource& rng) {
  const GT element = decrypt_element(pp, key, doc.header.policy, doc.header.wrapped_dek);
  crypto::aead_open(derive_dek(pp, element), doc.nonce, doc.doc_id.raw(), doc.body);
  return KeyWrap{policy, encrypt_element(pp, policy, element, rng)};
}

Bytes decrypt(const PublicParams& pp, const UserKey& key, const EncryptedDocument& doc) {
  const GT element = decrypt_element(pp, key, doc.header.policy, doc.header.wrapped_dek);
  Bytes dek = derive_dek(pp, element);
  return crypto::aead_open(dek, doc.nonce, doc.doc_id.raw(), doc.body);
}

}  // namespace hab::abe
