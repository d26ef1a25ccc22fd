#include "hab/broker/aia.h"

#include "hab/common/error.h"

namespace hab::broker {

Bytes AttributeGrant::signed_bytes() const {
  audit::Json j{{"authority", authority},
                {"subject", subject},
                {"kind", access::user_kind_name(kind)},
                {"attributes", attributes.to_vector()},
                {"issued_at_ms", issued_at_ms}};
  return to_bytes("hab/aia-grant/v1\n" + j.dump());
}

audit::Json AttributeGrant::to_json() const {
  return {{"authority", authority},
          {"subject", subject},
          {"kind", access::user_kind_name(kind)},
          {"attributes", attributes.to_vector()},
          {"issued_at_ms", issued_at_ms},
          {"signature", base64_encode(signature)}};
}

AttributeGrant AttributeGrant::from_json(const audit::Json& j) {
  try {
    AttributeGrant g;
    g.authority = j.at("authority").get<std::string>();
    g.subject = j.at("subject").get<std::string>();
    g.kind = access::parse_user_kind(j.at("kind").get<std::string>());
    g.attributes = abe::AttributeSet(j.at("attributes").get<std::vector<std::string>>());
    g.issued_at_ms = j.at("issued_at_ms").get<std::int64_t>();
    g.signature = base64_decode(j.at("signature").get<std::string>());
    return g;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kInvalidGrant, std::string("malformed attribute grant: ") + e.what());
  }
}

AttributeAuthority::AttributeAuthority(std::string name, crypto::SigningKey key)
    : name_(std::move(name)), key_(std::move(key)) {}

AttributeAuthority AttributeAuthority::generate(std::string name) {
  return AttributeAuthority(std::move(name), crypto::ed25519_generate());
}

AttributeGrant AttributeAuthority::issue_grant(const std::string& subject, access::UserKind kind,
                                               const abe::AttributeSet& attributes,
                                               std::int64_t now_ms) const {
  if (attributes.empty()) throw Error(ErrorCode::kInvalidArgument, "grant needs attributes");
  AttributeGrant g{name_, subject, kind, attributes, now_ms, {}};
  g.signature = crypto::ed25519_sign(key_, g.signed_bytes());
  return g;
}

void AttributeAuthority::enroll(const std::string& subject, access::UserKind kind,
                                abe::AttributeSet attributes) {
  std::lock_guard lock(mu_);
  enrolled_[subject] = {kind, std::move(attributes)};
}

std::optional<AttributeGrant> AttributeAuthority::grant_for(const std::string& subject,
                                                            std::int64_t now_ms) const {
  std::unique_lock lock(mu_);
  auto it = enrolled_.find(subject);
  if (it == enrolled_.end()) return std::nullopt;
  auto [kind, attrs] = it->second;
  lock.unlock();
  return issue_grant(subject, kind, attrs, now_ms);
}

void GrantVerifier::trust(const std::string& authority, const Bytes& public_key) {
  std::lock_guard lock(mu_);
  trusted_[authority] = public_key;
}

abe::AttributeSet GrantVerifier::verify_grant(const AttributeGrant& grant) const {
  Bytes key;
  {
    std::lock_guard lock(mu_);
    auto it = trusted_.find(grant.authority);
    if (it == trusted_.end())
      throw Error(ErrorCode::kInvalidGrant, "grant from untrusted authority " + grant.authority);
    key = it->second;
  }
  if (!crypto::ed25519_verify(key, grant.signed_bytes(), grant.signature))
    throw Error(ErrorCode::kInvalidGrant, "attribute grant signature does not verify");
  if (grant.attributes.empty()) throw Error(ErrorCode::kInvalidGrant, "grant carries no attributes");
  return grant.attributes;
}

}  // namespace hab::broker
