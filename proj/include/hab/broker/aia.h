#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "hab/abe/policy.h"
#include "hab/access/access_control.h"
#include "hab/audit/records.h"
#include "hab/common/crypto.h"

namespace hab::broker {

/// Attribute set certified by an attribute issuing authority for one username.
struct AttributeGrant {
  std::string authority;
  std::string subject;
  access::UserKind kind = access::UserKind::kDataRequestor;
  abe::AttributeSet attributes;
  std::int64_t issued_at_ms = 0;
  Bytes signature;

  /// Bytes covered by the signature.
  Bytes signed_bytes() const;
  audit::Json to_json() const;
  /// Throws Error(kInvalidGrant) for a structurally bad grant.
  static AttributeGrant from_json(const audit::Json& j);
};

/// In-process authority stub holding an Ed25519 signing key.
class AttributeAuthority {
 public:
  AttributeAuthority(std::string name, crypto::SigningKey key);
  static AttributeAuthority generate(std::string name);

  const std::string& name() const { return name_; }
  const Bytes& public_key() const { return key_.public_key; }

  AttributeGrant issue_grant(const std::string& subject, access::UserKind kind,
                             const abe::AttributeSet& attributes, std::int64_t now_ms) const;

  /// Directory of pre-approved enrollments, consulted when a registration arrives without
  /// a grant of its own.
  void enroll(const std::string& subject, access::UserKind kind, abe::AttributeSet attributes);
  std::optional<AttributeGrant> grant_for(const std::string& subject, std::int64_t now_ms) const;

 private:
  std::string name_;
  crypto::SigningKey key_;
  mutable std::mutex mu_;
  std::map<std::string, std::pair<access::UserKind, abe::AttributeSet>> enrolled_;
};

class GrantVerifier {
 public:
  void trust(const std::string& authority, const Bytes& public_key);
  /// Returns the certified attributes. Throws Error(kInvalidGrant) for an unknown authority,
  /// a bad signature or an empty attribute set.
  abe::AttributeSet verify_grant(const AttributeGrant& grant) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Bytes> trusted_;
};

}  // namespace hab::broker
