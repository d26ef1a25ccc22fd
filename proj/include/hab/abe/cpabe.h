#pragma once

// Ciphertext-policy ABE over the Type A pairing group (Bethencourt-Sahai-Waters
// construction). The scheme encrypts a GT element; document.h layers hybrid encryption
// of byte payloads on top.

#include <map>
#include <string>

#include "hab/abe/group.h"
#include "hab/abe/policy.h"
#include "hab/common/bytes.h"
#include "hab/common/random.h"

namespace hab::abe {

inline constexpr int kDefaultSecurityLevel = 128;

struct PublicParams {
  int level = kDefaultSecurityLevel;
  G1 g;          // generator
  G1 h;          // g^beta
  G1 f;          // g^(1/beta)
  GT egg_alpha;  // e(g, g)^alpha

  const Group& group() const { return Group::for_level(level); }
  Bytes serialize() const;
  static PublicParams deserialize(ByteView data);
};

struct MasterSecret {
  int level = kDefaultSecurityLevel;
  Scalar beta;
  G1 g_alpha;

  const Group& group() const { return Group::for_level(level); }
  Bytes serialize() const;
  static MasterSecret deserialize(ByteView data);
};

struct KeyComponent {
  G1 d;        // g^r * H(attr)^r_j
  G1 d_prime;  // g^r_j

  friend bool operator==(const KeyComponent&, const KeyComponent&) = default;
};

/// Private decryption key bound to an attribute set. Components carry the key's issuance
/// randomness; mixing components of different keys does not produce a working key.
struct UserKey {
  int level = kDefaultSecurityLevel;
  Id128 key_id;
  G1 d;  // g^((alpha + r) / beta)
  std::map<std::string, KeyComponent, std::less<>> components;

  AttributeSet attributes() const;
  Bytes serialize() const;
  static UserKey deserialize(ByteView data);
};

/// Ciphertext of one GT element under a policy; leaf components follow the policy's
/// pre-order leaf sequence.
struct AbeCiphertext {
  struct Leaf {
    G1 c;        // g^q_y(0)
    G1 c_prime;  // H(attr)^q_y(0)
  };

  int level = kDefaultSecurityLevel;
  GT c_tilde;  // M * e(g,g)^(alpha*s)
  G1 c;        // h^s
  std::vector<Leaf> leaves;

  Bytes serialize() const;
  static AbeCiphertext deserialize(ByteView data);
};

struct KeyPair {
  PublicParams public_params;
  MasterSecret master_secret;
};

/// Throws Error(kUnsupportedLevel) unless security_level is one of Group::supported_levels().
KeyPair setup(int security_level, RandomSource& rng = system_random());

/// Throws Error(kInvalidArgument) for an empty attribute set.
UserKey keygen(const PublicParams& pp, const MasterSecret& msk, const AttributeSet& attributes,
               RandomSource& rng = system_random());

AbeCiphertext encrypt_element(const PublicParams& pp, const PolicyTree& policy,
                              const GT& message, RandomSource& rng = system_random());

/// Throws Error(kNotSatisfied) when the key's attributes do not satisfy the policy.
/// A key that satisfies the policy but was assembled from several keys yields a wrong
/// element rather than an error; the hybrid layer detects that through the body tag.
GT decrypt_element(const PublicParams& pp, const UserKey& key, const PolicyTree& policy,
                   const AbeCiphertext& ct);

}  // namespace hab::abe
