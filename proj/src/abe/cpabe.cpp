#include "hab/abe/cpabe.h"

#include <algorithm>
#include <limits>

#include "hab/common/error.h"

namespace hab::abe {

namespace {

constexpr std::uint8_t kFormatVersion = 1;

void check_level(int level) {
  if (!Group::supported_level(level))
    throw Error(ErrorCode::kUnsupportedLevel, "unsupported security level " + std::to_string(level));
}

// Lagrange coefficient at 0 for index i over the index set `indices`, mod r.
Scalar lagrange_at_zero(const Group& grp, int i, const std::vector<int>& indices) {
  Scalar num = 1, den = 1;
  for (int j : indices) {
    if (j == i) continue;
    num = grp.scalar_mod(num * (-j));
    den = grp.scalar_mod(den * (i - j));
  }
  return grp.scalar_mod(num * grp.scalar_inverse(den));
}

// Shares q_node(0) down the tree; leaf values are emitted in pre-order.
void share_secret(const Group& grp, const PolicyTree& node, const Scalar& secret,
                  RandomSource& rng, std::vector<Scalar>& leaf_values) {
  if (node.is_leaf()) {
    leaf_values.push_back(secret);
    return;
  }
  // Polynomial of degree k-1 with constant term `secret`.
  std::vector<Scalar> coeffs{secret};
  for (int i = 1; i < node.k(); ++i) coeffs.push_back(grp.random_scalar(rng));
  for (std::size_t idx = 0; idx < node.children().size(); ++idx) {
    const Scalar x = static_cast<unsigned long>(idx + 1);
    Scalar y = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = grp.scalar_mod(y * x + *it);
    share_secret(grp, node.children()[idx], y, rng, leaf_values);
  }
}

// Minimal-leaf satisfying selection: for each satisfiable node, keep the k children that
// use the fewest leaves. Returns leaf cost or max() when unsatisfiable.
struct Selection {
  std::size_t cost = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> chosen;  // child positions (0-based)
  std::vector<Selection> children;
};

Selection select(const PolicyTree& node, const UserKey& key) {
  Selection sel;
  if (node.is_leaf()) {
    if (key.components.contains(node.attribute())) sel.cost = 1;
    return sel;
  }
  sel.children.reserve(node.children().size());
  for (const auto& child : node.children()) sel.children.push_back(select(child, key));
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < sel.children.size(); ++i)
    if (sel.children[i].cost != std::numeric_limits<std::size_t>::max()) order.push_back(i);
  if (order.size() < static_cast<std::size_t>(node.k())) return sel;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sel.children[a].cost < sel.children[b].cost;
  });
  order.resize(static_cast<std::size_t>(node.k()));
  std::sort(order.begin(), order.end());
  sel.cost = 0;
  for (auto i : order) sel.cost += sel.children[i].cost;
  sel.chosen = std::move(order);
  return sel;
}

struct UsedLeaf {
  std::size_t leaf_index;  // pre-order index into the ciphertext leaves
  const std::string* attribute;
  Scalar coefficient;
};

void collect(const Group& grp, const PolicyTree& node, const Selection& sel, const Scalar& coeff,
             std::size_t& leaf_cursor, std::vector<UsedLeaf>& out, bool used) {
  if (node.is_leaf()) {
    if (used) out.push_back({leaf_cursor, &node.attribute(), coeff});
    ++leaf_cursor;
    return;
  }
  std::vector<int> indices;
  for (auto i : sel.chosen) indices.push_back(static_cast<int>(i) + 1);
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    const bool child_used = used && std::binary_search(sel.chosen.begin(), sel.chosen.end(), i);
    Scalar child_coeff = 0;
    if (child_used)
      child_coeff =
          grp.scalar_mod(coeff * lagrange_at_zero(grp, static_cast<int>(i) + 1, indices));
    collect(grp, node.children()[i], sel.children[i], child_coeff, leaf_cursor, out, child_used);
  }
}

}  // namespace

Bytes PublicParams::serialize() const {
  const Group& grp = group();
  ByteWriter w;
  w.raw("HABP");
  w.u8(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(level));
  grp.encode(w, g);
  grp.encode(w, h);
  grp.encode(w, f);
  grp.encode(w, egg_alpha);
  return std::move(w).take();
}

PublicParams PublicParams::deserialize(ByteView data) {
  ByteReader r(data);
  r.expect("HABP");
  if (r.u8() != kFormatVersion) throw Error(ErrorCode::kMalformed, "unknown public params version");
  PublicParams pp;
  pp.level = r.u16();
  check_level(pp.level);
  const Group& grp = pp.group();
  pp.g = grp.decode_g1(r);
  pp.h = grp.decode_g1(r);
  pp.f = grp.decode_g1(r);
  pp.egg_alpha = grp.decode_gt(r);
  r.expect_end();
  return pp;
}

Bytes MasterSecret::serialize() const {
  const Group& grp = group();
  ByteWriter w;
  w.raw("HABM");
  w.u8(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(level));
  grp.encode_scalar(w, beta);
  grp.encode(w, g_alpha);
  return std::move(w).take();
}

MasterSecret MasterSecret::deserialize(ByteView data) {
  ByteReader r(data);
  r.expect("HABM");
  if (r.u8() != kFormatVersion) throw Error(ErrorCode::kMalformed, "unknown master secret version");
  MasterSecret msk;
  msk.level = r.u16();
  check_level(msk.level);
  const Group& grp = msk.group();
  msk.beta = grp.decode_scalar(r);
  msk.g_alpha = grp.decode_g1(r);
  r.expect_end();
  return msk;
}

AttributeSet UserKey::attributes() const {
  AttributeSet out;
  for (const auto& [name, _] : components) out.insert(name);
  return out;
}

Bytes UserKey::serialize() const {
  const Group& grp = Group::for_level(level);
  ByteWriter w;
  w.raw("HABK");
  w.u8(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(level));
  w.raw(key_id.raw());
  grp.encode(w, d);
  w.u16(static_cast<std::uint16_t>(components.size()));
  for (const auto& [name, comp] : components) {
    w.str16(name);
    grp.encode(w, comp.d);
    grp.encode(w, comp.d_prime);
  }
  return std::move(w).take();
}

UserKey UserKey::deserialize(ByteView data) {
  ByteReader r(data);
  r.expect("HABK");
  if (r.u8() != kFormatVersion) throw Error(ErrorCode::kMalformed, "unknown key version");
  UserKey key;
  key.level = r.u16();
  check_level(key.level);
  const Group& grp = Group::for_level(key.level);
  key.key_id = Id128::from_bytes(r.raw(16));
  key.d = grp.decode_g1(r);
  const std::uint16_t n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    std::string name = r.str16();
    KeyComponent comp;
    comp.d = grp.decode_g1(r);
    comp.d_prime = grp.decode_g1(r);
    key.components.emplace(normalize_attribute(name), std::move(comp));
  }
  r.expect_end();
  return key;
}

Bytes AbeCiphertext::serialize() const {
  const Group& grp = Group::for_level(level);
  ByteWriter w;
  w.raw("HABC");
  w.u8(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(level));
  grp.encode(w, c_tilde);
  grp.encode(w, c);
  w.u16(static_cast<std::uint16_t>(leaves.size()));
  for (const auto& leaf : leaves) {
    grp.encode(w, leaf.c);
    grp.encode(w, leaf.c_prime);
  }
  return std::move(w).take();
}

AbeCiphertext AbeCiphertext::deserialize(ByteView data) {
  ByteReader r(data);
  r.expect("HABC");
  if (r.u8() != kFormatVersion) throw Error(ErrorCode::kMalformed, "unknown ciphertext version");
  AbeCiphertext ct;
  ct.level = r.u16();
  check_level(ct.level);
  const Group& grp = Group::for_level(ct.level);
  ct.c_tilde = grp.decode_gt(r);
  ct.c = grp.decode_g1(r);
  const std::uint16_t n = r.u16();
  ct.leaves.resize(n);
  for (auto& leaf : ct.leaves) {
    leaf.c = grp.decode_g1(r);
    leaf.c_prime = grp.decode_g1(r);
  }
  r.expect_end();
  return ct;
}

KeyPair setup(int security_level, RandomSource& rng) {
  check_level(security_level);
  const Group& grp = Group::for_level(security_level);
  KeyPair kp;
  PublicParams& pp = kp.public_params;
  MasterSecret& msk = kp.master_secret;
  pp.level = msk.level = security_level;
  const Scalar alpha = grp.random_scalar(rng);
  msk.beta = grp.random_scalar(rng);
  pp.g = grp.random_g1(rng);
  pp.h = grp.mul(pp.g, msk.beta);
  pp.f = grp.mul(pp.g, grp.scalar_inverse(msk.beta));
  msk.g_alpha = grp.mul(pp.g, alpha);
  pp.egg_alpha = grp.pair(pp.g, msk.g_alpha);
  return kp;
}

UserKey keygen(const PublicParams& pp, const MasterSecret& msk, const AttributeSet& attributes,
               RandomSource& rng) {
  if (attributes.empty()) throw Error(ErrorCode::kInvalidArgument, "attribute set must be non-empty");
  if (pp.level != msk.level) throw Error(ErrorCode::kInvalidArgument, "parameter level mismatch");
  const Group& grp = pp.group();
  UserKey key;
  key.level = pp.level;
  Bytes id = rng.bytes(16);
  key.key_id = Id128::from_bytes(id);
  const Scalar r = grp.random_scalar(rng);
  const G1 g_r = grp.mul(pp.g, r);
  key.d = grp.mul(grp.add(msk.g_alpha, g_r), grp.scalar_inverse(msk.beta));
  for (const auto& name : attributes.names()) {
    const Scalar r_j = grp.random_scalar(rng);
    KeyComponent comp;
    comp.d = grp.add(g_r, grp.mul(grp.attribute_point(name), r_j));
    comp.d_prime = grp.mul(pp.g, r_j);
    key.components.emplace(name, std::move(comp));
  }
  return key;
}

AbeCiphertext encrypt_element(const PublicParams& pp, const PolicyTree& policy, const GT& message,
                              RandomSource& rng) {
  const auto names = policy.leaves();
  for (const auto& name : names)
    if (name.empty()) throw Error(ErrorCode::kInvalidArgument, "policy has an empty leaf");
  const Group& grp = pp.group();
  AbeCiphertext ct;
  ct.level = pp.level;
  const Scalar s = grp.random_scalar(rng);
  ct.c_tilde = grp.gt_mul(message, grp.gt_pow(pp.egg_alpha, s));
  ct.c = grp.mul(pp.h, s);
  std::vector<Scalar> leaf_values;
  share_secret(grp, policy, s, rng, leaf_values);
  ct.leaves.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    ct.leaves.push_back({grp.mul(pp.g, leaf_values[i]),
                         grp.mul(grp.attribute_point(names[i]), leaf_values[i])});
  }
  return ct;
}

GT decrypt_element(const PublicParams& pp, const UserKey& key, const PolicyTree& policy,
                   const AbeCiphertext& ct) {
  if (key.level != pp.level || ct.level != pp.level)
    throw Error(ErrorCode::kInvalidArgument, "security level mismatch");
  if (ct.leaves.size() != policy.leaf_count())
    throw Error(ErrorCode::kMalformed, "ciphertext does not match policy shape");
  const Group& grp = pp.group();
  Selection sel = select(policy, key);
  if (sel.cost == std::numeric_limits<std::size_t>::max())
    throw Error(ErrorCode::kNotSatisfied, "key attributes do not satisfy the policy");

  std::vector<UsedLeaf> used;
  std::size_t cursor = 0;
  collect(grp, policy, sel, Scalar(1), cursor, used, true);

  // e(C, D)^-1 * prod_y [e(D_j, C_y) / e(D'_j, C'_y)]^coef_y = e(g,g)^(-alpha*s)
  std::vector<G1> negated;
  negated.reserve(used.size() + 1);
  std::vector<PairingTerm> terms;
  std::vector<const Scalar*> exps;
  negated.push_back(grp.negate(ct.c));
  terms.push_back({&negated.back(), &key.d});
  exps.push_back(nullptr);
  for (const auto& leaf : used) {
    const KeyComponent& comp = key.components.find(*leaf.attribute)->second;
    const auto& cl = ct.leaves[leaf.leaf_index];
    negated.push_back(grp.negate(comp.d_prime));
    terms.push_back({&comp.d, &cl.c});
    exps.push_back(&leaf.coefficient);
    terms.push_back({&negated.back(), &cl.c_prime});
    exps.push_back(&leaf.coefficient);
  }
  GT blind = grp.pair_product(terms, exps);
  return grp.gt_mul(ct.c_tilde, blind);
}

}  // namespace hab::abe
