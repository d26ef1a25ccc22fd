#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hab/common/bytes.h"
#include "hab/common/random.h"

namespace hab::abe {

/// Affine point on y^2 = x^3 + x over F_q; the default value is the point at infinity.
struct G1 {
  mpz_class x;
  mpz_class y;
  bool infinity = true;

  friend bool operator==(const G1& a, const G1& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x == b.x && a.y == b.y;
  }
};

/// Element a + b*i of F_{q^2} (i^2 = -1). Pairing values live in its order-r subgroup.
struct GT {
  mpz_class a;
  mpz_class b;

  friend bool operator==(const GT& l, const GT& r) { return l.a == r.a && l.b == r.b; }
};

using Scalar = mpz_class;

/// Counts of expensive group operations on the calling thread.
struct OpCounts {
  std::uint64_t g1_mul = 0;
  std::uint64_t gt_pow = 0;
  std::uint64_t miller_loops = 0;
  std::uint64_t final_exps = 0;
  std::uint64_t hash_to_g1 = 0;

  std::uint64_t total() const { return g1_mul + gt_pow + miller_loops + final_exps + hash_to_g1; }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

OpCounts& thread_op_counts();

/// Pairing input pair for multi-pairing products.
struct PairingTerm {
  const G1* p;
  const G1* q;
};

/// Symmetric (Type A) pairing group: supersingular curve y^2 = x^3 + x over F_q with
/// q = 3 mod 4, a prime-order-r subgroup G1, and the reduced Tate pairing composed with
/// the distortion map (x, y) -> (-x, i*y). Groups are process-wide singletons per level.
class Group {
 public:
  static const Group& for_level(int security_level);
  static bool supported_level(int security_level);
  static std::vector<int> supported_levels();

  int level() const { return level_; }
  const mpz_class& q() const { return q_; }
  const mpz_class& r() const { return r_; }
  const mpz_class& cofactor() const { return h_; }
  std::size_t field_bytes() const { return field_bytes_; }
  std::size_t scalar_bytes() const { return scalar_bytes_; }

  // Scalars (mod r)
  Scalar random_scalar(RandomSource& rng) const;
  Scalar scalar_inverse(const Scalar& a) const;
  Scalar scalar_mod(const mpz_class& a) const;

  // G1
  bool on_curve(const G1& p) const;
  G1 add(const G1& a, const G1& b) const;
  G1 negate(const G1& p) const;
  G1 mul(const G1& p, const Scalar& k) const;
  G1 random_g1(RandomSource& rng) const;
  G1 hash_to_g1(std::string_view domain, ByteView message) const;
  /// Memoized hash of an attribute name; attribute points are public and level-wide.
  const G1& attribute_point(const std::string& attribute) const;

  // GT
  GT gt_one() const;
  GT gt_mul(const GT& a, const GT& b) const;
  GT gt_pow(const GT& a, const Scalar& k) const;
  GT gt_inverse(const GT& a) const;
  bool gt_valid(const GT& a) const;

  GT pair(const G1& p, const G1& q) const;
  /// Product of pairings with a single final exponentiation; exponents apply per term.
  GT pair_product(const std::vector<PairingTerm>& terms,
                  const std::vector<const Scalar*>& exponents = {}) const;

  // Canonical encodings: G1 = tag byte (0 = infinity, 4 = affine) + x + y (fixed width);
  // GT = a + b (fixed width); scalars fixed width. All big-endian.
  void encode(ByteWriter& w, const G1& p) const;
  void encode(ByteWriter& w, const GT& e) const;
  void encode_scalar(ByteWriter& w, const Scalar& s) const;
  G1 decode_g1(ByteReader& r) const;
  GT decode_gt(ByteReader& r) const;
  Scalar decode_scalar(ByteReader& r) const;

  Group(int level, const char* q_hex, const char* r_hex, const char* h_hex);

 private:
  struct Jacobian;
  class Field;

  G1 to_affine(const Jacobian& j) const;
  void miller(const G1& p, const G1& q, GT& f) const;
  GT final_exp(const GT& f) const;
  GT unitary_pow(const GT& a, const mpz_class& e) const;

  int level_;
  mpz_class q_, r_, h_;
  mpz_class sqrt_exp_;  // (q + 1) / 4
  std::size_t field_bytes_;
  std::size_t scalar_bytes_;
  std::shared_ptr<const Field> field_;

  mutable std::shared_mutex cache_mu_;
  mutable std::unordered_map<std::string, std::unique_ptr<G1>> attribute_cache_;
};

}  // namespace hab::abe
