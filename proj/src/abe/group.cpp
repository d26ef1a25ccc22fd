#include "hab/abe/group.h"

#include <array>
#include <map>
#include <mutex>

#include "hab/common/crypto.h"
#include "hab/common/error.h"
#include "type_a_params.h"

namespace hab::abe {

OpCounts& thread_op_counts() {
  thread_local OpCounts counts;
  return counts;
}

// Modular arithmetic over F_q with in-place GMP calls; outputs may alias inputs.
class Group::Field {
 public:
  explicit Field(const mpz_class& q) : q_(q) {}

  const mpz_class& q() const { return q_; }

  void mul(mpz_class& out, const mpz_class& a, const mpz_class& b) const {
    mpz_mul(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_mod(out.get_mpz_t(), out.get_mpz_t(), q_.get_mpz_t());
  }
  void sqr(mpz_class& out, const mpz_class& a) const { mul(out, a, a); }
  void add(mpz_class& out, const mpz_class& a, const mpz_class& b) const {
    mpz_add(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (mpz_cmp(out.get_mpz_t(), q_.get_mpz_t()) >= 0)
      mpz_sub(out.get_mpz_t(), out.get_mpz_t(), q_.get_mpz_t());
  }
  void sub(mpz_class& out, const mpz_class& a, const mpz_class& b) const {
    mpz_sub(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (mpz_sgn(out.get_mpz_t()) < 0) mpz_add(out.get_mpz_t(), out.get_mpz_t(), q_.get_mpz_t());
  }
  void neg(mpz_class& out, const mpz_class& a) const {
    if (mpz_sgn(a.get_mpz_t()) == 0) {
      out = 0;
    } else {
      mpz_sub(out.get_mpz_t(), q_.get_mpz_t(), a.get_mpz_t());
    }
  }
  void mul_ui(mpz_class& out, const mpz_class& a, unsigned long k) const {
    mpz_mul_ui(out.get_mpz_t(), a.get_mpz_t(), k);
    mpz_mod(out.get_mpz_t(), out.get_mpz_t(), q_.get_mpz_t());
  }
  void inv(mpz_class& out, const mpz_class& a) const {
    if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), q_.get_mpz_t()) == 0)
      throw Error(ErrorCode::kInvalidArgument, "field element not invertible");
  }

  // F_{q^2} helpers.
  void mul2(GT& out, const GT& x, const GT& y) const {
    mpz_class t0, t1, t2, t3;
    mul(t0, x.a, y.a);
    mul(t1, x.b, y.b);
    add(t2, x.a, x.b);
    add(t3, y.a, y.b);
    mul(t2, t2, t3);
    sub(out.a, t0, t1);
    sub(t2, t2, t0);
    sub(out.b, t2, t1);
  }
  void sqr2(GT& out, const GT& x) const {
    mpz_class t0, t1, t2;
    add(t0, x.a, x.b);
    sub(t1, x.a, x.b);
    mul(t2, x.a, x.b);
    mul(out.a, t0, t1);
    add(out.b, t2, t2);
  }
  // Squaring of a norm-1 element: (a+bi)^2 = (2a^2 - 1) + ((a+b)^2 - 1) i.
  void sqr_unitary(GT& out, const GT& x) const {
    mpz_class t0, t1;
    sqr(t0, x.a);
    add(t0, t0, t0);
    add(t1, x.a, x.b);
    sqr(t1, t1);
    mpz_sub_ui(out.a.get_mpz_t(), t0.get_mpz_t(), 1);
    if (mpz_sgn(out.a.get_mpz_t()) < 0) mpz_add(out.a.get_mpz_t(), out.a.get_mpz_t(), q_.get_mpz_t());
    mpz_sub_ui(out.b.get_mpz_t(), t1.get_mpz_t(), 1);
    if (mpz_sgn(out.b.get_mpz_t()) < 0) mpz_add(out.b.get_mpz_t(), out.b.get_mpz_t(), q_.get_mpz_t());
  }

 private:
  mpz_class q_;
};

struct Group::Jacobian {
  mpz_class X, Y, Z;
  bool infinity = true;
};

namespace {

// Sliding-window exponentiation shared by unitary and general F_{q^2} powers.
template <typename Mul, typename Sqr>
GT window_pow(const GT& base, const mpz_class& e, const GT& one, Mul&& mul, Sqr&& sqr) {
  if (mpz_sgn(e.get_mpz_t()) == 0) return one;
  constexpr int kWindow = 5;
  std::array<GT, 1 << (kWindow - 1)> odd;  // base^(2i+1)
  odd[0] = base;
  GT base_sq;
  sqr(base_sq, base);
  for (std::size_t i = 1; i < odd.size(); ++i) mul(odd[i], odd[i - 1], base_sq);

  GT acc = one;
  bool started = false;
  long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1;
  while (i >= 0) {
    if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) == 0) {
      if (started) sqr(acc, acc);
      --i;
      continue;
    }
    long low = std::max(0L, i - kWindow + 1);
    while (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(low)) == 0) ++low;
    unsigned long value = 0;
    for (long j = i; j >= low; --j) {
      value = (value << 1) | mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(j));
      if (started) sqr(acc, acc);
    }
    if (started) {
      mul(acc, acc, odd[value >> 1]);
    } else {
      acc = odd[value >> 1];
      started = true;
    }
    i = low - 1;
  }
  return acc;
}

void write_fixed(ByteWriter& w, const mpz_class& v, std::size_t width) {
  Bytes buf(width, 0);
  std::size_t count = 0;
  if (mpz_sgn(v.get_mpz_t()) != 0) {
    std::size_t need = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    if (need > width) throw Error(ErrorCode::kInvalidArgument, "value exceeds fixed width");
    mpz_export(buf.data() + (width - need), &count, 1, 1, 1, 0, v.get_mpz_t());
  }
  w.raw(buf);
}

mpz_class read_fixed(ByteReader& r, std::size_t width) {
  auto b = r.raw(width);
  mpz_class v;
  mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  return v;
}

mpz_class from_bytes_mod(ByteView b, const mpz_class& m) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  mpz_mod(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
  return v;
}

}  // namespace

Group::Group(int level, const char* q_hex, const char* r_hex, const char* h_hex)
    : level_(level), q_(q_hex, 16), r_(r_hex, 16), h_(h_hex, 16) {
  sqrt_exp_ = (q_ + 1) / 4;
  field_bytes_ = (mpz_sizeinbase(q_.get_mpz_t(), 2) + 7) / 8;
  scalar_bytes_ = (mpz_sizeinbase(r_.get_mpz_t(), 2) + 7) / 8;
  field_ = std::make_shared<const Field>(q_);
}

const Group& Group::for_level(int security_level) {
  static const auto groups = [] {
    std::map<int, std::unique_ptr<Group>> m;
    for (const auto& p : detail::kTypeAParams)
      m.emplace(p.level, std::make_unique<Group>(p.level, p.q_hex, p.r_hex, p.h_hex));
    return m;
  }();
  auto it = groups.find(security_level);
  if (it == groups.end())
    throw Error(ErrorCode::kUnsupportedLevel,
                "unsupported security level " + std::to_string(security_level));
  return *it->second;
}

bool Group::supported_level(int security_level) {
  for (const auto& p : detail::kTypeAParams)
    if (p.level == security_level) return true;
  return false;
}

std::vector<int> Group::supported_levels() {
  std::vector<int> out;
  for (const auto& p : detail::kTypeAParams) out.push_back(p.level);
  return out;
}

Scalar Group::random_scalar(RandomSource& rng) const {
  for (;;) {
    Bytes b = rng.bytes(scalar_bytes_ + 16);
    Scalar s = from_bytes_mod(b, r_);
    if (s != 0) return s;
  }
}

Scalar Group::scalar_inverse(const Scalar& a) const {
  Scalar out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), r_.get_mpz_t()) == 0)
    throw Error(ErrorCode::kInvalidArgument, "scalar not invertible");
  return out;
}

Scalar Group::scalar_mod(const mpz_class& a) const {
  Scalar out;
  mpz_mod(out.get_mpz_t(), a.get_mpz_t(), r_.get_mpz_t());
  return out;
}

bool Group::on_curve(const G1& p) const {
  if (p.infinity) return true;
  if (p.x < 0 || p.x >= q_ || p.y < 0 || p.y >= q_) return false;
  const Field& f = *field_;
  mpz_class lhs, rhs, t;
  f.sqr(lhs, p.y);
  f.sqr(t, p.x);
  f.mul(rhs, t, p.x);
  f.add(rhs, rhs, p.x);
  return lhs == rhs;
}

G1 Group::negate(const G1& p) const {
  if (p.infinity) return p;
  G1 out = p;
  field_->neg(out.y, p.y);
  return out;
}

G1 Group::to_affine(const Jacobian& j) const {
  G1 out;
  if (j.infinity) return out;
  const Field& f = *field_;
  mpz_class zinv, zinv2;
  f.inv(zinv, j.Z);
  f.sqr(zinv2, zinv);
  f.mul(out.x, j.X, zinv2);
  f.mul(zinv2, zinv2, zinv);
  f.mul(out.y, j.Y, zinv2);
  out.infinity = false;
  return out;
}

G1 Group::add(const G1& a, const G1& b) const {
  if (a.infinity) return b;
  if (b.infinity) return a;
  const Field& f = *field_;
  mpz_class lambda, t;
  if (a.x == b.x) {
    mpz_class ysum;
    f.add(ysum, a.y, b.y);
    if (ysum == 0) return G1{};
    // Tangent: (3x^2 + 1) / 2y
    f.sqr(t, a.x);
    f.mul_ui(t, t, 3);
    f.add(t, t, mpz_class(1));
    mpz_class den;
    f.add(den, a.y, a.y);
    f.inv(den, den);
    f.mul(lambda, t, den);
  } else {
    mpz_class num, den;
    f.sub(num, b.y, a.y);
    f.sub(den, b.x, a.x);
    f.inv(den, den);
    f.mul(lambda, num, den);
  }
  G1 out;
  out.infinity = false;
  f.sqr(out.x, lambda);
  f.sub(out.x, out.x, a.x);
  f.sub(out.x, out.x, b.x);
  f.sub(t, a.x, out.x);
  f.mul(out.y, lambda, t);
  f.sub(out.y, out.y, a.y);
  return out;
}

G1 Group::mul(const G1& p, const Scalar& k) const {
  ++thread_op_counts().g1_mul;
  if (p.infinity || k == 0) return G1{};
  if (k < 0) return mul(negate(p), -k);
  const Field& f = *field_;
  Jacobian acc;
  mpz_class XX, YY, ZZ, M, S, Z1Z1, U2, S2, H, R, HH, HHH, V, t;
  const long top = static_cast<long>(mpz_sizeinbase(k.get_mpz_t(), 2)) - 1;
  for (long i = top; i >= 0; --i) {
    if (!acc.infinity) {
      // Doubling, a = 1.
      if (acc.Y == 0) {
        acc.infinity = true;
      } else {
        f.sqr(XX, acc.X);
        f.sqr(YY, acc.Y);
        f.sqr(ZZ, acc.Z);
        f.sqr(M, ZZ);
        f.mul_ui(t, XX, 3);
        f.add(M, M, t);
        f.mul(S, acc.X, YY);
        f.mul_ui(S, S, 4);
        f.mul(acc.Z, acc.Y, acc.Z);
        f.add(acc.Z, acc.Z, acc.Z);
        f.sqr(acc.X, M);
        f.sub(acc.X, acc.X, S);
        f.sub(acc.X, acc.X, S);
        f.sub(t, S, acc.X);
        f.mul(acc.Y, M, t);
        f.sqr(t, YY);
        f.mul_ui(t, t, 8);
        f.sub(acc.Y, acc.Y, t);
      }
    }
    if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      if (acc.infinity) {
        acc.X = p.x;
        acc.Y = p.y;
        acc.Z = 1;
        acc.infinity = false;
        continue;
      }
      f.sqr(Z1Z1, acc.Z);
      f.mul(U2, p.x, Z1Z1);
      f.mul(S2, p.y, acc.Z);
      f.mul(S2, S2, Z1Z1);
      f.sub(H, U2, acc.X);
      f.sub(R, S2, acc.Y);
      if (H == 0) {
        if (R == 0) {
          // acc == p: fall back to an affine doubling.
          G1 cur = to_affine(acc);
          G1 dbl = add(cur, cur);
          acc.infinity = dbl.infinity;
          if (!dbl.infinity) {
            acc.X = dbl.x;
            acc.Y = dbl.y;
            acc.Z = 1;
          }
        } else {
          acc.infinity = true;
        }
        continue;
      }
      f.sqr(HH, H);
      f.mul(HHH, H, HH);
      f.mul(V, acc.X, HH);
      f.sqr(acc.X, R);
      f.sub(acc.X, acc.X, HHH);
      f.sub(acc.X, acc.X, V);
      f.sub(acc.X, acc.X, V);
      f.sub(t, V, acc.X);
      f.mul(t, R, t);
      f.mul(HHH, acc.Y, HHH);
      f.sub(acc.Y, t, HHH);
      f.mul(acc.Z, acc.Z, H);
    }
  }
  return to_affine(acc);
}

G1 Group::hash_to_g1(std::string_view domain, ByteView message) const {
  ++thread_op_counts().hash_to_g1;
  const Field& f = *field_;
  for (std::uint32_t counter = 0;; ++counter) {
    Bytes wide;
    for (std::uint32_t block = 0; wide.size() < field_bytes_ + 16; ++block) {
      ByteWriter w;
      w.str16(domain);
      w.u32(counter);
      w.u32(block);
      w.raw(message);
      auto d = sha256(w.bytes());
      wide.insert(wide.end(), d.begin(), d.end());
    }
    wide.resize(field_bytes_ + 16);
    mpz_class x = from_bytes_mod(wide, q_);
    mpz_class rhs, t;
    f.sqr(t, x);
    f.mul(rhs, t, x);
    f.add(rhs, rhs, x);
    if (rhs == 0 || mpz_legendre(rhs.get_mpz_t(), q_.get_mpz_t()) != 1) continue;
    G1 p;
    p.infinity = false;
    p.x = x;
    mpz_powm(p.y.get_mpz_t(), rhs.get_mpz_t(), sqrt_exp_.get_mpz_t(), q_.get_mpz_t());
    --thread_op_counts().g1_mul;  // the cofactor clearing is part of the hash
    G1 out = mul(p, h_);
    if (!out.infinity) return out;
  }
}

G1 Group::random_g1(RandomSource& rng) const {
  Bytes seed = rng.bytes(32);
  return hash_to_g1("hab/random-g1", seed);
}

const G1& Group::attribute_point(const std::string& attribute) const {
  {
    std::shared_lock lock(cache_mu_);
    auto it = attribute_cache_.find(attribute);
    if (it != attribute_cache_.end()) return *it->second;
  }
  auto point = std::make_unique<G1>(
      hash_to_g1("hab/attribute", ByteView(reinterpret_cast<const std::uint8_t*>(attribute.data()),
                                           attribute.size())));
  std::unique_lock lock(cache_mu_);
  auto [it, inserted] = attribute_cache_.emplace(attribute, std::move(point));
  return *it->second;
}

GT Group::gt_one() const { return GT{1, 0}; }

GT Group::gt_mul(const GT& a, const GT& b) const {
  GT out;
  field_->mul2(out, a, b);
  return out;
}

GT Group::gt_inverse(const GT& a) const {
  GT out = a;
  field_->neg(out.b, a.b);
  return out;
}

bool Group::gt_valid(const GT& a) const {
  if (a.a < 0 || a.a >= q_ || a.b < 0 || a.b >= q_) return false;
  mpz_class n, t;
  field_->sqr(n, a.a);
  field_->sqr(t, a.b);
  field_->add(n, n, t);
  return n == 1;
}

GT Group::unitary_pow(const GT& a, const mpz_class& e) const {
  const Field& f = *field_;
  return window_pow(
      a, e, gt_one(), [&f](GT& o, const GT& x, const GT& y) { f.mul2(o, x, y); },
      [&f](GT& o, const GT& x) { f.sqr_unitary(o, x); });
}

GT Group::gt_pow(const GT& a, const Scalar& k) const {
  ++thread_op_counts().gt_pow;
  Scalar e = scalar_mod(k);
  return unitary_pow(a, e);
}

void Group::miller(const G1& p, const G1& q, GT& f_out) const {
  ++thread_op_counts().miller_loops;
  if (p.infinity || q.infinity) return;
  const Field& f = *field_;
  // Evaluated at phi(q) = (-xq, i*yq). Lines are scaled by F_q factors, which the final
  // exponentiation removes; vertical lines drop out for the same reason.
  GT acc{1, 0};
  GT line;
  mpz_class X = p.x, Y = p.y, Z = 1;
  mpz_class XX, YY, ZZ, M, S, Z3, t, u, Z1Z1, U2, S2, H, R, HH, HHH, V;
  mpz_class xq_plus_xp;
  f.add(xq_plus_xp, q.x, p.x);
  bool at_infinity = false;
  const long top = static_cast<long>(mpz_sizeinbase(r_.get_mpz_t(), 2)) - 1;
  for (long i = top - 1; i >= 0 && !at_infinity; --i) {
    f.sqr2(acc, acc);
    // Tangent line at T and T <- 2T.
    f.sqr(XX, X);
    f.sqr(YY, Y);
    f.sqr(ZZ, Z);
    f.sqr(M, ZZ);
    f.mul_ui(t, XX, 3);
    f.add(M, M, t);
    f.mul(Z3, Y, Z);
    f.add(Z3, Z3, Z3);
    f.mul(t, q.x, ZZ);
    f.add(t, t, X);
    f.mul(line.a, M, t);
    f.add(u, YY, YY);
    f.sub(line.a, line.a, u);
    f.mul(line.b, q.y, Z3);
    f.mul(line.b, line.b, ZZ);
    f.mul2(acc, acc, line);
    f.mul(S, X, YY);
    f.mul_ui(S, S, 4);
    f.sqr(X, M);
    f.sub(X, X, S);
    f.sub(X, X, S);
    f.sub(t, S, X);
    f.mul(Y, M, t);
    f.sqr(t, YY);
    f.mul_ui(t, t, 8);
    f.sub(Y, Y, t);
    Z = Z3;

    if (mpz_tstbit(r_.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      // Chord through T and P and T <- T + P.
      f.sqr(Z1Z1, Z);
      f.mul(U2, p.x, Z1Z1);
      f.mul(S2, p.y, Z);
      f.mul(S2, S2, Z1Z1);
      f.sub(H, U2, X);
      f.sub(R, S2, Y);
      if (H == 0) {
        // T = -P: vertical line, and T + P is the identity (last step of the loop).
        at_infinity = true;
        continue;
      }
      f.mul(Z3, Z, H);
      f.mul(line.a, R, xq_plus_xp);
      f.mul(t, p.y, Z3);
      f.sub(line.a, line.a, t);
      f.mul(line.b, q.y, Z3);
      f.mul2(acc, acc, line);
      f.sqr(HH, H);
      f.mul(HHH, H, HH);
      f.mul(V, X, HH);
      f.sqr(X, R);
      f.sub(X, X, HHH);
      f.sub(X, X, V);
      f.sub(X, X, V);
      f.sub(t, V, X);
      f.mul(t, R, t);
      f.mul(HHH, Y, HHH);
      f.sub(Y, t, HHH);
      Z = Z3;
    }
  }
  f.mul2(f_out, f_out, acc);
}

GT Group::final_exp(const GT& m) const {
  ++thread_op_counts().final_exps;
  const Field& f = *field_;
  // m^(q-1) = conj(m)^2 / N(m), then raise the norm-1 result to (q+1)/r.
  mpz_class n, t;
  f.sqr(n, m.a);
  f.sqr(t, m.b);
  f.add(n, n, t);
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "degenerate pairing value");
  f.inv(n, n);
  GT c{m.a, 0};
  f.neg(c.b, m.b);
  f.sqr2(c, c);
  f.mul(c.a, c.a, n);
  f.mul(c.b, c.b, n);
  return unitary_pow(c, h_);
}

GT Group::pair(const G1& p, const G1& q) const {
  GT acc = gt_one();
  miller(p, q, acc);
  return final_exp(acc);
}

GT Group::pair_product(const std::vector<PairingTerm>& terms,
                       const std::vector<const Scalar*>& exponents) const {
  if (!exponents.empty() && exponents.size() != terms.size())
    throw Error(ErrorCode::kInvalidArgument, "exponent count must match term count");
  const Field& f = *field_;
  GT acc = gt_one();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    GT m = gt_one();
    miller(*terms[i].p, *terms[i].q, m);
    if (!exponents.empty() && exponents[i] != nullptr) {
      Scalar e = scalar_mod(*exponents[i]);
      m = window_pow(
          m, e, gt_one(), [&f](GT& o, const GT& x, const GT& y) { f.mul2(o, x, y); },
          [&f](GT& o, const GT& x) { f.sqr2(o, x); });
    }
    f.mul2(acc, acc, m);
  }
  return final_exp(acc);
}

void Group::encode(ByteWriter& w, const G1& p) const {
  if (p.infinity) {
    w.u8(0);
    return;
  }
  w.u8(4);
  write_fixed(w, p.x, field_bytes_);
  write_fixed(w, p.y, field_bytes_);
}

void Group::encode(ByteWriter& w, const GT& e) const {
  write_fixed(w, e.a, field_bytes_);
  write_fixed(w, e.b, field_bytes_);
}

void Group::encode_scalar(ByteWriter& w, const Scalar& s) const {
  write_fixed(w, scalar_mod(s), scalar_bytes_);
}

G1 Group::decode_g1(ByteReader& r) const {
  std::uint8_t tag = r.u8();
  if (tag == 0) return G1{};
  if (tag != 4) throw Error(ErrorCode::kMalformed, "bad point tag");
  G1 p;
  p.infinity = false;
  p.x = read_fixed(r, field_bytes_);
  p.y = read_fixed(r, field_bytes_);
  if (!on_curve(p)) throw Error(ErrorCode::kMalformed, "point not on curve");
  return p;
}

GT Group::decode_gt(ByteReader& r) const {
  GT e;
  e.a = read_fixed(r, field_bytes_);
  e.b = read_fixed(r, field_bytes_);
  if (!gt_valid(e)) throw Error(ErrorCode::kMalformed, "GT element not of norm 1");
  return e;
}

Scalar Group::decode_scalar(ByteReader& r) const {
  Scalar s = read_fixed(r, scalar_bytes_);
  if (s >= r_) throw Error(ErrorCode::kMalformed, "scalar out of range");
  return s;
}

}  // namespace hab::abe
