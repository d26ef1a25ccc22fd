#include <gmp.h>

#include "catch2/catch_amalgamated.hpp"

#include "hab/abe/group.h"
#include "hab/common/error.h"

using namespace hab;
using namespace hab::abe;

namespace {

bool probably_prime(const mpz_class& v) { return mpz_probab_prime_p(v.get_mpz_t(), 40) > 0; }

}  // namespace

TEST_CASE("supported levels") {
  CHECK(Group::supported_levels() == std::vector<int>{80, 112, 128});
  CHECK_FALSE(Group::supported_level(96));
  try {
    Group::for_level(96);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedLevel);
  }
}

TEST_CASE("Type A parameters are well formed") {
  for (int level : Group::supported_levels()) {
    const Group& g = Group::for_level(level);
    INFO("level " << level);
    CHECK(probably_prime(g.q()));
    CHECK(probably_prime(g.r()));
    CHECK(g.q() % 4 == 3);
    CHECK(g.q() + 1 == g.cofactor() * g.r());
    // Embedding degree 2: r | q^2 - 1 and |F_{q^2}| gives the claimed strength.
    CHECK(mpz_sizeinbase(g.q().get_mpz_t(), 2) * 2 >= static_cast<std::size_t>(level == 80 ? 1024 : level == 112 ? 2048 : 3072));
    CHECK(mpz_sizeinbase(g.r().get_mpz_t(), 2) >= static_cast<std::size_t>(2 * level));
  }
}

TEST_CASE("pairing is bilinear and non-degenerate") {
  const Group& g = Group::for_level(80);
  SeededRandom rng("bilinear");
  G1 p = g.random_g1(rng), q = g.random_g1(rng);
  CHECK(g.on_curve(p));
  CHECK(g.mul(p, g.r()).infinity);
  Scalar a = g.random_scalar(rng), b = g.random_scalar(rng);
  GT base = g.pair(p, q);
  CHECK_FALSE(base == g.gt_one());
  CHECK(g.gt_valid(base));
  CHECK(g.pair(g.mul(p, a), g.mul(q, b)) == g.gt_pow(base, g.scalar_mod(a * b)));
  CHECK(g.pair(p, q) == g.pair(q, p));
  CHECK(g.pair(g.add(p, q), q) == g.gt_mul(g.pair(p, q), g.pair(q, q)));
  CHECK(g.gt_mul(base, g.gt_inverse(base)) == g.gt_one());
}

TEST_CASE("pair_product matches individual pairings") {
  const Group& g = Group::for_level(80);
  SeededRandom rng("product");
  G1 p1 = g.random_g1(rng), q1 = g.random_g1(rng), p2 = g.random_g1(rng), q2 = g.random_g1(rng);
  Scalar e1 = g.random_scalar(rng), e2 = g.random_scalar(rng);
  GT expect = g.gt_mul(g.gt_pow(g.pair(p1, q1), e1), g.gt_pow(g.pair(p2, q2), e2));
  CHECK(g.pair_product({{&p1, &q1}, {&p2, &q2}}, {&e1, &e2}) == expect);
  CHECK(g.pair_product({{&p1, &q1}, {&p2, &q2}}) == g.gt_mul(g.pair(p1, q1), g.pair(p2, q2)));
}

TEST_CASE("hash to G1 is deterministic and lands in the subgroup") {
  const Group& g = Group::for_level(80);
  G1 a = g.hash_to_g1("attr", to_bytes("doctor"));
  G1 b = g.hash_to_g1("attr", to_bytes("doctor"));
  G1 c = g.hash_to_g1("attr", to_bytes("nurse"));
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(g.on_curve(a));
  CHECK(g.mul(a, g.r()).infinity);
  CHECK(g.attribute_point("doctor") == g.attribute_point("doctor"));
}

TEST_CASE("encodings round trip and reject off-curve points") {
  const Group& g = Group::for_level(80);
  SeededRandom rng("encode");
  G1 p = g.random_g1(rng);
  GT e = g.pair(p, p);
  Scalar s = g.random_scalar(rng);
  ByteWriter w;
  g.encode(w, p);
  g.encode(w, G1{});
  g.encode(w, e);
  g.encode_scalar(w, s);
  Bytes bytes = std::move(w).take();
  ByteReader r(bytes);
  CHECK(g.decode_g1(r) == p);
  CHECK(g.decode_g1(r).infinity);
  CHECK(g.decode_gt(r) == e);
  CHECK(g.decode_scalar(r) == s);
  r.expect_end();

  ByteWriter w2;
  g.encode(w2, p);
  Bytes bad = std::move(w2).take();
  bad.back() ^= 1;
  ByteReader r2(bad);
  CHECK_THROWS_AS(g.decode_g1(r2), Error);
}

TEST_CASE("op counters track expensive operations") {
  const Group& g = Group::for_level(80);
  SeededRandom rng("ops");
  G1 p = g.random_g1(rng);
  auto before = thread_op_counts();
  g.pair(p, p);
  auto after = thread_op_counts();
  CHECK(after.miller_loops == before.miller_loops + 1);
  CHECK(after.final_exps == before.final_exps + 1);
}
