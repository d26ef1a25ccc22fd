#include "catch2/catch_amalgamated.hpp"

#include "hab/abe/document.h"
#include "hab/common/error.h"

using namespace hab;
using namespace hab::abe;

namespace {

struct Env {
  KeyPair kp;
  UserKey doctor, nurse, er;
  Env() {
    SeededRandom rng("document-tests");
    kp = setup(80, rng);
    doctor = keygen(kp.public_params, kp.master_secret, {"doctor", "cardiology"}, rng);
    nurse = keygen(kp.public_params, kp.master_secret, {"nurse"}, rng);
    er = keygen(kp.public_params, kp.master_secret, {"emergency_room"}, rng);
  }
};

const Env& env() {
  static const Env e;
  return e;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("round trip across sizes") {
  const auto& e = env();
  const auto policy = parse_policy("doctor AND cardiology");
  SeededRandom rng("sizes");
  for (std::size_t size : {1u, 31u, 1024u, 100'000u, 1u << 20}) {
    const Bytes plain = rng.bytes(size);
    auto doc = encrypt(e.kp.public_params, policy, plain, rng);
    CHECK(doc.body.size() == size + 16);
    auto wire = doc.serialize();
    auto back = EncryptedDocument::deserialize(wire);
    CHECK(back.doc_id == doc.doc_id);
    CHECK(decrypt(e.kp.public_params, e.doctor, back) == plain);
  }
  CHECK(code_of([&] { encrypt(e.kp.public_params, policy, Bytes{}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("non-satisfying key is refused") {
  const auto& e = env();
  auto doc = encrypt(e.kp.public_params, parse_policy("doctor AND cardiology"), to_bytes("chart"));
  CHECK(code_of([&] { decrypt(e.kp.public_params, e.nurse, doc); }) == ErrorCode::kNotSatisfied);
}

TEST_CASE("any flipped bit in the wire form is detected") {
  const auto& e = env();
  SeededRandom rng("flip");
  auto doc = encrypt(e.kp.public_params, parse_policy("doctor"), to_bytes("<record>ok</record>"), rng);
  const Bytes wire = doc.serialize();
  int rejected = 0, total = 0;
  for (std::size_t byte = 0; byte < wire.size(); byte += 7) {
    Bytes bad = wire;
    bad[byte] ^= static_cast<std::uint8_t>(1u << (byte % 8));
    ++total;
    try {
      auto parsed = EncryptedDocument::deserialize(bad);
      decrypt(e.kp.public_params, e.doctor, parsed);
    } catch (const Error&) {
      ++rejected;
    }
  }
  CHECK(rejected == total);
  Bytes truncated(wire.begin(), wire.end() - 1);
  CHECK_THROWS_AS(EncryptedDocument::deserialize(truncated), Error);
}

TEST_CASE("ciphertexts are randomized") {
  const auto& e = env();
  const auto policy = parse_policy("doctor");
  const Bytes plain = to_bytes("same plaintext");
  auto a = encrypt(e.kp.public_params, policy, plain);
  auto b = encrypt(e.kp.public_params, policy, plain);
  CHECK(a.body != b.body);
  CHECK(a.doc_id != b.doc_id);
  CHECK(a.serialize() != b.serialize());
}

TEST_CASE("moving a body under another document id fails") {
  const auto& e = env();
  const auto policy = parse_policy("doctor");
  auto a = encrypt(e.kp.public_params, policy, to_bytes("alpha"));
  auto b = encrypt(e.kp.public_params, policy, to_bytes("bravo"));
  auto swapped = a;
  swapped.doc_id = b.doc_id;
  CHECK(code_of([&] { decrypt(e.kp.public_params, e.doctor, swapped); }) == ErrorCode::kIntegrityFailure);
}

TEST_CASE("extra wraps and rewrapping share one body") {
  const auto& e = env();
  const Bytes plain = to_bytes("<chart>bp 120/80</chart>");
  auto sealed = encrypt_with_wraps(e.kp.public_params, parse_policy("doctor AND cardiology"),
                                   {parse_policy("emergency_room"), parse_policy("nurse")}, plain);
  REQUIRE(sealed.extra_wraps.size() == 2);
  auto via_er = rewrap(sealed.document, sealed.extra_wraps[0]);
  CHECK(via_er.body == sealed.document.body);
  CHECK(decrypt(e.kp.public_params, e.er, via_er) == plain);
  CHECK(code_of([&] { decrypt(e.kp.public_params, e.er, sealed.document); }) == ErrorCode::kNotSatisfied);
  CHECK(decrypt(e.kp.public_params, e.nurse, rewrap(sealed.document, sealed.extra_wraps[1])) == plain);

  auto wrap = rewrap_key(e.kp.public_params, e.doctor, sealed.document, parse_policy("nurse"));
  CHECK(decrypt(e.kp.public_params, e.nurse, rewrap(sealed.document, wrap)) == plain);
  CHECK(code_of([&] { rewrap_key(e.kp.public_params, e.nurse, sealed.document, parse_policy("nurse")); }) ==
        ErrorCode::kNotSatisfied);
  CHECK(KeyWrap::deserialize(wrap.serialize()).serialize() == wrap.serialize());
}

TEST_CASE("a key assembled from two keys fails integrity") {
  const auto& e = env();
  SeededRandom rng("mix");
  auto k1 = keygen(e.kp.public_params, e.kp.master_secret, {"doctor"}, rng);
  auto k2 = keygen(e.kp.public_params, e.kp.master_secret, {"cardiology"}, rng);
  auto doc = encrypt(e.kp.public_params, parse_policy("doctor AND cardiology"), to_bytes("x"), rng);
  UserKey mixed = k1;
  mixed.components["cardiology"] = k2.components.at("cardiology");
  CHECK(code_of([&] { decrypt(e.kp.public_params, mixed, doc); }) == ErrorCode::kIntegrityFailure);
}
