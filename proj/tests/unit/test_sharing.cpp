#include "catch2/catch_amalgamated.hpp"

#include <algorithm>
#include <map>

#include "hab/common/error.h"
#include "hab/sharing/gf256.h"
#include "hab/sharing/shamir.h"
#include "oracles.h"

using namespace hab;
using namespace hab::sharing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

FileId file(RandomSource& rng) { return Id128::from_bytes(rng.bytes(16)); }

}  // namespace

TEST_CASE("field arithmetic matches the bitwise reference") {
  for (int a = 0; a < 256; ++a)
    for (int b = 0; b < 256; ++b)
      REQUIRE(gf256::mul(a, b) == oracle::gf_mul(a, b));
  for (int a = 1; a < 256; ++a) {
    REQUIRE(gf256::inv(a) == oracle::gf_inv(a));
    REQUIRE(gf256::mul(a, gf256::inv(a)) == 1);
  }
}

TEST_CASE("every t-subset reconstructs and agrees with the reference") {
  SeededRandom rng("subsets");
  for (auto [n, t] : std::vector<std::pair<int, int>>{{3, 2}, {5, 3}, {7, 4}, {4, 4}, {3, 1}}) {
    const Bytes data = rng.bytes(97);
    auto shares = split(file(rng), data, n, t, rng);
    REQUIRE(shares.size() == static_cast<std::size_t>(n));
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<Share> pick;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) pick.push_back(shares[i]);
      if (static_cast<int>(pick.size()) != t) continue;
      INFO(n << "," << t << " mask " << mask);
      CHECK(combine(pick, t) == data);
      CHECK(oracle::interpolate(pick) == data);
      std::reverse(pick.begin(), pick.end());
      CHECK(combine(pick, t) == data);
    }
  }
}

TEST_CASE("fewer than t shares do not reveal the secret") {
  SeededRandom rng("below");
  const Bytes data = to_bytes("sensitive record contents");
  auto shares = split(file(rng), data, 5, 3, rng);
  std::vector<Share> two = {shares[0], shares[1]};
  CHECK(code_of([&] { combine(two, 3); }) == ErrorCode::kInsufficientShares);
  CHECK(oracle::interpolate(two) != data);
}

TEST_CASE("label and parameter checks") {
  SeededRandom rng("labels");
  auto a = split(file(rng), to_bytes("aaaa"), 5, 3, rng);
  auto b = split(file(rng), to_bytes("bbbb"), 5, 3, rng);
  CHECK(code_of([&] { combine({a[0], a[1], b[2]}, 3); }) == ErrorCode::kLabelMismatch);
  CHECK(code_of([&] { combine({a[0], a[0], a[1]}, 3); }) == ErrorCode::kDuplicateX);
  auto odd = a[2];
  odd.threshold = 2;
  CHECK(code_of([&] { combine({a[0], a[1], odd}, 3); }) == ErrorCode::kInconsistentParams);
  auto shorter = a[2];
  shorter.payload.pop_back();
  CHECK(code_of([&] { combine({a[0], a[1], shorter}, 3); }) == ErrorCode::kInconsistentParams);
  CHECK(code_of([&] { combine({a[0], a[1], a[2]}, 2); }) == ErrorCode::kInconsistentParams);

  CHECK(code_of([&] { split(file(rng), Bytes{}, 5, 3, rng); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { split(file(rng), to_bytes("x"), 5, 0, rng); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { split(file(rng), to_bytes("x"), 3, 4, rng); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { split(file(rng), to_bytes("x"), 256, 3, rng); }) == ErrorCode::kInvalidArgument);
  CHECK(split(file(rng), to_bytes("x"), kMaxShares, 3, rng).size() == 255);
}

TEST_CASE("share serialization") {
  SeededRandom rng("wire");
  auto shares = split(file(rng), rng.bytes(300), 4, 2, rng);
  for (const auto& s : shares) CHECK(Share::deserialize(s.serialize()) == s);
  auto wire = shares[0].serialize();
  wire[0] = 'X';
  CHECK_THROWS_AS(Share::deserialize(wire), Error);
  wire = shares[0].serialize();
  wire.pop_back();
  CHECK_THROWS_AS(Share::deserialize(wire), Error);
}

TEST_CASE("a single share byte is close to uniform") {
  SeededRandom rng("uniform");
  const FileId id = file(rng);
  const Bytes data = {0x42};
  std::map<int, int> counts;
  for (int i = 0; i < 2000; ++i) ++counts[split(id, data, 5, 3, rng)[0].payload[0]];
  CHECK(counts.size() >= 200);
  int max = 0;
  for (auto& [v, c] : counts) max = std::max(max, c);
  CHECK(max < 30);
}
