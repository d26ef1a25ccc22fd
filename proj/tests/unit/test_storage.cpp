#include "catch2/catch_amalgamated.hpp"

#include <chrono>

#include "fixtures.h"
#include "hab/common/error.h"
#include "hab/storage/mcp.h"

using namespace hab;
using namespace hab::storage;

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

struct Proxy {
  std::shared_ptr<store::Database> db = store::Database::open(":memory:");
  MultiCloudProxy mcp{db};
  std::vector<std::shared_ptr<LatencyMockBackend>> clouds;
  std::vector<std::string> ids;

  explicit Proxy(int n, int delay_ms = 0) {
    for (int i = 1; i <= n; ++i) {
      auto b = std::make_shared<LatencyMockBackend>(delay_ms, 0.0);
      clouds.push_back(b);
      ids.push_back(mcp.register_backend("cloud-" + std::to_string(i), b));
    }
  }
};

}  // namespace

TEST_CASE("upload places one share per cloud and retrieves") {
  Proxy p(5);
  SeededRandom rng("mcp");
  const FileId id = Id128::from_bytes(rng.bytes(16));
  const Bytes data = rng.bytes(5000);
  auto entries = p.mcp.upload_shares(id, sharing::split(id, data, 5, 3, rng), p.ids);
  REQUIRE(entries.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(entries[i].cloud_id == p.ids[i]);
    CHECK(entries[i].object_key == object_key(id, i + 1));
    CHECK(p.clouds[i]->keys() == std::vector<std::string>{object_key(id, i + 1)});
  }
  CHECK(p.mcp.index(id) == entries);
  CHECK(p.mcp.retrieve_file(id, 3) == data);
  CHECK(code_of([&] { p.mcp.retrieve_file(Id128::from_bytes(rng.bytes(16)), 3); }) == ErrorCode::kNotFound);
}

TEST_CASE("backend registration") {
  Proxy p(1);
  CHECK(code_of([&] { p.mcp.register_backend("cloud-1", std::make_shared<InMemoryBackend>()); }) ==
        ErrorCode::kDuplicateId);
  CloudBackendDescriptor d{"mock", BackendKind::kLatencyMock, "m", {}, 1, 1.5};
  CHECK_THROWS_AS(make_backend(d), Error);
  CHECK(parse_backend_kind(backend_kind_name(BackendKind::kLocalDirectory)) == BackendKind::kLocalDirectory);
  CHECK(p.mcp.health().at("cloud-1"));
}

TEST_CASE("shares are fetched concurrently") {
  Proxy p(5, 200);
  SeededRandom rng("slow");
  const FileId id = Id128::from_bytes(rng.bytes(16));
  const Bytes data = rng.bytes(100);
  p.mcp.upload_shares(id, sharing::split(id, data, 5, 3, rng), p.ids);
  const auto start = std::chrono::steady_clock::now();
  CHECK(p.mcp.retrieve_file(id, 3) == data);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  CHECK(ms >= 200);
  CHECK(ms < 600);
}

TEST_CASE("retrieval tolerates n - t dead clouds") {
  Proxy p(5);
  SeededRandom rng("dead");
  const FileId id = Id128::from_bytes(rng.bytes(16));
  const Bytes data = rng.bytes(777);
  p.mcp.upload_shares(id, sharing::split(id, data, 5, 3, rng), p.ids);
  p.clouds[0]->set_failure_rate(1.0);
  p.clouds[3]->set_failure_rate(1.0);
  CHECK(p.mcp.retrieve_file(id, 3) == data);
  CHECK_FALSE(p.mcp.health().at("cloud-1"));
  p.clouds[4]->set_failure_rate(1.0);
  CHECK(code_of([&] { p.mcp.retrieve_file(id, 3); }) == ErrorCode::kInsufficientLiveShares);
}

TEST_CASE("a corrupted share is skipped") {
  Proxy p(4);
  SeededRandom rng("corrupt");
  const FileId id = Id128::from_bytes(rng.bytes(16));
  const Bytes data = rng.bytes(64);
  p.mcp.upload_shares(id, sharing::split(id, data, 4, 2, rng), p.ids);
  p.clouds[0]->put(object_key(id, 1), to_bytes("garbage"));
  CHECK(p.mcp.retrieve_file(id, 2) == data);
}

TEST_CASE("failed upload leaves nothing behind") {
  Proxy p(5);
  SeededRandom rng("rollback");
  const FileId id = Id128::from_bytes(rng.bytes(16));
  p.clouds[3]->set_failure_rate(1.0);
  CHECK(code_of([&] { p.mcp.upload_shares(id, sharing::split(id, rng.bytes(50), 5, 3, rng), p.ids); }) ==
        ErrorCode::kBackendFailure);
  CHECK(p.mcp.index(id).empty());
  for (int i = 0; i < 5; ++i) CHECK(p.clouds[i]->keys().empty());
  CHECK(code_of([&] { p.mcp.upload_shares(id, sharing::split(id, rng.bytes(50), 5, 3, rng), {"cloud-1"}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("delete removes objects and records orphans") {
  Proxy p(3);
  SeededRandom rng("delete");
  const FileId id = Id128::from_bytes(rng.bytes(16));
  p.mcp.upload_shares(id, sharing::split(id, rng.bytes(50), 3, 2, rng), p.ids);
  p.clouds[2]->set_failure_rate(1.0);
  CHECK(p.mcp.delete_file(id) == 3);
  CHECK(p.mcp.index(id).empty());
  CHECK(p.clouds[0]->keys().empty());
  REQUIRE(p.mcp.orphans().size() == 1);
  CHECK(p.mcp.orphans()[0].cloud_id == "cloud-3");
  CHECK(p.mcp.cleanup_orphans() == 0);
  p.clouds[2]->set_failure_rate(0.0);
  CHECK(p.mcp.cleanup_orphans() == 1);
  CHECK(p.clouds[2]->keys().empty());
  CHECK(p.mcp.orphans().empty());
  CHECK(code_of([&] { p.mcp.delete_file(id); }) == ErrorCode::kNotFound);
}

TEST_CASE("local directory backend") {
  testing::TempDir dir;
  CloudBackendDescriptor d{"disk", BackendKind::kLocalDirectory, "disk", dir.path() / "cloud", 0, 0};
  auto b = make_backend(d);
  b->put("abc/1", to_bytes("one"));
  CHECK(to_string(b->get("abc/1")) == "one");
  CHECK(b->keys() == std::vector<std::string>{"abc/1"});
  CHECK(code_of([&] { b->get("abc/2"); }) == ErrorCode::kNotFound);
  b->remove("abc/1");
  CHECK(b->keys().empty());
  CHECK(b->health());
}
