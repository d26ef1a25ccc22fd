#include "hab/storage/backend.h"

#include <chrono>
#include <fstream>
#include <thread>

#include "hab/common/error.h"

namespace hab::storage {

namespace fs = std::filesystem;

void InMemoryBackend::put(const std::string& key, ByteView data) {
  std::lock_guard lock(mu_);
  objects_[key] = Bytes(data.begin(), data.end());
}

Bytes InMemoryBackend::get(const std::string& key) {
  std::lock_guard lock(mu_);
  auto it = objects_.find(key);
  if (it == objects_.end()) throw Error(ErrorCode::kNotFound, "no object " + key);
  return it->second;
}

void InMemoryBackend::remove(const std::string& key) {
  std::lock_guard lock(mu_);
  objects_.erase(key);
}

std::vector<std::string> InMemoryBackend::keys() {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [k, _] : objects_) out.push_back(k);
  return out;
}

LocalDirectoryBackend::LocalDirectoryBackend(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kBackendFailure, "cannot create " + root_.string());
}

fs::path LocalDirectoryBackend::path_for(const std::string& key) const {
  fs::path rel(key);
  for (const auto& part : rel)
    if (part == ".." || part == "." || part.empty())
      throw Error(ErrorCode::kInvalidArgument, "invalid object key " + key);
  if (rel.is_absolute()) throw Error(ErrorCode::kInvalidArgument, "invalid object key " + key);
  return root_ / rel;
}

void LocalDirectoryBackend::put(const std::string& key, ByteView data) {
  std::lock_guard lock(mu_);
  const fs::path p = path_for(key);
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kBackendFailure, "write failed for " + p.string());
  }
  fs::rename(tmp, p, ec);
  if (ec) throw Error(ErrorCode::kBackendFailure, "rename failed for " + p.string());
}

Bytes LocalDirectoryBackend::get(const std::string& key) {
  std::lock_guard lock(mu_);
  const fs::path p = path_for(key);
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "no object " + key);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void LocalDirectoryBackend::remove(const std::string& key) {
  std::lock_guard lock(mu_);
  std::error_code ec;
  fs::remove(path_for(key), ec);
  if (ec) throw Error(ErrorCode::kBackendFailure, "remove failed for " + key);
}

bool LocalDirectoryBackend::health() {
  std::error_code ec;
  return fs::is_directory(root_, ec);
}

std::vector<std::string> LocalDirectoryBackend::keys() {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (entry.is_regular_file() && entry.path().extension() != ".tmp")
      out.push_back(fs::relative(entry.path(), root_).generic_string());
  }
  return out;
}

LatencyMockBackend::LatencyMockBackend(int delay_ms, double failure_rate)
    : delay_ms_(delay_ms), failure_rate_(0.0) {
  if (delay_ms < 0) throw Error(ErrorCode::kInvalidArgument, "delay must be non-negative");
  set_failure_rate(failure_rate);
}

void LatencyMockBackend::set_failure_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "failure rate must be in [0, 1]");
  failure_rate_ = rate;
}

void LatencyMockBackend::simulate(const char* op) {
  if (int d = delay_ms_.load(); d > 0) std::this_thread::sleep_for(std::chrono::milliseconds(d));
  const double rate = failure_rate_.load();
  if (rate >= 1.0 || (rate > 0.0 && system_random().unit() < rate))
    throw Error(ErrorCode::kBackendFailure, std::string("simulated ") + op + " failure");
}

void LatencyMockBackend::put(const std::string& key, ByteView data) {
  simulate("put");
  inner_.put(key, data);
}

Bytes LatencyMockBackend::get(const std::string& key) {
  simulate("get");
  return inner_.get(key);
}

void LatencyMockBackend::remove(const std::string& key) {
  simulate("delete");
  inner_.remove(key);
}

bool LatencyMockBackend::health() { return failure_rate_.load() < 1.0; }

std::string backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kInMemory: return "in-memory";
    case BackendKind::kLocalDirectory: return "local-directory";
    case BackendKind::kLatencyMock: return "latency-mock";
  }
  return "unknown";
}

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "in-memory") return BackendKind::kInMemory;
  if (name == "local-directory") return BackendKind::kLocalDirectory;
  if (name == "latency-mock") return BackendKind::kLatencyMock;
  throw Error(ErrorCode::kInvalidArgument, "unknown backend kind " + std::string(name));
}

std::shared_ptr<CloudBackend> make_backend(const CloudBackendDescriptor& desc) {
  if (desc.cloud_id.empty()) throw Error(ErrorCode::kInvalidArgument, "cloud_id must be set");
  switch (desc.kind) {
    case BackendKind::kInMemory:
      return std::make_shared<InMemoryBackend>();
    case BackendKind::kLocalDirectory:
      if (desc.root.empty())
        throw Error(ErrorCode::kInvalidArgument, "local-directory backend needs a root");
      return std::make_shared<LocalDirectoryBackend>(desc.root);
    case BackendKind::kLatencyMock:
      return std::make_shared<LatencyMockBackend>(desc.delay_ms, desc.failure_rate);
  }
  throw Error(ErrorCode::kInvalidArgument, "unsupported backend kind");
}

}  // namespace hab::storage
