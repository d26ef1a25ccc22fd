#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hab/common/bytes.h"
#include "hab/common/random.h"

namespace hab::storage {

/// Object store holding shares. Failures throw Error(kBackendFailure); get() of a missing
/// key throws Error(kNotFound). Implementations must be thread-safe.
class CloudBackend {
 public:
  virtual ~CloudBackend() = default;
  virtual void put(const std::string& key, ByteView data) = 0;
  virtual Bytes get(const std::string& key) = 0;
  virtual void remove(const std::string& key) = 0;
  virtual bool health() = 0;
  /// Every stored key, for audits and tests.
  virtual std::vector<std::string> keys() = 0;
};

class InMemoryBackend : public CloudBackend {
 public:
  void put(const std::string& key, ByteView data) override;
  Bytes get(const std::string& key) override;
  void remove(const std::string& key) override;
  bool health() override { return true; }
  std::vector<std::string> keys() override;

 private:
  std::mutex mu_;
  std::map<std::string, Bytes> objects_;
};

/// One file per object under `root`; keys map to relative paths.
class LocalDirectoryBackend : public CloudBackend {
 public:
  explicit LocalDirectoryBackend(std::filesystem::path root);

  void put(const std::string& key, ByteView data) override;
  Bytes get(const std::string& key) override;
  void remove(const std::string& key) override;
  bool health() override;
  std::vector<std::string> keys() override;

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path root_;
  std::mutex mu_;
};

/// In-memory store that sleeps `delay_ms` per call and fails with probability
/// `failure_rate`. Both knobs can be changed at runtime to simulate outages.
class LatencyMockBackend : public CloudBackend {
 public:
  LatencyMockBackend(int delay_ms, double failure_rate);

  void put(const std::string& key, ByteView data) override;
  Bytes get(const std::string& key) override;
  void remove(const std::string& key) override;
  bool health() override;
  std::vector<std::string> keys() override { return inner_.keys(); }

  void set_failure_rate(double rate);
  void set_delay_ms(int delay_ms) { delay_ms_ = delay_ms; }
  double failure_rate() const { return failure_rate_.load(); }

 private:
  void simulate(const char* op);

  InMemoryBackend inner_;
  std::atomic<int> delay_ms_;
  std::atomic<double> failure_rate_;
};

enum class BackendKind { kInMemory, kLocalDirectory, kLatencyMock };

struct CloudBackendDescriptor {
  std::string cloud_id;
  BackendKind kind = BackendKind::kInMemory;
  std::string display_name;
  std::filesystem::path root;  // local-directory
  int delay_ms = 0;            // latency-mock
  double failure_rate = 0.0;   // latency-mock, in [0, 1]
};

std::string backend_kind_name(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

/// Validates the descriptor and builds the matching backend.
std::shared_ptr<CloudBackend> make_backend(const CloudBackendDescriptor& desc);

}  // namespace hab::storage
