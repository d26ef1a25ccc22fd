#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hab/audit/records.h"

namespace hab::bench {

struct BenchConfig {
  std::vector<std::size_t> sizes{1024, 10 * 1024, 100 * 1024, 500 * 1024, 1024 * 1024};
  int reps = 10;
  int clouds = 5;
  int threshold = 3;
  /// Per-call latency of the mock cloud backends.
  int cloud_delay_ms = 5;
  int security_level = 128;
  /// Seeds the payload generator only; key material always uses the system RNG.
  std::string seed = "bench";
};

inline constexpr const char* kOpSplit = "split";
inline constexpr const char* kOpEncrypt = "encrypt";
inline constexpr const char* kOpUpload = "upload";
inline constexpr const char* kOpRevokeUser = "revoke_user";
inline constexpr const char* kOpRevokeAttribute = "revoke_attribute";
inline constexpr const char* kOpPolicyUpdate = "policy_update";

struct BenchRow {
  std::optional<std::size_t> size_bytes;  // unset for size-independent operations
  std::string operation;
  double mean_s = 0;
  double stddev_s = 0;
  int reps = 0;
  audit::Json to_json() const;
};

struct StructureCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;
  std::vector<StructureCheck> checks;

  const BenchRow* find(const std::string& operation, std::optional<std::size_t> size) const;
  bool passed() const;
  /// Aligned table: one line per size with split / encryption / upload mean and deviation,
  /// reference figures, size-independent operations and the structural checks.
  std::string to_text() const;
  /// One JSON object per row, then one per check, newline separated.
  std::string to_jsonl() const;
};

/// Sample mean and sample standard deviation.
std::pair<double, double> mean_stddev(const std::vector<double>& samples);

/// Runs every timing loop against an in-process service with latency-mock clouds. One
/// warm-up iteration per cell is discarded. Throws Error(kInvalidArgument) for reps < 5 or
/// an unusable cloud/threshold combination.
BenchReport run_bench(const BenchConfig& config);

/// Adds the split-ordering and encryption-flatness checks to `report`.
void evaluate_structure(BenchReport& report);

}  // namespace hab::bench
