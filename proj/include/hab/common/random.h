#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <string_view>

#include "hab/common/bytes.h"

namespace hab {

/// Source of random bytes. Implementations must be safe to call from several threads.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
  }
  std::uint64_t next_u64();
  /// Uniform in [0, bound).
  std::uint64_t uniform(std::uint64_t bound);
  /// Uniform double in [0, 1).
  double unit();
};

/// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

RandomSource& system_random();

/// Deterministic SHA-256 counter-mode stream for tests and reproducible setup.
/// Never use for production keys.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::string_view seed);
  explicit SeededRandom(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mutex mu_;
  Bytes seed_;
  std::uint64_t counter_ = 0;
  std::uint8_t block_[32] = {};
  std::size_t used_ = 32;
};

}  // namespace hab
