#include "hab/common/random.h"

#include <openssl/rand.h>

#include <string>

#include "hab/common/crypto.h"
#include "hab/common/error.h"

namespace hab {

std::uint64_t RandomSource::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "uniform bound must be positive");
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

double RandomSource::unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
    throw Error(ErrorCode::kStorageFailure, "RAND_bytes failed");
}

RandomSource& system_random() {
  static SystemRandom instance;
  return instance;
}

SeededRandom::SeededRandom(std::string_view seed) : seed_(to_bytes(seed)) {}

SeededRandom::SeededRandom(std::uint64_t seed) : seed_(to_bytes(std::to_string(seed))) {}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  std::lock_guard lock(mu_);
  for (auto& byte : out) {
    if (used_ == sizeof(block_)) {
      ByteWriter w;
      w.raw(seed_);
      w.u64(counter_++);
      auto digest = sha256(w.bytes());
      std::copy(digest.begin(), digest.end(), block_);
      used_ = 0;
    }
    byte = block_[used_++];
  }
}

}  // namespace hab
