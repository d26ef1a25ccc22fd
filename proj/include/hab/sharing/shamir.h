#pragma once

#include <cstdint>
#include <vector>

#include "hab/common/bytes.h"
#include "hab/common/random.h"

namespace hab::sharing {

inline constexpr int kMaxShares = 255;

/// One labeled T-of-N fragment. share_id doubles as the evaluation point x (1..N).
struct Share {
  FileId file_id;
  std::uint8_t share_id = 0;
  std::uint8_t threshold = 0;
  std::uint8_t total = 0;
  Bytes payload;

  std::uint8_t x() const { return share_id; }

  /// "HABS" | version u8 | file_id[16] | share_id u8 | T u8 | N u8 | len u64 | payload
  Bytes serialize() const;
  static Share deserialize(ByteView data);

  friend bool operator==(const Share&, const Share&) = default;
};

/// Byte-wise Shamir over GF(256): every input byte gets its own random polynomial of
/// degree t-1; share i holds the evaluations at x = i.
/// Throws Error(kInvalidArgument) for empty data, t < 1, t > n or n > 255.
std::vector<Share> split(const FileId& file_id, ByteView data, int n, int t,
                         RandomSource& rng = system_random());

/// Lagrange interpolation at x = 0 over the first t supplied shares.
/// Throws kInsufficientShares, kLabelMismatch, kInconsistentParams or kDuplicateX.
Bytes combine(const std::vector<Share>& shares, int t);

}  // namespace hab::sharing
