#include "hab/sharing/shamir.h"

#include <set>

#include "hab/common/error.h"
#include "hab/sharing/gf256.h"

namespace hab::sharing {

namespace {

constexpr std::uint8_t kShareVersion = 1;

}  // namespace

Bytes Share::serialize() const {
  ByteWriter w;
  w.raw("HABS");
  w.u8(kShareVersion);
  w.raw(file_id.raw());
  w.u8(share_id);
  w.u8(threshold);
  w.u8(total);
  w.u64(payload.size());
  w.raw(payload);
  return std::move(w).take();
}

Share Share::deserialize(ByteView data) {
  ByteReader r(data);
  r.expect("HABS");
  if (r.u8() != kShareVersion) throw Error(ErrorCode::kMalformed, "unknown share version");
  Share s;
  s.file_id = Id128::from_bytes(r.raw(16));
  s.share_id = r.u8();
  s.threshold = r.u8();
  s.total = r.u8();
  const std::uint64_t n = r.u64();
  if (n != r.remaining()) throw Error(ErrorCode::kMalformed, "share payload length mismatch");
  auto payload = r.raw(static_cast<std::size_t>(n));
  s.payload.assign(payload.begin(), payload.end());
  if (s.share_id == 0 || s.threshold == 0 || s.threshold > s.total || s.share_id > s.total)
    throw Error(ErrorCode::kMalformed, "share header out of range");
  return s;
}

std::vector<Share> split(const FileId& file_id, ByteView data, int n, int t, RandomSource& rng) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot split empty data");
  if (n > kMaxShares) throw Error(ErrorCode::kInvalidArgument, "at most 255 shares in GF(256)");
  if (t < 1 || n < 1) throw Error(ErrorCode::kInvalidArgument, "n and t must be positive");
  if (t > n) throw Error(ErrorCode::kInvalidArgument, "threshold exceeds share count");

  std::vector<Share> shares(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& s = shares[static_cast<std::size_t>(i)];
    s.file_id = file_id;
    s.share_id = static_cast<std::uint8_t>(i + 1);
    s.threshold = static_cast<std::uint8_t>(t);
    s.total = static_cast<std::uint8_t>(n);
    s.payload.resize(data.size());
  }

  // Coefficients for a block of bytes at a time keep RNG calls coarse.
  constexpr std::size_t kBlock = 4096;
  const std::size_t degree = static_cast<std::size_t>(t - 1);
  Bytes coeffs;
  for (std::size_t base = 0; base < data.size(); base += kBlock) {
    const std::size_t len = std::min(kBlock, data.size() - base);
    coeffs.resize(len * degree);
    rng.fill(coeffs);
    for (int i = 0; i < n; ++i) {
      const std::uint8_t x = static_cast<std::uint8_t>(i + 1);
      std::uint8_t* out = shares[static_cast<std::size_t>(i)].payload.data() + base;
      for (std::size_t b = 0; b < len; ++b) {
        // Horner: a_{t-1} x^{t-1} + ... + a_1 x + secret
        const std::uint8_t* a = coeffs.data() + b * degree;
        std::uint8_t y = 0;
        for (std::size_t d = degree; d-- > 0;) y = gf256::mul(y, x) ^ a[d];
        out[b] = gf256::mul(y, x) ^ data[base + b];
      }
    }
  }
  return shares;
}

Bytes combine(const std::vector<Share>& shares, int t) {
  if (t < 1) throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  if (shares.size() < static_cast<std::size_t>(t))
    throw Error(ErrorCode::kInsufficientShares, "need " + std::to_string(t) + " shares, got " +
                                                    std::to_string(shares.size()));
  const Share& first = shares.front();
  std::set<std::uint8_t> xs;
  for (const auto& s : shares) {
    if (s.file_id != first.file_id)
      throw Error(ErrorCode::kLabelMismatch, "shares belong to different files");
    if (s.threshold != first.threshold || s.total != first.total ||
        s.payload.size() != first.payload.size())
      throw Error(ErrorCode::kInconsistentParams, "shares disagree on (T, N, length)");
    if (s.x() == 0) throw Error(ErrorCode::kInconsistentParams, "share has x = 0");
    if (!xs.insert(s.x()).second) throw Error(ErrorCode::kDuplicateX, "duplicate share x-coordinate");
  }
  if (first.threshold != t)
    throw Error(ErrorCode::kInconsistentParams, "requested threshold differs from share header");

  const std::size_t k = static_cast<std::size_t>(t);
  // Lagrange basis at 0: l_i = prod_{j != i} x_j / (x_j - x_i); subtraction is XOR.
  std::vector<std::uint8_t> basis(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uint8_t num = 1, den = 1;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      num = gf256::mul(num, shares[j].x());
      den = gf256::mul(den, shares[j].x() ^ shares[i].x());
    }
    basis[i] = gf256::div(num, den);
  }
  Bytes out(first.payload.size(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint8_t l = basis[i];
    const auto& p = shares[i].payload;
    for (std::size_t b = 0; b < out.size(); ++b) out[b] ^= gf256::mul(l, p[b]);
  }
  return out;
}

}  // namespace hab::sharing
