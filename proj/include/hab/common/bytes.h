#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hab {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

std::string base64_encode(ByteView data);
Bytes base64_decode(std::string_view text);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

/// Appends big-endian integers and length-prefixed blobs.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(ByteView data) { out_.insert(out_.end(), data.begin(), data.end()); }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void blob16(ByteView data);
  void blob32(ByteView data);
  void str16(std::string_view s);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

/// Bounds-checked reader; every short read throws Error(kMalformed).
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView raw(std::size_t n);
  void expect(std::string_view magic);
  Bytes blob16();
  Bytes blob32();
  std::string str16();

  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

/// 16-byte identifier used for files, documents and keys.
class Id128 {
 public:
  Id128() = default;
  explicit Id128(const std::array<std::uint8_t, 16>& raw) : raw_(raw) {}

  static Id128 random();
  static Id128 from_hex(std::string_view hex);
  static Id128 from_bytes(ByteView raw);

  std::string hex() const;
  const std::array<std::uint8_t, 16>& raw() const { return raw_; }
  bool is_zero() const;

  auto operator<=>(const Id128&) const = default;

 private:
  std::array<std::uint8_t, 16> raw_{};
};

using FileId = Id128;

}  // namespace hab
