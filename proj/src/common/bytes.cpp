#include "hab/common/bytes.h"

#include <openssl/evp.h>

#include "hab/common/error.h"
#include "hab/common/random.h"

namespace hab {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kMalformed, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kMalformed, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string base64_encode(ByteView data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                          static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::kMalformed, "base64 length not a multiple of 4");
  if (text.empty()) return {};
  Bytes out(3 * text.size() / 4);
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::kMalformed, "invalid base64");
  // EVP_DecodeBlock does not account for padding.
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

void ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::blob16(ByteView data) {
  if (data.size() > 0xffff) throw Error(ErrorCode::kInvalidArgument, "blob too large for u16 length");
  u16(static_cast<std::uint16_t>(data.size()));
  raw(data);
}

void ByteWriter::blob32(ByteView data) {
  if (data.size() > 0xffffffffULL) throw Error(ErrorCode::kInvalidArgument, "blob too large");
  u32(static_cast<std::uint32_t>(data.size()));
  raw(data);
}

void ByteWriter::str16(std::string_view s) {
  blob16(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

ByteView ByteReader::raw(std::size_t n) {
  if (n > remaining()) throw Error(ErrorCode::kMalformed, "truncated input");
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t ByteReader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

void ByteReader::expect(std::string_view magic) {
  auto b = raw(magic.size());
  if (!std::equal(b.begin(), b.end(), magic.begin()))
    throw Error(ErrorCode::kMalformed, "bad magic, expected " + std::string(magic));
}

Bytes ByteReader::blob16() {
  auto n = u16();
  auto b = raw(n);
  return Bytes(b.begin(), b.end());
}

Bytes ByteReader::blob32() {
  auto n = u32();
  auto b = raw(n);
  return Bytes(b.begin(), b.end());
}

std::string ByteReader::str16() {
  auto b = blob16();
  return std::string(b.begin(), b.end());
}

void ByteReader::expect_end() const {
  if (remaining() != 0) throw Error(ErrorCode::kMalformed, "trailing bytes");
}

Id128 Id128::random() {
  std::array<std::uint8_t, 16> raw{};
  system_random().fill(raw);
  return Id128(raw);
}

Id128 Id128::from_hex(std::string_view hex) {
  auto b = hab::from_hex(hex);
  return from_bytes(b);
}

Id128 Id128::from_bytes(ByteView raw) {
  if (raw.size() != 16) throw Error(ErrorCode::kMalformed, "identifier must be 16 bytes");
  std::array<std::uint8_t, 16> a{};
  std::copy(raw.begin(), raw.end(), a.begin());
  return Id128(a);
}

std::string Id128::hex() const { return to_hex(raw_); }

bool Id128::is_zero() const {
  for (auto b : raw_)
    if (b != 0) return false;
  return true;
}

}  // namespace hab
