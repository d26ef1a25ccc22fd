#pragma once

#include <cstdint>

namespace hab::sharing::gf256 {

// GF(2^8) with the AES reduction polynomial x^8 + x^4 + x^3 + x + 1.

std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);  // a != 0
inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }
inline std::uint8_t div(std::uint8_t a, std::uint8_t b) { return mul(a, inv(b)); }

}  // namespace hab::sharing::gf256
