#include "hab/sharing/gf256.h"

#include <array>

#include "hab/common/error.h"

namespace hab::sharing::gf256 {

namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};

  Tables() {
    // 3 generates the multiplicative group.
    std::uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = x;
      log[x] = static_cast<std::uint8_t>(i);
      std::uint8_t doubled = static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0));
      x = static_cast<std::uint8_t>(doubled ^ x);
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const Tables& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw Error(ErrorCode::kInvalidArgument, "zero has no inverse in GF(256)");
  const Tables& t = tables();
  return t.exp[255 - t.log[a]];
}

}  // namespace hab::sharing::gf256
