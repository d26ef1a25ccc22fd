#include "hab/bench/payload.h"

#include <cctype>

#include "hab/common/error.h"

namespace hab::bench {

std::size_t parse_size(std::string_view text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t.size() > 1 && t.back() == 'b' && !std::isdigit(static_cast<unsigned char>(t[t.size() - 2]))) t.pop_back();
  std::size_t mult = 1;
  if (!t.empty() && (t.back() == 'k' || t.back() == 'm')) {
    mult = t.back() == 'k' ? 1024 : 1024 * 1024;
    t.pop_back();
  }
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw Error(ErrorCode::kInvalidArgument, "bad size '" + std::string(text) + "'");
  const std::size_t v = std::stoull(t) * mult;
  if (v == 0) throw Error(ErrorCode::kInvalidArgument, "size must be positive");
  return v;
}

std::string size_label(std::size_t bytes) {
  if (bytes % (1024 * 1024) == 0) return std::to_string(bytes / (1024 * 1024)) + " MB";
  if (bytes % 1024 == 0) return std::to_string(bytes / 1024) + " KB";
  return std::to_string(bytes) + " B";
}

Bytes random_xml(std::size_t size, RandomSource& rng) {
  static constexpr std::string_view kHead = "<?xml version=\"1.0\"?><record>";
  static constexpr std::string_view kTail = "</record>";
  static constexpr std::string_view kTags[] = {"obs", "note", "lab", "med", "vital"};
  static constexpr char kText[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ";
  if (size < 64) throw Error(ErrorCode::kInvalidArgument, "payload must be at least 64 bytes");

  std::string out(kHead);
  out.reserve(size);
  const std::size_t body_end = size - kTail.size();
  auto text = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out += kText[rng.uniform(sizeof(kText) - 1)];
  };
  for (;;) {
    const std::string_view tag = kTags[rng.uniform(std::size(kTags))];
    const std::size_t overhead = 2 * tag.size() + 5;
    const std::size_t room = body_end - out.size();
    if (room < overhead + 1) {
      text(room);  // filler text directly inside <record>
      break;
    }
    const std::size_t want = 1 + rng.uniform(200);
    const std::size_t n = std::min(want, room - overhead);
    out += '<';
    out += tag;
    out += '>';
    text(n);
    out += "</";
    out += tag;
    out += '>';
  }
  out += kTail;
  return to_bytes(out);
}

}  // namespace hab::bench
