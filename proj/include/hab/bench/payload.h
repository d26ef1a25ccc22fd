#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "hab/common/bytes.h"
#include "hab/common/random.h"

namespace hab::bench {

/// "1k", "10K", "500kb", "1m", "2048" -> bytes (k = 1024).
std::size_t parse_size(std::string_view text);
/// 1024 -> "1 KB", 1048576 -> "1 MB", others in bytes.
std::string size_label(std::size_t bytes);

/// Well-formed random XML document of exactly `size` bytes (size >= 64).
Bytes random_xml(std::size_t size, RandomSource& rng = system_random());

}  // namespace hab::bench
