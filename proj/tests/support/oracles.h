#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hab/audit/records.h"
#include "hab/common/bytes.h"
#include "hab/common/clock.h"
#include "hab/common/random.h"
#include "hab/sharing/shamir.h"

// Reference implementations written without the library's code paths; tests compare the
// library against these.
namespace hab::oracle {

/// Carry-less multiply with reduction by 0x11b, bit by bit.
std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b);
/// Brute-force inverse (search over all 255 candidates).
std::uint8_t gf_inv(std::uint8_t a);
/// Lagrange interpolation at 0 over all given shares' payloads.
Bytes interpolate(const std::vector<sharing::Share>& shares);

/// Threshold tree with its own evaluator and text rendering.
struct Policy {
  std::string attribute;  // leaf when children is empty
  int k = 0;
  std::vector<Policy> children;

  bool eval(const std::set<std::string>& attrs) const;
  std::string text() const;
};
/// Random tree over `universe`, depth <= max_depth, fan-out 2..3, mixing AND, OR and k-of-n.
Policy random_policy(const std::vector<std::string>& universe, RandomSource& rng, int max_depth = 3);

/// Re-checks a brokers'-log chain from raw lines: strips entry_hash from each JSON record,
/// hashes sorted-key JSON || prev_hash with one-shot SHA-256. Returns the first bad seq.
std::optional<std::uint64_t> first_chain_break(const std::vector<std::string>& lines);

/// Synthetic gatekeeper / brokers'-log corpus with labelled violations.
struct Corpus {
  std::vector<std::string> gk_lines;
  std::vector<std::string> bl_lines;
  std::optional<std::string> bl_head;
  /// Brokers'-log sequence numbers deliberately made invalid.
  std::set<std::uint64_t> injected;
};
/// About `total` interleaved entries (gatekeeper + brokers' log) of honest retrieve,
/// denied-retrieve, policy-update, revoke and login requests, plus one injection of each
/// violation type: unrequested action, wrong request kind, file-id mismatch, missing access
/// check, late action, duplicate action, unknown action kind.
Corpus make_corpus(std::size_t total, RandomSource& rng, std::int64_t window_ms = 30'000);

/// Brute-force matcher over the same corpus: every brokers'-log entry is compared against
/// every gatekeeper entry and every earlier brokers'-log entry. Returns offending seqs.
std::set<std::uint64_t> brute_force_violations(const std::vector<std::string>& gk_lines,
                                               const std::vector<std::string>& bl_lines,
                                               std::int64_t window_ms = 30'000);

}  // namespace hab::oracle
