#pragma once

#include <memory>

#include "hab/abe/cpabe.h"
#include "hab/store/database.h"

namespace hab::broker {

/// Holds the CP-ABE authority (public parameters and master secret, persisted) and issues
/// user keys. Issued keys are handed to the caller and never written anywhere.
class KeyManager {
 public:
  /// Loads the authority from the database or runs setup at `level` on first use.
  /// Throws Error(kInconsistentParams) if a stored authority has a different level.
  KeyManager(std::shared_ptr<store::Database> db, int level, RandomSource& rng = system_random());

  const abe::PublicParams& public_params() const { return keys_.public_params; }
  int level() const { return keys_.public_params.level; }

  abe::UserKey issue_key(const abe::AttributeSet& attributes) const;

 private:
  std::shared_ptr<store::Database> db_;
  RandomSource& rng_;
  abe::KeyPair keys_;
};

/// Attribute every key carries for its own holder; it lets a data provider wrap a review
/// payload for the patient alone, and the patient wrap a file key for themselves.
std::string self_attribute(const std::string& user_id);

}  // namespace hab::broker
