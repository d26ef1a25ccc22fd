#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hab/common/clock.h"
#include "hab/sharing/shamir.h"
#include "hab/storage/backend.h"
#include "hab/store/database.h"

namespace hab::storage {

struct IndexEntry {
  FileId file_id;
  int share_id = 0;
  std::string cloud_id;
  std::string object_key;
  std::int64_t stored_at_ms = 0;

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

struct Orphan {
  std::string cloud_id;
  std::string object_key;
  std::int64_t recorded_at_ms = 0;
};

/// Backend object key for one share: "<file_id hex>/<share_id>".
std::string object_key(const FileId& file_id, int share_id);

/// Multi-cloud proxy: places one share per backend, keeps the (file, share, cloud) index in
/// the database, and reassembles files from the first T reachable shares.
class MultiCloudProxy {
 public:
  MultiCloudProxy(std::shared_ptr<store::Database> db, const Clock& clock = system_clock());

  /// Throws kDuplicateId if the id is taken.
  std::string register_backend(const CloudBackendDescriptor& desc);
  std::string register_backend(const std::string& cloud_id, std::shared_ptr<CloudBackend> backend);

  std::shared_ptr<CloudBackend> backend(const std::string& cloud_id) const;
  std::vector<std::string> cloud_ids() const;
  std::map<std::string, bool> health() const;

  /// Share i goes to cloud_ids[i]. All-or-nothing: on any backend failure the objects
  /// already written are removed and no index row is left for the file.
  std::vector<IndexEntry> upload_shares(const FileId& file_id,
                                        const std::vector<sharing::Share>& shares,
                                        const std::vector<std::string>& cloud_ids);

  /// Fetches shares concurrently and combines the first `t` valid ones.
  /// Throws kNotFound or kInsufficientLiveShares.
  Bytes retrieve_file(const FileId& file_id, int t);

  /// Removes index rows and backend objects; unreachable objects go to the orphan list.
  /// Returns the number of index rows removed. Throws kNotFound.
  int delete_file(const FileId& file_id);

  std::vector<IndexEntry> index(const FileId& file_id) const;
  std::vector<IndexEntry> all_entries() const;
  std::vector<Orphan> orphans() const;
  /// Retries orphan deletions; returns how many were cleared.
  int cleanup_orphans();

 private:
  std::shared_ptr<store::Database> db_;
  const Clock& clock_;
  mutable std::shared_mutex backends_mu_;
  std::map<std::string, std::shared_ptr<CloudBackend>> backends_;
};

}  // namespace hab::storage
