#include "hab/storage/mcp.h"

#include <condition_variable>
#include <future>
#include <set>
#include <thread>

#include "hab/common/error.h"

namespace hab::storage {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS share_index (
  file_id    TEXT NOT NULL,
  share_id   INTEGER NOT NULL,
  cloud_id   TEXT NOT NULL,
  object_key TEXT NOT NULL,
  stored_at  INTEGER NOT NULL,
  PRIMARY KEY (file_id, share_id)
);
CREATE TABLE IF NOT EXISTS share_orphans (
  cloud_id    TEXT NOT NULL,
  object_key  TEXT NOT NULL,
  recorded_at INTEGER NOT NULL,
  PRIMARY KEY (cloud_id, object_key)
);
)sql";

IndexEntry read_entry(const store::Statement& st) {
  IndexEntry e;
  e.file_id = FileId::from_hex(st.col_text(0));
  e.share_id = static_cast<int>(st.col_int(1));
  e.cloud_id = st.col_text(2);
  e.object_key = st.col_text(3);
  e.stored_at_ms = st.col_int(4);
  return e;
}

// Shared between retrieve_file and its fetch threads; outlives the call if needed.
struct FetchState {
  std::mutex mu;
  std::condition_variable cv;
  std::vector<sharing::Share> shares;
  int finished = 0;
  bool enough = false;
};

}  // namespace

std::string object_key(const FileId& file_id, int share_id) {
  return file_id.hex() + "/" + std::to_string(share_id);
}

MultiCloudProxy::MultiCloudProxy(std::shared_ptr<store::Database> db, const Clock& clock)
    : db_(std::move(db)), clock_(clock) {
  db_->exec(kSchema);
}

std::string MultiCloudProxy::register_backend(const CloudBackendDescriptor& desc) {
  return register_backend(desc.cloud_id, make_backend(desc));
}

std::string MultiCloudProxy::register_backend(const std::string& cloud_id,
                                              std::shared_ptr<CloudBackend> backend) {
  if (cloud_id.empty() || !backend)
    throw Error(ErrorCode::kInvalidArgument, "backend needs an id and an implementation");
  std::unique_lock lock(backends_mu_);
  if (!backends_.emplace(cloud_id, std::move(backend)).second)
    throw Error(ErrorCode::kDuplicateId, "cloud id already registered: " + cloud_id);
  return cloud_id;
}

std::shared_ptr<CloudBackend> MultiCloudProxy::backend(const std::string& cloud_id) const {
  std::shared_lock lock(backends_mu_);
  auto it = backends_.find(cloud_id);
  if (it == backends_.end()) throw Error(ErrorCode::kUnknownCloud, "unknown cloud " + cloud_id);
  return it->second;
}

std::vector<std::string> MultiCloudProxy::cloud_ids() const {
  std::shared_lock lock(backends_mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : backends_) out.push_back(id);
  return out;
}

std::map<std::string, bool> MultiCloudProxy::health() const {
  std::map<std::string, std::shared_ptr<CloudBackend>> snapshot;
  {
    std::shared_lock lock(backends_mu_);
    snapshot = backends_;
  }
  std::map<std::string, bool> out;
  for (const auto& [id, b] : snapshot) {
    try {
      out[id] = b->health();
    } catch (const std::exception&) {
      out[id] = false;
    }
  }
  return out;
}

std::vector<IndexEntry> MultiCloudProxy::upload_shares(const FileId& file_id,
                                                       const std::vector<sharing::Share>& shares,
                                                       const std::vector<std::string>& cloud_ids) {
  if (shares.empty() || shares.size() != cloud_ids.size())
    throw Error(ErrorCode::kInvalidArgument, "need exactly one cloud per share");
  if (std::set<std::string>(cloud_ids.begin(), cloud_ids.end()).size() != cloud_ids.size())
    throw Error(ErrorCode::kInvalidArgument, "each share must go to a different cloud");
  std::vector<std::shared_ptr<CloudBackend>> targets;
  for (const auto& id : cloud_ids) targets.push_back(backend(id));
  for (const auto& s : shares)
    if (s.file_id != file_id)
      throw Error(ErrorCode::kLabelMismatch, "share labeled for a different file");
  if (!index(file_id).empty())
    throw Error(ErrorCode::kConflict, "file already indexed: " + file_id.hex());

  std::vector<std::future<void>> puts;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    puts.push_back(std::async(std::launch::async, [&, i] {
      targets[i]->put(object_key(file_id, shares[i].share_id), shares[i].serialize());
    }));
  }
  std::vector<bool> stored(shares.size(), false);
  std::string failure;
  for (std::size_t i = 0; i < puts.size(); ++i) {
    try {
      puts[i].get();
      stored[i] = true;
    } catch (const std::exception& e) {
      if (failure.empty()) failure = cloud_ids[i] + ": " + e.what();
    }
  }
  if (!failure.empty()) {
    for (std::size_t i = 0; i < shares.size(); ++i) {
      if (!stored[i]) continue;
      const std::string key = object_key(file_id, shares[i].share_id);
      try {
        targets[i]->remove(key);
      } catch (const std::exception&) {
        store::Statement(*db_, "INSERT OR REPLACE INTO share_orphans VALUES (?, ?, ?)")
            .bind(1, cloud_ids[i])
            .bind(2, key)
            .bind(3, clock_.now_ms())
            .run();
      }
    }
    throw Error(ErrorCode::kBackendFailure, "upload rolled back: " + failure);
  }

  std::vector<IndexEntry> entries;
  const std::int64_t now = clock_.now_ms();
  store::Transaction tx(*db_);
  for (std::size_t i = 0; i < shares.size(); ++i) {
    IndexEntry e{file_id, shares[i].share_id, cloud_ids[i], object_key(file_id, shares[i].share_id),
                 now};
    store::Statement(*db_, "INSERT INTO share_index VALUES (?, ?, ?, ?, ?)")
        .bind(1, e.file_id.hex())
        .bind(2, static_cast<std::int64_t>(e.share_id))
        .bind(3, e.cloud_id)
        .bind(4, e.object_key)
        .bind(5, e.stored_at_ms)
        .run();
    entries.push_back(std::move(e));
  }
  tx.commit();
  return entries;
}

Bytes MultiCloudProxy::retrieve_file(const FileId& file_id, int t) {
  const auto entries = index(file_id);
  if (entries.empty()) throw Error(ErrorCode::kNotFound, "file not indexed: " + file_id.hex());
  if (t < 1) throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  if (entries.size() < static_cast<std::size_t>(t))
    throw Error(ErrorCode::kInsufficientLiveShares, "index holds fewer than T shares");

  auto state = std::make_shared<FetchState>();
  const std::size_t total = entries.size();
  for (const auto& entry : entries) {
    std::shared_ptr<CloudBackend> b;
    try {
      b = backend(entry.cloud_id);
    } catch (const Error&) {
    }
    std::thread([state, b, entry, file_id] {
      std::optional<sharing::Share> share;
      try {
        if (b) {
          auto s = sharing::Share::deserialize(b->get(entry.object_key));
          if (s.file_id == file_id && s.share_id == entry.share_id) share = std::move(s);
        }
      } catch (const std::exception&) {
      }
      std::lock_guard lock(state->mu);
      ++state->finished;
      if (share && !state->enough) state->shares.push_back(std::move(*share));
      state->cv.notify_all();
    }).detach();
  }

  std::vector<sharing::Share> got;
  {
    std::unique_lock lock(state->mu);
    state->cv.wait(lock, [&] {
      return state->shares.size() >= static_cast<std::size_t>(t) || state->finished == static_cast<int>(total);
    });
    state->enough = true;  // late arrivals are dropped
    got = state->shares;
  }
  if (got.size() < static_cast<std::size_t>(t))
    throw Error(ErrorCode::kInsufficientLiveShares,
                "only " + std::to_string(got.size()) + " of " + std::to_string(t) +
                    " required shares reachable");
  got.resize(static_cast<std::size_t>(t));
  return sharing::combine(got, t);
}

int MultiCloudProxy::delete_file(const FileId& file_id) {
  const auto entries = index(file_id);
  if (entries.empty()) throw Error(ErrorCode::kNotFound, "file not indexed: " + file_id.hex());
  std::vector<const IndexEntry*> unreachable;
  for (const auto& e : entries) {
    try {
      backend(e.cloud_id)->remove(e.object_key);
    } catch (const std::exception&) {
      unreachable.push_back(&e);
    }
  }
  store::Transaction tx(*db_);
  const int removed = store::Statement(*db_, "DELETE FROM share_index WHERE file_id = ?")
                          .bind(1, file_id.hex())
                          .run();
  for (const auto* e : unreachable) {
    store::Statement(*db_, "INSERT OR REPLACE INTO share_orphans VALUES (?, ?, ?)")
        .bind(1, e->cloud_id)
        .bind(2, e->object_key)
        .bind(3, clock_.now_ms())
        .run();
  }
  tx.commit();
  return removed;
}

std::vector<IndexEntry> MultiCloudProxy::index(const FileId& file_id) const {
  store::Statement st(*db_,
                      "SELECT file_id, share_id, cloud_id, object_key, stored_at FROM share_index "
                      "WHERE file_id = ? ORDER BY share_id");
  st.bind(1, file_id.hex());
  std::vector<IndexEntry> out;
  while (st.step()) out.push_back(read_entry(st));
  return out;
}

std::vector<IndexEntry> MultiCloudProxy::all_entries() const {
  store::Statement st(*db_,
                      "SELECT file_id, share_id, cloud_id, object_key, stored_at FROM share_index "
                      "ORDER BY file_id, share_id");
  std::vector<IndexEntry> out;
  while (st.step()) out.push_back(read_entry(st));
  return out;
}

std::vector<Orphan> MultiCloudProxy::orphans() const {
  store::Statement st(*db_, "SELECT cloud_id, object_key, recorded_at FROM share_orphans ORDER BY 1, 2");
  std::vector<Orphan> out;
  while (st.step()) out.push_back({st.col_text(0), st.col_text(1), st.col_int(2)});
  return out;
}

int MultiCloudProxy::cleanup_orphans() {
  int cleared = 0;
  for (const auto& o : orphans()) {
    try {
      backend(o.cloud_id)->remove(o.object_key);
    } catch (const std::exception&) {
      continue;
    }
    store::Statement(*db_, "DELETE FROM share_orphans WHERE cloud_id = ? AND object_key = ?")
        .bind(1, o.cloud_id)
        .bind(2, o.object_key)
        .run();
    ++cleared;
  }
  return cleared;
}

}  // namespace hab::storage
