#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "hab/broker/stack.h"

namespace hab::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// In-memory stack options with `clouds` in-memory backends (cloud-1..), a cheap password
/// hash and the given pairing level.
broker::StackOptions fast_options(int clouds = 5, int level = 80);

struct User {
  std::string user_id;
  std::string username;
  std::string password;
  std::string token;
  access::UserKind kind = access::UserKind::kDataRequestor;
  abe::UserKey key;
};

/// Registers through the broker with an authority grant and logs in.
User enroll(broker::Stack& stack, const std::string& username, access::UserKind kind,
            const abe::AttributeSet& attributes);

/// Patient, provider, matching doctor, non-matching nurse and an ER hospital on one stack.
struct Scenario {
  explicit Scenario(const broker::StackOptions& options = fast_options());

  broker::Stack stack;
  User patient, provider, doctor, nurse, hospital;
  broker::Broker& broker() { return stack.broker(); }
  const abe::PublicParams& pp() { return stack.broker().public_params(); }

  /// Submit by the provider, approve by the patient under `policy` on the first `t_of_n.second`
  /// clouds with threshold `t_of_n.first`.
  broker::FileMeta store(const std::string& plaintext,
                         const std::string& policy = "doctor AND cardiology",
                         std::pair<int, int> t_of_n = {3, 5}, bool emergency_wrap = true,
                         std::optional<FileId> target = std::nullopt);
  std::string read_as(const User& user, const FileId& file);
};

}  // namespace hab::testing
