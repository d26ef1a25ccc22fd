#include "fixtures.h"

#include "hab/common/error.h"

namespace hab::testing {

TempDir::TempDir() {
  path_ = std::filesystem::temp_directory_path() / ("hab-test-" + Id128::random().hex());
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

broker::StackOptions fast_options(int clouds, int level) {
  broker::StackOptions o;
  o.level = level;
  o.access.scrypt = {1u << 10, 8, 1};
  for (int i = 1; i <= clouds; ++i) {
    storage::CloudBackendDescriptor d;
    d.cloud_id = "cloud-" + std::to_string(i);
    o.clouds.push_back(d);
  }
  return o;
}

User enroll(broker::Stack& stack, const std::string& username, access::UserKind kind,
            const abe::AttributeSet& attributes) {
  User u;
  u.username = username;
  u.password = "pw-" + username + "-correct horse";
  u.kind = kind;
  auto grant = stack.authority().issue_grant(username, kind, attributes, stack.services().clock->now_ms());
  auto reg = stack.broker().register_user(username, u.password, grant);
  u.user_id = reg.credential.user_id;
  u.key = reg.key;
  u.token = stack.broker().login(username, u.password).token;
  return u;
}

Scenario::Scenario(const broker::StackOptions& options) : stack(options) {
  using access::UserKind;
  patient = enroll(stack, "alice", UserKind::kPatient, {"patient"});
  provider = enroll(stack, "clinic", UserKind::kDataProvider, {"provider", "hospital_a"});
  doctor = enroll(stack, "dr-bob", UserKind::kDataRequestor, {"doctor", "cardiology", "hospital_a"});
  nurse = enroll(stack, "nurse-carol", UserKind::kDataRequestor, {"nurse", "hospital_a"});
  hospital = enroll(stack, "er-desk", UserKind::kHospital, {"hospital_b", "emergency_room"});
}

broker::FileMeta Scenario::store(const std::string& plaintext, const std::string& policy,
                                 std::pair<int, int> t_of_n, bool emergency_wrap,
                                 std::optional<FileId> target) {
  auto& b = broker();
  auto item = b.submit_upload(provider.token, patient.user_id,
                              broker::client::seal_for_patient(pp(), patient.user_id, to_bytes(plaintext)),
                              target);
  auto pending = b.pending_reviews(patient.token);
  const broker::ReviewItem* mine = nullptr;
  for (const auto& p : pending)
    if (p.review_id == item.review_id) mine = &p;
  if (!mine) throw Error(ErrorCode::kNotFound, "review item not queued");
  const Bytes opened = broker::client::open_review_payload(pp(), patient.key, mine->payload);
  auto ids = stack.services().mcp->cloud_ids();
  std::vector<std::string> clouds(ids.begin(), ids.begin() + t_of_n.second);
  auto d = broker::client::approve(pp(), patient.user_id, abe::parse_policy(policy), opened, clouds,
                                   t_of_n.first, emergency_wrap);
  return *b.decide(patient.token, item.review_id, d);
}

std::string Scenario::read_as(const User& user, const FileId& file) {
  auto doc = broker().retrieve(user.token, file);
  return to_string(abe::decrypt(pp(), user.key, doc));
}

}  // namespace hab::testing
