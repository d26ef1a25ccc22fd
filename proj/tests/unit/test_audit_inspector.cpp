#include "catch2/catch_amalgamated.hpp"

#include <set>
#include <thread>

#include "fixtures.h"
#include "hab/audit/inspector.h"
#include "hab/common/error.h"
#include "oracles.h"

using namespace hab;
using namespace hab::audit;

namespace {

std::set<std::uint64_t> alert_seqs(const std::vector<Alert>& alerts) {
  std::set<std::uint64_t> out;
  for (const auto& a : alerts)
    if (a.bl_seq) out.insert(*a.bl_seq);
  return out;
}

std::set<std::string> categories(const std::vector<Alert>& alerts) {
  std::set<std::string> out;
  for (const auto& a : alerts) out.insert(a.category);
  return out;
}

/// Honest traffic of every workflow on one stack.
struct Traffic {
  testing::Scenario s;
  FileId file;
  Traffic() {
    file = s.store("<chart>ok</chart>").file_id;
    s.read_as(s.doctor, file);
    CHECK_THROWS_AS(s.read_as(s.nurse, file), Error);
    s.broker().request_access(s.nurse.token, file, "please");
    s.broker().revoke(s.patient.token, {broker::RevocationRequest::Target::kUser, s.doctor.user_id, file});
    CHECK_THROWS_AS(s.read_as(s.doctor, file), Error);
    s.broker().revoke(s.patient.token, {broker::RevocationRequest::Target::kUser, s.doctor.user_id, file, true});
    s.broker().revoke(s.patient.token, {broker::RevocationRequest::Target::kAttribute, "cardiology", std::nullopt});
    s.broker().update_policy(s.patient.token, file, abe::parse_policy("doctor OR nurse"));
    s.broker().emergency_retrieve(s.hospital.token, s.patient.user_id, file);
    s.broker().inbox(s.patient.token);
    s.broker().chain_status(s.patient.token);
    s.store("<chart>v2</chart>", "doctor", {2, 3}, false, file);
  }
  InspectionInput input() const {
    return {s.stack.gatekeeper_storage()->read_lines(), s.stack.brokers_log_storage()->read_lines(),
            s.stack.brokers_log_storage()->read_head()};
  }
};

class UnreadableStorage : public MemoryLogStorage {
 public:
  std::vector<std::string> read_lines() const override {
    throw Error(ErrorCode::kAuditFailure, "io error");
  }
};

}  // namespace

TEST_CASE("default rules load and cover every broker action") {
  const auto& rules = RuleSet::defaults();
  CHECK(rules.rules().size() >= 10);
  for (const char* kind : {"AACM.access_check", "MCP.retrieve_shares", "AACM.revoke", "AACM.store_policy",
                           "MCP.store_shares", "KMM.issue_key", "DMM.emergency_release"})
    CHECK(rules.covers(kind));
  CHECK_FALSE(rules.covers("MCP.export_all"));
  CHECK_THROWS_AS(RuleSet::parse("{\"rules\": []}"), Error);
  CHECK_THROWS_AS(RuleSet::parse("not json"), Error);
}

TEST_CASE("honest traffic raises nothing") {
  Traffic t;
  auto alerts = inspect(t.input(), t.s.stack.rules());
  for (const auto& a : alerts) INFO(a.to_json().dump());
  CHECK(alerts.empty());
}

TEST_CASE("synthetic corpus: exactly the injected entries, same as brute force") {
  SeededRandom rng("corpus");
  auto corpus = oracle::make_corpus(1000, rng);
  CHECK(corpus.gk_lines.size() + corpus.bl_lines.size() >= 1000);
  CHECK(corpus.injected.size() == 7);
  auto alerts = inspect({corpus.gk_lines, corpus.bl_lines, corpus.bl_head}, RuleSet::defaults());
  CHECK(alerts.size() == 7);
  CHECK(alert_seqs(alerts) == corpus.injected);
  CHECK(oracle::brute_force_violations(corpus.gk_lines, corpus.bl_lines) == corpus.injected);
  CHECK(categories(alerts) == std::set<std::string>{alert_category::kUnrequested, alert_category::kFieldMismatch,
                                                    alert_category::kMissingPrior, alert_category::kOutsideWindow,
                                                    alert_category::kExcess, alert_category::kUnknownAction});
}

TEST_CASE("mutations of honest logs are flagged") {
  Traffic t;
  const auto base = t.input();
  auto rules = t.s.stack.rules();

  SECTION("dropped gatekeeper entry") {
    auto in = base;
    std::size_t idx = 0;
    for (; idx < in.gk_lines.size(); ++idx)
      if (GatekeeperEntry::parse(in.gk_lines[idx]).kind == "retrieve") break;
    REQUIRE(idx < in.gk_lines.size());
    in.gk_lines.erase(in.gk_lines.begin() + idx);
    CHECK(categories(inspect(in, rules)).count(alert_category::kUnrequested));
  }
  SECTION("edited brokers-log entry") {
    auto in = base;
    auto j = Json::parse(in.bl_lines[3]);
    j["ts"] = j["ts"].get<std::int64_t>() + 1;
    in.bl_lines[3] = j.dump();
    auto alerts = inspect(in, rules);
    REQUIRE_FALSE(alerts.empty());
    CHECK(alerts[0].category == alert_category::kChainBroken);
    CHECK(alerts[0].bl_seq == 4);
  }
  SECTION("garbage line") {
    auto in = base;
    in.gk_lines.push_back("{broken");
    CHECK(categories(inspect(in, rules)).count(alert_category::kMalformed));
  }
  SECTION("forged but well-chained extra fetch") {
    auto storage = t.s.stack.brokers_log_storage();
    BrokersLog bl(storage);
    std::uint64_t retrieve_seq = 0;
    for (const auto& line : base.gk_lines) {
      auto e = GatekeeperEntry::parse(line);
      if (e.kind == "retrieve" && e.user_id == t.s.doctor.user_id) {
        retrieve_seq = e.seq;  // first one, which was allowed
        break;
      }
    }
    REQUIRE(retrieve_seq);
    bl.append(0, Module::kMcp, "retrieve_shares", retrieve_seq,
              {{"actor", t.s.doctor.user_id}, {"file_id", t.file.hex()}, {"patient_id", t.s.patient.user_id}});
    auto alerts = inspect(t.input(), rules);
    REQUIRE(alerts.size() == 1);
    CHECK(alerts[0].category == alert_category::kExcess);
    CHECK(std::count(alerts[0].recipients.begin(), alerts[0].recipients.end(), t.s.patient.user_id) == 1);
  }
}

TEST_CASE("service delivers once and survives restarts") {
  auto db = store::Database::open(":memory:");
  auto alerts = std::make_shared<AlertStore>(db);
  SeededRandom rng("service");
  auto corpus = oracle::make_corpus(300, rng);
  auto gk = std::make_shared<MemoryLogStorage>();
  auto bl = std::make_shared<MemoryLogStorage>();
  for (const auto& l : corpus.gk_lines) gk->append(l);
  const std::size_t half = corpus.bl_lines.size() / 2;
  for (std::size_t i = 0; i < half; ++i) bl->append(corpus.bl_lines[i]);
  bl->write_head(*corpus.bl_head);  // head of the full log: allowed to run ahead of nothing
  {
    InspectorService svc(gk, bl, alerts, db);
    svc.poll_once();
    CHECK(svc.cursor() == half);
  }
  for (std::size_t i = half; i < corpus.bl_lines.size(); ++i) bl->append(corpus.bl_lines[i]);
  {
    InspectorService svc(gk, bl, alerts, db);
    svc.poll_once();
    svc.poll_once();
    CHECK(svc.cursor() == corpus.bl_lines.size());
  }
  std::set<std::uint64_t> seqs;
  for (const auto& a : alerts->all())
    if (a.category != alert_category::kChainBroken && a.bl_seq) seqs.insert(*a.bl_seq);
  CHECK(seqs == corpus.injected);
  const auto count = alerts->count();
  InspectorService again(gk, bl, alerts, db);
  CHECK(again.poll_once() == 0);
  CHECK(alerts->count() == count);
}

TEST_CASE("background polling detects a violation within two intervals") {
  testing::Scenario s;
  auto& svc = s.stack.inspector();
  svc.poll_once();
  svc.start(std::chrono::milliseconds(100));
  BrokersLog bl(s.stack.brokers_log_storage());
  const auto before = s.stack.services().alerts->count();
  const auto start = std::chrono::steady_clock::now();
  bl.append(0, Module::kMcp, "retrieve_shares", 0, {{"actor", "u-x"}, {"file_id", "ff"}});
  while (s.stack.services().alerts->count() == before &&
         std::chrono::steady_clock::now() - start < std::chrono::seconds(2))
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  svc.stop();
  CHECK(s.stack.services().alerts->count() == before + 1);
  CHECK(ms <= 250);
  auto admin = s.stack.services().alerts->for_recipient(kAdminRecipient);
  REQUIRE_FALSE(admin.empty());
  CHECK(admin.back().category == alert_category::kUnrequested);
}

TEST_CASE("unreadable logs raise a health alert") {
  auto db = store::Database::open(":memory:");
  auto alerts = std::make_shared<AlertStore>(db);
  InspectorService svc(std::make_shared<UnreadableStorage>(), std::make_shared<MemoryLogStorage>(), alerts, db);
  CHECK(svc.poll_once() == 1);
  CHECK(svc.poll_once() == 0);
  CHECK(alerts->all().at(0).category == alert_category::kInspectorHealth);
}

TEST_CASE("alert store dedups and acknowledges") {
  auto db = store::Database::open(":memory:");
  ManualClock clock;
  AlertStore store(db, clock);
  Alert a;
  a.rule_id = "r1";
  a.category = alert_category::kUnrequested;
  a.bl_seq = 7;
  a.recipients = {"p-1", kAdminRecipient};
  CHECK(store.deliver(a));
  CHECK_FALSE(store.deliver(a));
  a.bl_seq = 8;
  CHECK(store.deliver(a));
  auto mine = store.for_recipient("p-1");
  REQUIRE(mine.size() == 2);
  CHECK_FALSE(mine[0].alert_id.empty());
  store.acknowledge("p-1", mine[0].alert_id);
  CHECK(store.for_recipient("p-1").size() == 1);
  CHECK(store.for_recipient("p-1", true).size() == 2);
  CHECK(store.for_recipient(kAdminRecipient).size() == 2);
}
