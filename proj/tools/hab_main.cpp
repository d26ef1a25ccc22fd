#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hab/api/service.h"
#include "hab/audit/brokers_log.h"
#include "hab/audit/inspector.h"
#include "hab/bench/bench.h"
#include "hab/bench/payload.h"
#include "hab/common/error.h"

namespace {

hab::api::ApiService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

std::vector<std::size_t> parse_sizes(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(hab::bench::parse_size(item));
  return out;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return static_cast<bool>(out);
}

int cmd_serve(const std::string& config_path, const std::string& listen, const std::string& db,
              int clouds) {
  hab::api::ApiConfig cfg;
  if (!config_path.empty()) cfg = hab::api::ApiConfig::load(config_path);
  if (cfg.backends.empty()) cfg.backends = hab::api::ApiConfig::memory_clouds(clouds);
  cfg.apply_env();
  if (!listen.empty()) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw hab::Error(hab::ErrorCode::kInvalidArgument, "--listen must be host:port");
    cfg.listen_host = listen.substr(0, colon);
    cfg.listen_port = std::stoi(listen.substr(colon + 1));
  }
  if (!db.empty()) cfg.db_path = db;
  hab::api::ApiService service(cfg);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "hab: listening on " << cfg.listen_host << ":" << cfg.listen_port << " with "
            << cfg.backends.size() << " clouds, " << cfg.broker_count << " broker(s)\n";
  service.run();
  g_service = nullptr;
  return 0;
}

int cmd_bench(const hab::bench::BenchConfig& cfg, const std::string& out, const std::string& json) {
  auto report = hab::bench::run_bench(cfg);
  const std::string text = report.to_text();
  std::cout << text;
  if (!out.empty() && !write_file(out, text)) {
    std::cerr << "hab: cannot write " << out << "\n";
    return 2;
  }
  if (!json.empty() && !write_file(json, report.to_jsonl())) {
    std::cerr << "hab: cannot write " << json << "\n";
    return 2;
  }
  return report.passed() ? 0 : 1;
}

int cmd_verify_log(const std::string& path) {
  hab::audit::FileLogStorage storage(path);
  auto status = hab::audit::verify_lines(storage.read_lines(), storage.read_head());
  if (status.intact) {
    std::cout << "intact (" << storage.read_lines().size() << " entries)\n";
    return 0;
  }
  std::cout << "broken at " << status.broken_at.value_or(0) << ": " << status.reason << "\n";
  return 1;
}

int cmd_inspect(const std::string& gk, const std::string& bl, const std::string& rules_path) {
  hab::audit::FileLogStorage gks(gk), bls(bl);
  hab::audit::InspectionInput in{gks.read_lines(), bls.read_lines(), bls.read_head()};
  const auto rules = rules_path.empty() ? hab::audit::RuleSet::defaults() : hab::audit::RuleSet::load(rules_path);
  auto alerts = hab::audit::inspect(in, rules);
  for (const auto& a : alerts) std::cout << a.to_json().dump() << "\n";
  std::cerr << alerts.size() << " alert(s)\n";
  return alerts.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Health Access Broker service and tools"};
  app.require_subcommand(1);

  std::string config_path, listen, db;
  int clouds = 5;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "JSON configuration file");
  serve->add_option("--listen", listen, "host:port (overrides config and HAB_LISTEN)");
  serve->add_option("--db", db, "Database path (overrides config and HAB_DB)");
  serve->add_option("--clouds", clouds, "In-memory clouds when the config lists none")->check(CLI::Range(1, 255));

  hab::bench::BenchConfig bench_cfg;
  std::string sizes = "1k,10k,100k,500k,1m", out, json;
  auto* bench = app.add_subcommand("bench", "Time split / encrypt / upload / revoke / policy update");
  bench->add_option("--sizes", sizes, "Comma-separated sizes (k = 1024)");
  bench->add_option("--reps", bench_cfg.reps, "Repetitions per cell (>= 5)")->check(CLI::Range(5, 10000));
  bench->add_option("--out", out, "Text report path");
  bench->add_option("--json", json, "JSON lines report path");
  bench->add_option("--clouds", bench_cfg.clouds, "Number of mock clouds")->check(CLI::Range(1, 255));
  bench->add_option("--threshold", bench_cfg.threshold, "Reconstruction threshold");
  bench->add_option("--delay-ms", bench_cfg.cloud_delay_ms, "Mock cloud latency per call");
  bench->add_option("--level", bench_cfg.security_level, "Pairing security level (80, 112, 128)");

  std::string log_path;
  auto* verify = app.add_subcommand("verify-log", "Re-verify a brokers' log hash chain");
  verify->add_option("path", log_path, "brokers.log (its .head file is read too)")->required();

  std::string gk_path, bl_path, rules_path;
  auto* inspect = app.add_subcommand("inspect", "Cross-match gatekeeper and brokers' logs once");
  inspect->add_option("--gatekeeper", gk_path, "gatekeeper.log")->required();
  inspect->add_option("--brokers-log", bl_path, "brokers.log")->required();
  inspect->add_option("--rules", rules_path, "Rule file (default: built-in rules)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return cmd_serve(config_path, listen, db, clouds);
    if (*bench) {
      bench_cfg.sizes = parse_sizes(sizes);
      return cmd_bench(bench_cfg, out, json);
    }
    if (*verify) return cmd_verify_log(log_path);
    if (*inspect) return cmd_inspect(gk_path, bl_path, rules_path);
  } catch (const hab::Error& e) {
    std::cerr << "hab: " << hab::error_code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
