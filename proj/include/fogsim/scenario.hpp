#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "fogsim/runtime.hpp"
#include "fogsim/time.hpp"

#include "json.hpp"

namespace fogsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full scenario description. Everything is defaulted so that a minimal
/// scenario file is just a kind plus the knobs under study; every effective
/// value, defaulted or not, is echoed into run metadata.
struct ScenarioConfig {
  std::string kind{"custom"};  // deploy | migrate | availability_soak | custom
  std::uint64_t seed{1};
  double duration_s{60.0};
  double grace_s{30.0};  // post-duration settling window for in-flight work

  // cluster
  int nodes{3};
  std::optional<std::size_t> reply_threshold;  // default N-1
  std::optional<std::size_t> vote_threshold;   // default N
  bool owner_may_solve{true};

  // ledger
  double block_interval_ms{1000.0};
  double log_delay_ms{5.0};

  // links (one-way delays)
  double data_ms{2.0};
  double sdn_control_ms{3.0};
  double control_link_ms{2.0};
  double jitter_ms{0.0};

  // sdn
  double packet_in_ms{3.0};
  double rule_install_ms{3.0};
  bool health_filter{true};
  double rule_idle_timeout_ms{0.0};  // 0 = rules persist until invalidated
  std::string migration_cutover{"overlap"};  // overlap | atomic

  // runtime / health checks
  double probe_interval_ms{500.0};
  double probe_timeout_ms{100.0};
  int passes_required{1};
  std::map<std::string, ImageProfile> profiles = builtin_profiles();  // plus overrides

  // agent
  bool health_gating{false};  // the H parameter
  double stop_drain_ms{100.0};
  double base_free_cpu{1.0};
  double base_free_mem{1.0};
  double cpu_per_container{0.1};
  double mem_per_container{0.1};
  int problem_max_containers{0};

  // workload
  double request_interval_s{3.0};  // the R parameter
  double workload_start_s{0.0};
  int max_retries{3};
  double syn_timeout_ms{300.0};
  double response_timeout_ms{5000.0};
  double reconnect_backoff_ms{200.0};
  std::string client_ip{"192.168.0.90"};

  // service under test
  std::string service_id{"svc"};
  std::string profile_name{"nginx"};
  std::string vip{"170.100.8.33"};
  std::uint16_t service_port{80};
  std::string proto{"TCP"};
  std::uint16_t container_port{8080};
  int containers{1};

  // orchestration timeline
  double deploy_at_s{1.1};
  double migration_period_s{0.0};  // 0 = no scripted migrations
  double migration_start_s{0.0};   // 0 = first trigger after one period
  int migration_count{0};          // 0 = unbounded

  SimTime duration() const { return from_seconds(duration_s); }
  std::string node_ip(int index_1based) const {
    return "192.168.0." + std::to_string(10 + index_1based);
  }
};

/// Parses and validates a scenario document. Unknown fields anywhere are an
/// error; the kind presets fill scenario-specific defaults before explicit
/// values are applied.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario_file(const std::string& path);

/// Semantic validation (quorum satisfiability, positive rates, known
/// profiles). Throws ConfigError.
void validate_scenario(const ScenarioConfig& config);

/// Every effective parameter, for run metadata.
nlohmann::json echo_config(const ScenarioConfig& config);

/// Stable FNV-1a hash over the canonical config echo.
std::string config_hash(const ScenarioConfig& config);

}  // namespace fogsim
