#include "fogsim/scenario.hpp"

#include <fstream>
#include <set>
#include <vector>

namespace fogsim {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.count(it.key()) == 0) {
      throw ConfigError("unknown field '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void get_to(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) obj.at(key).get_to(out);
}

void get_threshold(const json& obj, const char* key, std::optional<std::size_t>& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<std::size_t>();
}

ImageProfile parse_profile(const std::string& name, const json& body, const ImageProfile* base) {
  require_keys(body, "profiles." + name, {"startup_ms", "processing_ms", "mode"});
  ImageProfile p = base != nullptr ? *base : ImageProfile{name, 0, 0, ConnectionMode::PerRequest};
  p.name = name;
  if (body.contains("startup_ms")) p.startup_time = from_ms(body.at("startup_ms").get<std::int64_t>());
  if (body.contains("processing_ms")) {
    p.per_request_processing = from_ms(body.at("processing_ms").get<std::int64_t>());
  }
  if (body.contains("mode")) {
    const std::string mode = body.at("mode").get<std::string>();
    if (mode == "per_request") {
      p.connection_mode = ConnectionMode::PerRequest;
    } else if (mode == "persistent_stream") {
      p.connection_mode = ConnectionMode::PersistentStream;
    } else {
      throw ConfigError("unknown connection mode '" + mode + "'");
    }
  }
  return p;
}

void apply_kind_presets(ScenarioConfig& c) {
  if (c.kind == "deploy") {
    // No scripted migrations; the episode under study is the deployment.
  } else if (c.kind == "migrate") {
    if (c.migration_period_s == 0.0 && c.migration_count == 0) {
      c.migration_start_s = 30.0;
      c.migration_period_s = 30.0;
      c.migration_count = 1;
    }
  } else if (c.kind == "availability_soak") {
    c.duration_s = 86400.0;
  } else if (c.kind != "custom") {
    throw ConfigError("unknown scenario kind '" + c.kind + "'");
  }
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario document must be a JSON object");
  require_keys(doc, "scenario",
               {"kind", "seed", "duration_s", "grace_s", "R", "H", "cluster", "ledger", "links",
                "sdn", "runtime", "agent", "workload", "service", "orchestration"});

  ScenarioConfig c;
  get_to(doc, "kind", c.kind);
  apply_kind_presets(c);

  get_to(doc, "seed", c.seed);
  get_to(doc, "duration_s", c.duration_s);
  get_to(doc, "grace_s", c.grace_s);
  // Top-level shorthands for the two headline experiment knobs.
  get_to(doc, "R", c.request_interval_s);
  get_to(doc, "H", c.health_gating);

  if (doc.contains("cluster")) {
    const json& o = doc.at("cluster");
    require_keys(o, "cluster", {"nodes", "reply_threshold", "vote_threshold", "owner_may_solve"});
    get_to(o, "nodes", c.nodes);
    get_threshold(o, "reply_threshold", c.reply_threshold);
    get_threshold(o, "vote_threshold", c.vote_threshold);
    get_to(o, "owner_may_solve", c.owner_may_solve);
  }
  if (doc.contains("ledger")) {
    const json& o = doc.at("ledger");
    require_keys(o, "ledger", {"block_interval_ms", "log_delay_ms"});
    get_to(o, "block_interval_ms", c.block_interval_ms);
    get_to(o, "log_delay_ms", c.log_delay_ms);
  }
  if (doc.contains("links")) {
    const json& o = doc.at("links");
    require_keys(o, "links", {"data_ms", "sdn_control_ms", "control_link_ms", "jitter_ms"});
    get_to(o, "data_ms", c.data_ms);
    get_to(o, "sdn_control_ms", c.sdn_control_ms);
    get_to(o, "control_link_ms", c.control_link_ms);
    get_to(o, "jitter_ms", c.jitter_ms);
  }
  if (doc.contains("sdn")) {
    const json& o = doc.at("sdn");
    require_keys(o, "sdn",
                 {"packet_in_ms", "rule_install_ms", "health_filter", "rule_idle_timeout_ms",
                  "migration_cutover"});
    get_to(o, "packet_in_ms", c.packet_in_ms);
    get_to(o, "rule_install_ms", c.rule_install_ms);
    get_to(o, "health_filter", c.health_filter);
    get_to(o, "rule_idle_timeout_ms", c.rule_idle_timeout_ms);
    get_to(o, "migration_cutover", c.migration_cutover);
  }
  if (doc.contains("runtime")) {
    const json& o = doc.at("runtime");
    require_keys(o, "runtime",
                 {"probe_interval_ms", "probe_timeout_ms", "passes_required", "profiles"});
    get_to(o, "probe_interval_ms", c.probe_interval_ms);
    get_to(o, "probe_timeout_ms", c.probe_timeout_ms);
    get_to(o, "passes_required", c.passes_required);
    if (o.contains("profiles")) {
      for (auto it = o.at("profiles").begin(); it != o.at("profiles").end(); ++it) {
        auto existing = c.profiles.find(it.key());
        const ImageProfile* base = existing == c.profiles.end() ? nullptr : &existing->second;
        c.profiles[it.key()] = parse_profile(it.key(), it.value(), base);
      }
    }
  }
  if (doc.contains("agent")) {
    const json& o = doc.at("agent");
    require_keys(o, "agent",
                 {"health_gating", "stop_drain_ms", "base_free_cpu", "base_free_mem",
                  "cpu_per_container", "mem_per_container", "problem_max_containers"});
    get_to(o, "health_gating", c.health_gating);
    get_to(o, "stop_drain_ms", c.stop_drain_ms);
    get_to(o, "base_free_cpu", c.base_free_cpu);
    get_to(o, "base_free_mem", c.base_free_mem);
    get_to(o, "cpu_per_container", c.cpu_per_container);
    get_to(o, "mem_per_container", c.mem_per_container);
    get_to(o, "problem_max_containers", c.problem_max_containers);
  }
  if (doc.contains("workload")) {
    const json& o = doc.at("workload");
    require_keys(o, "workload",
                 {"request_interval_s", "start_s", "max_retries", "syn_timeout_ms",
                  "response_timeout_ms", "reconnect_backoff_ms", "client_ip"});
    get_to(o, "request_interval_s", c.request_interval_s);
    get_to(o, "start_s", c.workload_start_s);
    get_to(o, "max_retries", c.max_retries);
    get_to(o, "syn_timeout_ms", c.syn_timeout_ms);
    get_to(o, "response_timeout_ms", c.response_timeout_ms);
    get_to(o, "reconnect_backoff_ms", c.reconnect_backoff_ms);
    get_to(o, "client_ip", c.client_ip);
  }
  if (doc.contains("service")) {
    const json& o = doc.at("service");
    require_keys(o, "service",
                 {"service_id", "profile", "vip", "port", "proto", "container_port", "containers"});
    get_to(o, "service_id", c.service_id);
    get_to(o, "profile", c.profile_name);
    get_to(o, "vip", c.vip);
    get_to(o, "port", c.service_port);
    get_to(o, "proto", c.proto);
    get_to(o, "container_port", c.container_port);
    get_to(o, "containers", c.containers);
  }
  if (doc.contains("orchestration")) {
    const json& o = doc.at("orchestration");
    require_keys(o, "orchestration",
                 {"deploy_at_s", "migration_period_s", "migration_start_s", "migration_count"});
    get_to(o, "deploy_at_s", c.deploy_at_s);
    get_to(o, "migration_period_s", c.migration_period_s);
    get_to(o, "migration_start_s", c.migration_start_s);
    get_to(o, "migration_count", c.migration_count);
  }

  validate_scenario(c);
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("scenario parse error in " + path + ": " + e.what());
  }
  return parse_scenario(doc);
}

void validate_scenario(const ScenarioConfig& c) {
  if (c.duration_s <= 0) throw ConfigError("duration_s must be > 0");
  if (c.request_interval_s <= 0) throw ConfigError("R (request_interval_s) must be > 0");
  if (c.nodes < 1) throw ConfigError("cluster.nodes must be >= 1");
  if (!c.reply_threshold && !c.vote_threshold && c.nodes < 3) {
    throw ConfigError("cluster.nodes must be >= 3 with default quorum thresholds");
  }
  const std::size_t n = static_cast<std::size_t>(c.nodes);
  if (c.vote_threshold && *c.vote_threshold > n) {
    throw ConfigError("unsatisfiable config: vote_threshold exceeds cluster size");
  }
  if (c.reply_threshold && *c.reply_threshold > n - 1) {
    throw ConfigError("unsatisfiable config: reply_threshold exceeds cluster size - 1");
  }
  if (c.block_interval_ms <= 0) throw ConfigError("ledger.block_interval_ms must be > 0");
  if (c.deploy_at_s * 1000.0 <= c.block_interval_ms) {
    // Node registrations confirm in the first block; a deployment submitted
    // before that is rejected as coming from an unknown sender.
    throw ConfigError("orchestration.deploy_at_s must exceed one block interval");
  }
  if (c.probe_interval_ms <= 0) throw ConfigError("runtime.probe_interval_ms must be > 0");
  if (c.passes_required < 1) throw ConfigError("runtime.passes_required must be >= 1");
  if (c.max_retries < 1) throw ConfigError("workload.max_retries must be >= 1");
  if (c.profiles.count(c.profile_name) == 0) {
    throw ConfigError("unknown image profile '" + c.profile_name + "'");
  }
  if (c.proto != "TCP" && c.proto != "UDP") throw ConfigError("service.proto must be TCP or UDP");
  if (c.migration_cutover != "overlap" && c.migration_cutover != "atomic") {
    throw ConfigError("sdn.migration_cutover must be 'overlap' or 'atomic'");
  }
  if (c.containers < 0) throw ConfigError("service.containers must be >= 0");
  if (c.kind == "availability_soak" && c.migration_period_s <= 0) {
    throw ConfigError("availability_soak requires orchestration.migration_period_s > 0");
  }
}

nlohmann::json echo_config(const ScenarioConfig& c) {
  json profiles = json::object();
  for (const auto& [name, p] : c.profiles) {
    profiles[name] = {
        {"startup_ms", p.startup_time / kMillisecond},
        {"processing_ms", p.per_request_processing / kMillisecond},
        {"mode", p.connection_mode == ConnectionMode::PerRequest ? "per_request"
                                                                 : "persistent_stream"},
    };
  }
  return json{
      {"kind", c.kind},
      {"seed", c.seed},
      {"duration_s", c.duration_s},
      {"grace_s", c.grace_s},
      {"R", c.request_interval_s},
      {"H", c.health_gating},
      {"cluster",
       {{"nodes", c.nodes},
        {"reply_threshold", c.reply_threshold ? json(*c.reply_threshold) : json(nullptr)},
        {"vote_threshold", c.vote_threshold ? json(*c.vote_threshold) : json(nullptr)},
        {"owner_may_solve", c.owner_may_solve}}},
      {"ledger", {{"block_interval_ms", c.block_interval_ms}, {"log_delay_ms", c.log_delay_ms}}},
      {"links",
       {{"data_ms", c.data_ms},
        {"sdn_control_ms", c.sdn_control_ms},
        {"control_link_ms", c.control_link_ms},
        {"jitter_ms", c.jitter_ms}}},
      {"sdn",
       {{"packet_in_ms", c.packet_in_ms},
        {"rule_install_ms", c.rule_install_ms},
        {"health_filter", c.health_filter},
        {"rule_idle_timeout_ms", c.rule_idle_timeout_ms},
        {"migration_cutover", c.migration_cutover}}},
      {"runtime",
       {{"probe_interval_ms", c.probe_interval_ms},
        {"probe_timeout_ms", c.probe_timeout_ms},
        {"passes_required", c.passes_required},
        {"profiles", profiles}}},
      {"agent",
       {{"health_gating", c.health_gating},
        {"stop_drain_ms", c.stop_drain_ms},
        {"base_free_cpu", c.base_free_cpu},
        {"base_free_mem", c.base_free_mem},
        {"cpu_per_container", c.cpu_per_container},
        {"mem_per_container", c.mem_per_container},
        {"problem_max_containers", c.problem_max_containers}}},
      {"workload",
       {{"request_interval_s", c.request_interval_s},
        {"start_s", c.workload_start_s},
        {"max_retries", c.max_retries},
        {"syn_timeout_ms", c.syn_timeout_ms},
        {"response_timeout_ms", c.response_timeout_ms},
        {"reconnect_backoff_ms", c.reconnect_backoff_ms},
        {"client_ip", c.client_ip}}},
      {"service",
       {{"service_id", c.service_id},
        {"profile", c.profile_name},
        {"vip", c.vip},
        {"port", c.service_port},
        {"proto", c.proto},
        {"container_port", c.container_port},
        {"containers", c.containers}}},
      {"orchestration",
       {{"deploy_at_s", c.deploy_at_s},
        {"migration_period_s", c.migration_period_s},
        {"migration_start_s", c.migration_start_s},
        {"migration_count", c.migration_count}}},
  };
}

std::string config_hash(const ScenarioConfig& c) {
  const std::string dump = echo_config(c).dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char byte : dump) {
    h ^= byte;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace fogsim
