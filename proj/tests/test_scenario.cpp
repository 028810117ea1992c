#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fogsim/scenario.hpp"

using namespace fogsim;
using nlohmann::json;

TEST_CASE("minimal scenario parses with defaults") {
  const auto c = parse_scenario(json{{"kind", "deploy"}});
  CHECK(c.kind == "deploy");
  CHECK(c.nodes == 3);
  CHECK(c.block_interval_ms == 1000.0);
  CHECK(c.request_interval_s == 3.0);
  CHECK_FALSE(c.health_gating);
  CHECK(c.profiles.count("nginx") == 1);
  CHECK(c.profiles.count("nextcloud") == 1);
  CHECK(c.profiles.count("postgres") == 1);
  CHECK(c.profiles.at("postgres").connection_mode == ConnectionMode::PersistentStream);
}

TEST_CASE("unknown fields are rejected, top-level and nested") {
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "deploy"}, {"tpyo", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "deploy"}, {"cluster", {{"size", 3}}}}),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_scenario(json{{"kind", "deploy"}, {"workload", {{"interval", 1.0}}}}),
      ConfigError);
}

TEST_CASE("R and H shorthands map to the workload interval and health gating") {
  const auto c = parse_scenario(json{{"kind", "availability_soak"},
                                     {"R", 1.0},
                                     {"H", true},
                                     {"orchestration", {{"migration_period_s", 77.5}}}});
  CHECK(c.request_interval_s == 1.0);
  CHECK(c.health_gating);
  CHECK(c.duration_s == 86400.0);  // soak preset: one simulated day
}

TEST_CASE("kind presets: migrate defaults to a single scripted migration") {
  const auto c = parse_scenario(json{{"kind", "migrate"}});
  CHECK(c.migration_count == 1);
  CHECK(c.migration_start_s == 30.0);
}

TEST_CASE("unsatisfiable quorum configurations are rejected") {
  CHECK_THROWS_WITH_AS(
      parse_scenario(json{{"kind", "deploy"}, {"cluster", {{"nodes", 3}, {"vote_threshold", 4}}}}),
      "unsatisfiable config: vote_threshold exceeds cluster size", ConfigError);
  CHECK_THROWS_AS(
      parse_scenario(json{{"kind", "deploy"}, {"cluster", {{"nodes", 3}, {"reply_threshold", 3}}}}),
      ConfigError);
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "deploy"}, {"cluster", {{"nodes", 2}}}}),
                  ConfigError);
  CHECK_NOTHROW(parse_scenario(
      json{{"kind", "deploy"},
           {"cluster", {{"nodes", 2}, {"reply_threshold", 1}, {"vote_threshold", 2}}}}));
}

TEST_CASE("semantic validation") {
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "deploy"}, {"duration_s", 0.0}}), ConfigError);
  // Deployment cannot precede the block that confirms node registration.
  CHECK_THROWS_AS(
      parse_scenario(json{{"kind", "deploy"}, {"ledger", {{"block_interval_ms", 2000.0}}}}),
      ConfigError);
  CHECK_NOTHROW(parse_scenario(json{{"kind", "deploy"},
                                    {"ledger", {{"block_interval_ms", 2000.0}}},
                                    {"orchestration", {{"deploy_at_s", 2.2}}}}));
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "deploy"}, {"R", 0.0}}), ConfigError);
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "deploy"}, {"service", {{"profile", "mysql"}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "availability_soak"}}), ConfigError);
  CHECK_THROWS_AS(parse_scenario(json{{"kind", "warp"}}), ConfigError);
}

TEST_CASE("profile overrides merge over the built-ins") {
  const auto c = parse_scenario(
      json{{"kind", "deploy"},
           {"runtime",
            {{"profiles",
              {{"nginx", {{"startup_ms", 700}}},
               {"redis", {{"startup_ms", 100}, {"processing_ms", 1}, {"mode", "persistent_stream"}}}}}}}});
  CHECK(c.profiles.at("nginx").startup_time == from_ms(700));
  CHECK(c.profiles.at("nginx").per_request_processing == from_ms(8));  // untouched
  CHECK(c.profiles.at("redis").connection_mode == ConnectionMode::PersistentStream);
}

TEST_CASE("config echo carries every effective parameter") {
  const auto c = parse_scenario(json{{"kind", "deploy"}, {"seed", 9}});
  const json echo = echo_config(c);
  CHECK(echo.at("seed") == 9);
  CHECK(echo.at("ledger").at("block_interval_ms") == 1000.0);
  CHECK(echo.at("links").at("data_ms") == 2.0);
  CHECK(echo.at("sdn").at("packet_in_ms") == 3.0);
  CHECK(echo.at("runtime").at("profiles").contains("nginx"));
  CHECK(echo.at("workload").at("response_timeout_ms") == 5000.0);
  CHECK(echo.at("orchestration").contains("migration_period_s"));
}

TEST_CASE("config hash is stable and sensitive") {
  const auto a = parse_scenario(json{{"kind", "deploy"}});
  const auto b = parse_scenario(json{{"kind", "deploy"}});
  auto c = parse_scenario(json{{"kind", "deploy"}});
  c.seed = 77;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
}
