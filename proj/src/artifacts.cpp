#include "fogsim/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fogsim {

namespace {

using nlohmann::json;

std::string fmt_ms(SimTime t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", to_ms(t));
  return buf;
}

std::string call_name(const ContractCall& call) {
  struct Visitor {
    std::string operator()(const RegisterNodeCall&) const { return "register_node"; }
    std::string operator()(const RegisterServiceCall&) const { return "register_service"; }
    std::string operator()(const NewEventCall& c) const {
      return c.type == EventType::Deploy ? "new_event_deploy" : "new_event_migrate";
    }
    std::string operator()(const SendReplyCall&) const { return "send_reply"; }
    std::string operator()(const SendVoteCall&) const { return "send_vote"; }
    std::string operator()(const SolveEventCall&) const { return "solve_event"; }
    std::string operator()(const AdjustReputationCall&) const { return "adjust_reputation"; }
    std::string operator()(const RecordMetadataCall&) const { return "record_metadata"; }
  };
  return std::visit(Visitor{}, call);
}

json log_to_json(const ContractLog& log) {
  json j{{"type", "log"},
         {"seq", log.log_seq},
         {"at_ms", to_ms(log.emitted_at)},
         {"block", log.block_height},
         {"tx", log.tx_id},
         {"kind", to_string(kind_of(log.payload))}};
  struct Visitor {
    json& j;
    void operator()(const ServiceRegisteredLog& l) {
      j["service"] = l.service_id;
      j["owner"] = l.owner.value;
      j["vip"] = l.endpoint.vip;
      j["port"] = l.endpoint.port;
    }
    void operator()(const ContainerRegisteredLog& l) {
      j["container"] = l.container_id;
      j["service"] = l.service_id;
    }
    void operator()(const NewEventLog& l) {
      j["event"] = l.event_id;
      j["event_type"] = to_string(l.type);
      j["container"] = l.container_id;
      j["creator"] = l.creator.value;
    }
    void operator()(const RequiredRepliesLog& l) { j["event"] = l.event_id; }
    void operator()(const RequiredVotesLog& l) {
      j["event"] = l.event_id;
      j["solver"] = l.elected_solver.value;
    }
    void operator()(const EventSolvedLog& l) {
      j["event"] = l.event_id;
      j["event_type"] = to_string(l.type);
      j["container"] = l.container_id;
      j["service"] = l.service_id;
      j["solver"] = l.solver.value;
      j["previous_host"] = l.previous_host.value;
    }
    void operator()(const ReputationUpdatedLog& l) {
      j["node"] = l.node.value;
      j["delta"] = l.delta;
      j["score"] = l.score;
    }
  };
  std::visit(Visitor{j}, log.payload);
  return j;
}

}  // namespace

RunPaths artifact_paths(const std::string& out_dir) {
  RunPaths p;
  p.dir = out_dir;
  p.meta = out_dir + "/run_meta.json";
  p.samples = out_dir + "/samples.csv";
  p.summary = out_dir + "/summary.json";
  p.ledger_trace = out_dir + "/ledger_trace.jsonl";
  p.flow_trace = out_dir + "/flow_trace.jsonl";
  p.episodes = out_dir + "/episodes.jsonl";
  return p;
}

RunPaths write_artifacts(const Simulation& sim, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const RunPaths paths = artifact_paths(out_dir);
  const ScenarioConfig& config = sim.config();
  const std::string hash = config_hash(config);

  {  // run_meta.json
    json meta{{"schema", "fogsim-meta v1"},
              {"kind", config.kind},
              {"seed", config.seed},
              {"config_hash", hash},
              {"config", echo_config(config)},
              {"blocks_produced", sim.ledger().block_count()},
              {"rules_installed", sim.sdn().rules_installed()},
              {"deploys_solved", sim.deploys_solved()},
              {"migrations_solved", sim.migrations_solved()},
              {"requests_issued", sim.requests_issued()},
              {"stuck_episodes", sim.stuck_episodes()}};
    std::ofstream out(paths.meta);
    out << meta.dump(2) << "\n";
  }

  {  // samples.csv
    std::ofstream out(paths.samples);
    out << "# fogsim-samples v1 config_hash=" << hash << " seed=" << config.seed << "\n";
    out << "sent_at_ms,connect_ms,latency_ms,outcome,backend,five_tuple\n";
    for (const RequestSample& s : sim.samples()) {
      out << fmt_ms(s.sent_at) << ',' << fmt_ms(s.connect_time) << ',' << fmt_ms(s.latency_time)
          << ',' << (s.success ? "ok" : "error") << ','
          << (s.backend == kNoNode ? std::string("-") : to_string(s.backend)) << ','
          << to_string(s.five_tuple) << "\n";
    }
  }

  {  // summary.json
    SummaryStats s;
    if (!sim.samples().empty()) s = sim.summary();
    json j{{"schema", "fogsim-summary v1"},
           {"seed", config.seed},
           {"config_hash", hash},
           {"migrations",
            {{"per_hour", s.migrations_per_hour},
             {"per_day", s.migrations_per_day},
             {"total", s.migrations_total}}},
           {"requests",
            {{"per_hour", s.requests_per_hour},
             {"per_day", s.requests_per_day},
             {"total", s.requests_total}}},
           {"errors", s.errors},
           {"max_latency_ms", s.max_latency_ms},
           {"min_latency_ms", s.min_latency_ms},
           {"avg_latency_ms", s.avg_latency_ms},
           {"latency_stddev_ms", s.latency_stddev_ms},
           {"availability_per_day", s.availability_per_day},
           {"availability_overall", s.availability_overall}};
    std::ofstream out(paths.summary);
    out << j.dump(2) << "\n";
  }

  {  // ledger_trace.jsonl: blocks with their logs, then rejected records
    std::ofstream out(paths.ledger_trace);
    const auto& logs = sim.ledger().logs();
    std::size_t log_cursor = 0;
    for (const Block& b : sim.ledger().nonempty_blocks()) {
      json txs = json::array();
      for (const LedgerTransaction& tx : b.txs) {
        txs.push_back(json{{"tx", tx.tx_id},
                           {"sender", tx.sender.value},
                           {"submitted_ms", to_ms(tx.submitted_at)},
                           {"call", call_name(tx.payload)}});
      }
      out << json{{"type", "block"}, {"height", b.height}, {"at_ms", to_ms(b.produced_at)},
                  {"txs", txs}}
                 .dump()
          << "\n";
      while (log_cursor < logs.size() && logs[log_cursor].block_height <= b.height) {
        out << log_to_json(logs[log_cursor]).dump() << "\n";
        log_cursor++;
      }
    }
    for (const RejectedTx& r : sim.ledger().rejected()) {
      out << json{{"type", "rejected"},
                  {"tx", r.tx_id},
                  {"sender", r.sender.value},
                  {"at_ms", to_ms(r.executed_at)},
                  {"fault", to_string(r.fault)}}
                 .dump()
          << "\n";
    }
  }

  {  // flow_trace.jsonl
    std::ofstream out(paths.flow_trace);
    for (const FlowTraceEntry& e : sim.sdn().flow_trace()) {
      out << json{{"op", e.op == FlowTraceEntry::Op::Install ? "install" : "remove"},
                  {"at_ms", to_ms(e.at)},
                  {"match", to_string(e.match)},
                  {"backend", e.backend_ip},
                  {"healthy_at_install", e.backend_healthy_at_install}}
                 .dump()
          << "\n";
    }
  }

  {  // episodes.jsonl
    std::ofstream out(paths.episodes);
    for (const auto& [id, ep] : sim.episodes()) {
      json votes = json::object();
      for (const auto& [voter, cand] : ep.votes) {
        votes[std::to_string(voter.value)] = cand.value;
      }
      out << json{{"event", ep.event_id},
                  {"type", to_string(ep.type)},
                  {"container", ep.container},
                  {"creator", ep.creator.value},
                  {"solver", ep.solver.value},
                  {"opened_ms", to_ms(ep.opened_at)},
                  {"replies_ms", to_ms(ep.replies_at)},
                  {"elected_ms", to_ms(ep.elected_at)},
                  {"solved_ms", to_ms(ep.solved_at)},
                  {"votes", votes}}
                 .dump()
          << "\n";
    }
  }

  return paths;
}

LoadedRun load_artifacts(const std::string& dir) {
  const RunPaths paths = artifact_paths(dir);
  LoadedRun run;
  {
    std::ifstream in(paths.meta);
    if (!in) throw IncompatibleScenario("missing run_meta.json in " + dir);
    in >> run.meta;
  }
  {
    std::ifstream in(paths.summary);
    if (!in) throw IncompatibleScenario("missing summary.json in " + dir);
    in >> run.summary;
  }
  {
    std::ifstream in(paths.samples);
    if (!in) throw IncompatibleScenario("missing samples.csv in " + dir);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("sent_at_ms", 0) == 0) continue;
      LoadedRun::Row row;
      std::stringstream ss(line);
      std::string field;
      std::getline(ss, field, ',');
      row.sent_ms = std::stod(field);
      std::getline(ss, field, ',');
      row.connect_ms = std::stod(field);
      std::getline(ss, field, ',');
      row.latency_ms = std::stod(field);
      std::getline(ss, field, ',');
      row.success = field == "ok";
      std::getline(ss, row.backend, ',');
      std::getline(ss, row.tuple, ',');
      run.samples.push_back(row);
    }
  }
  return run;
}

std::string write_figure_data(const LoadedRun& run, const std::string& figure,
                              const std::string& out_dir, const std::string& suffix) {
  static const std::set<std::string> known = {"f6", "f7", "f8a", "f8b", "f8c", "f9", "f10"};
  if (known.count(figure) == 0) throw IncompatibleScenario("unknown figure '" + figure + "'");

  const std::string kind = run.meta.value("kind", "custom");
  const bool has_migrations = run.meta.value("migrations_solved", 0) > 0;
  if (run.samples.empty()) throw IncompatibleScenario("run has no samples");

  if ((figure == "f6" || figure == "f7") && kind != "deploy") {
    throw IncompatibleScenario("figure " + figure + " needs a deploy scenario, got " + kind);
  }
  if (figure.rfind("f8", 0) == 0 && kind != "migrate") {
    throw IncompatibleScenario("figure " + figure + " needs a migrate scenario, got " + kind);
  }
  if (figure == "f9" && kind != "availability_soak") {
    throw IncompatibleScenario("figure f9 needs an availability_soak scenario, got " + kind);
  }
  if (figure == "f10" && !has_migrations) {
    throw IncompatibleScenario("figure f10 needs a run with migrations");
  }

  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + figure + suffix + ".csv";
  std::ofstream out(path);

  if (figure == "f6" || figure.rfind("f8", 0) == 0) {
    out << "request,sent_at_s,connect_ms,latency_ms,outcome\n";
    std::size_t i = 0;
    for (const auto& r : run.samples) {
      out << i++ << ',' << r.sent_ms / 1000.0 << ',' << r.connect_ms << ',' << r.latency_ms << ','
          << (r.success ? "ok" : "error") << "\n";
    }
  } else if (figure == "f7") {
    std::vector<double> lat;
    for (const auto& r : run.samples) {
      if (r.success) lat.push_back(r.latency_ms);
    }
    if (lat.empty()) throw IncompatibleScenario("run has no successful samples");
    std::sort(lat.begin(), lat.end());
    out << "latency_ms,percent_of_requests_below\n";
    for (std::size_t i = 0; i < lat.size(); ++i) {
      out << lat[i] << ',' << 100.0 * static_cast<double>(i + 1) / static_cast<double>(lat.size())
          << "\n";
    }
  } else if (figure == "f9") {
    out << "day,availability_percent\n";
    const auto& days = run.summary.at("availability_per_day");
    for (std::size_t d = 0; d < days.size(); ++d) {
      out << (d + 1) << ',' << 100.0 * days[d].get<double>() << "\n";
    }
  } else {  // f10
    out << "sent_at_s,latency_ms,outcome\n";
    for (const auto& r : run.samples) {
      out << r.sent_ms / 1000.0 << ',' << r.latency_ms << ',' << (r.success ? "ok" : "error")
          << "\n";
    }
  }
  return path;
}

}  // namespace fogsim
