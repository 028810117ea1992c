#include "fogsim/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace fogsim {

namespace {

// Independent plurality tally used to cross-check elections.
NodeId plurality_lowest_id(const std::map<NodeId, NodeId>& votes) {
  std::map<NodeId, int> counts;
  for (const auto& [voter, cand] : votes) counts[cand]++;
  NodeId winner = kNoNode;
  int best = 0;
  for (const auto& [cand, n] : counts) {
    if (n > best) {
      best = n;
      winner = cand;
    }
  }
  return winner;
}

struct LogIndex {
  std::map<EventId, std::vector<const ContractLog*>> by_event;
  std::map<LogKind, std::uint64_t> kind_counts;
};

LogIndex index_logs(const Ledger& ledger) {
  LogIndex idx;
  for (const ContractLog& log : ledger.logs()) {
    idx.kind_counts[kind_of(log.payload)]++;
    EventId ev = 0;
    if (const auto* l = std::get_if<NewEventLog>(&log.payload)) ev = l->event_id;
    if (const auto* l = std::get_if<RequiredRepliesLog>(&log.payload)) ev = l->event_id;
    if (const auto* l = std::get_if<RequiredVotesLog>(&log.payload)) ev = l->event_id;
    if (const auto* l = std::get_if<EventSolvedLog>(&log.payload)) ev = l->event_id;
    if (ev != 0) idx.by_event[ev].push_back(&log);
  }
  return idx;
}

std::uint64_t seq_of_kind(const std::vector<const ContractLog*>& logs, LogKind kind,
                          std::uint64_t* count) {
  std::uint64_t seq = 0;
  *count = 0;
  for (const ContractLog* log : logs) {
    if (kind_of(log->payload) == kind) {
      (*count)++;
      seq = log->log_seq;
    }
  }
  return seq;
}

}  // namespace

std::vector<PropertyResult> run_property_checks(const Simulation& sim) {
  std::vector<PropertyResult> out;
  auto add = [&out](const std::string& name, bool pass, const std::string& detail = "") {
    out.push_back({name, pass, detail});
  };

  const Ledger& ledger = sim.ledger();
  const auto& episodes = sim.episodes();
  const LogIndex idx = index_logs(ledger);

  // Quorum gating: threshold logs emitted exactly once, exactly at the
  // configured counts.
  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, ep] : episodes) {
      const ClusterEvent* ev = ledger.contracts().event(id);
      if (ev == nullptr) continue;
      std::uint64_t n_replies_logs = 0, n_votes_logs = 0;
      auto it = idx.by_event.find(id);
      if (it != idx.by_event.end()) {
        seq_of_kind(it->second, LogKind::RequiredReplies, &n_replies_logs);
        seq_of_kind(it->second, LogKind::RequiredVotes, &n_votes_logs);
      }
      const bool replies_reached = ev->phase >= EventPhase::RepliesCollected;
      const bool votes_reached = ev->phase >= EventPhase::SolverElected;
      if (n_replies_logs != (replies_reached ? 1u : 0u) ||
          n_votes_logs != (votes_reached ? 1u : 0u) ||
          (replies_reached && ev->replies.size() != ev->required_replies) ||
          (votes_reached && ev->votes.size() != ev->required_votes)) {
        pass = false;
        detail = "event " + std::to_string(id);
        break;
      }
    }
    add("quorum-gating", pass, detail);
  }

  // Log-order precedence: NewEvent < RequiredReplies < RequiredVotes <
  // EventSolved, one each, for every solved episode.
  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, ep] : episodes) {
      if (ep.solved_at < 0) continue;
      auto it = idx.by_event.find(id);
      if (it == idx.by_event.end()) {
        pass = false;
        detail = "event " + std::to_string(id) + " missing logs";
        break;
      }
      std::uint64_t c1, c2, c3, c4;
      const std::uint64_t s1 = seq_of_kind(it->second, LogKind::NewEvent, &c1);
      const std::uint64_t s2 = seq_of_kind(it->second, LogKind::RequiredReplies, &c2);
      const std::uint64_t s3 = seq_of_kind(it->second, LogKind::RequiredVotes, &c3);
      const std::uint64_t s4 = seq_of_kind(it->second, LogKind::EventSolved, &c4);
      if (c1 != 1 || c2 != 1 || c3 != 1 || c4 != 1 || !(s1 < s2 && s2 < s3 && s3 < s4)) {
        pass = false;
        detail = "event " + std::to_string(id);
        break;
      }
    }
    add("log-order-precedence", pass, detail);
  }

  // Solver-only solve: the solver in every EventSolved equals the node
  // elected in the matching RequiredVotes.
  {
    bool pass = true;
    std::string detail;
    for (const ContractLog& log : ledger.logs()) {
      if (const auto* solved = std::get_if<EventSolvedLog>(&log.payload)) {
        auto it = episodes.find(solved->event_id);
        if (it == episodes.end() || it->second.solver != solved->solver) {
          pass = false;
          detail = "event " + std::to_string(solved->event_id);
          break;
        }
      }
    }
    add("solver-only-solve", pass, detail);
  }

  // Election oracle: brute-force plurality + lowest-id tie-break.
  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, ep] : episodes) {
      if (ep.elected_at < 0) continue;
      if (plurality_lowest_id(ep.votes) != ep.solver) {
        pass = false;
        detail = "event " + std::to_string(id);
        break;
      }
    }
    add("election-oracle", pass, detail);
  }

  // Single-episode rule: per container, episodes never overlap in time.
  {
    bool pass = true;
    std::string detail;
    std::map<ContainerId, std::vector<const EpisodeRecord*>> per_container;
    for (const auto& [id, ep] : episodes) per_container[ep.container].push_back(&ep);
    for (auto& [container, eps] : per_container) {
      std::sort(eps.begin(), eps.end(), [](const EpisodeRecord* a, const EpisodeRecord* b) {
        return a->opened_at < b->opened_at;
      });
      for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
        if (eps[i]->solved_at < 0 || eps[i]->solved_at > eps[i + 1]->opened_at) {
          pass = false;
          detail = container;
          break;
        }
      }
    }
    add("single-episode-rule", pass, detail);
  }

  // Flow-rule counting: one install per connection admitted via packet-in.
  {
    const std::uint64_t installs = sim.sdn().rules_installed();
    const std::uint64_t misses = sim.network().established_via_miss();
    add("flow-rule-count", installs == misses,
        "installed=" + std::to_string(installs) + " admitted-via-miss=" + std::to_string(misses));
  }

  // Health gating: with H=true no request is served by an instance that had
  // not reported Healthy when the request arrived.
  if (sim.config().health_gating) {
    bool pass = true;
    std::uint64_t offenders = 0;
    for (const RequestSample& s : sim.samples()) {
      if (s.success && s.served_pre_healthy) {
        pass = false;
        offenders++;
      }
    }
    add("health-gating", pass, offenders == 0 ? "" : std::to_string(offenders) + " samples");
  }

  // Zero-orphan rule: instance count per container never exceeds two (the
  // migration overlap window) and ends at exactly one for every container
  // that was ever deployed.
  {
    bool pass = true;
    std::string detail;
    std::map<ContainerId, std::set<std::uint32_t>> live;
    for (const RuntimeTraceEntry& e : sim.runtime().trace()) {
      if (e.kind == RuntimeTraceEntry::Kind::Create) {
        live[e.container_id].insert(e.host.value);
        if (live[e.container_id].size() > 2) {
          pass = false;
          detail = e.container_id + " had >2 live instances";
          break;
        }
      } else if (e.kind == RuntimeTraceEntry::Kind::Stop) {
        live[e.container_id].erase(e.host.value);
      }
    }
    if (pass) {
      for (const auto& [container, hosts] : live) {
        if (hosts.size() != 1) {
          pass = false;
          detail = container + " ended with " + std::to_string(hosts.size()) + " instances";
          break;
        }
      }
    }
    add("zero-orphan", pass, detail);
  }

  // Connection conservation.
  {
    const Network& net = sim.network();
    const bool pass = net.opened() == net.established_total() + net.failed_total() &&
                      net.established_total() == net.closed_total();
    std::ostringstream os;
    os << "opened=" << net.opened() << " established=" << net.established_total()
       << " failed=" << net.failed_total() << " closed=" << net.closed_total();
    add("connection-conservation", pass, os.str());
  }

  // Sample conservation: one sample per issued request, success + error.
  {
    std::uint64_t ok = 0, err = 0;
    for (const RequestSample& s : sim.samples()) (s.success ? ok : err)++;
    const bool pass = sim.requests_issued() == sim.samples().size() &&
                      ok + err == sim.samples().size();
    add("sample-conservation", pass,
        "issued=" + std::to_string(sim.requests_issued()) + " samples=" +
            std::to_string(sim.samples().size()));
  }

  // connect_time <= latency_time for per-request successes.
  {
    bool pass = true;
    for (const RequestSample& s : sim.samples()) {
      if (s.success && s.connect_time > s.latency_time) {
        pass = false;
        break;
      }
    }
    add("connect-within-latency", pass);
  }

  // Liveness: no episode stuck beyond the workflow bound.
  {
    const auto stuck = sim.stuck_episodes();
    add("episode-liveness", stuck.empty(),
        stuck.empty() ? "" : std::to_string(stuck.size()) + " stuck episodes");
  }

  // Total order: block heights and times strictly increase, and the log
  // stream follows block order.
  {
    bool pass = true;
    const Block* prev = nullptr;
    for (const Block& b : ledger.nonempty_blocks()) {
      if (prev != nullptr && (b.height <= prev->height || b.produced_at <= prev->produced_at)) {
        pass = false;
      }
      prev = &b;
    }
    const ContractLog* prev_log = nullptr;
    for (const ContractLog& log : ledger.logs()) {
      if (prev_log != nullptr && (log.block_height < prev_log->block_height ||
                                  log.emitted_at < prev_log->emitted_at ||
                                  log.log_seq != prev_log->log_seq + 1)) {
        pass = false;
      }
      prev_log = &log;
    }
    add("ledger-total-order", pass);
  }

  // Every log traces back to an executed, non-rejected transaction.
  {
    std::set<TxId> executed;
    for (const Block& b : sim.ledger().nonempty_blocks()) {
      for (const LedgerTransaction& tx : b.txs) executed.insert(tx.tx_id);
    }
    std::set<TxId> rejected;
    for (const RejectedTx& r : sim.ledger().rejected()) rejected.insert(r.tx_id);
    bool pass = true;
    for (const ContractLog& log : sim.ledger().logs()) {
      if (executed.count(log.tx_id) == 0 || rejected.count(log.tx_id) > 0) {
        pass = false;
        break;
      }
    }
    add("log-traceability", pass);
  }

  return out;
}

bool all_pass(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.pass; });
}

}  // namespace fogsim
