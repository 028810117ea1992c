#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <memory>
#include <random>
#include <tuple>
#include <vector>

#include "fogsim/ledger.hpp"

using namespace fogsim;

namespace {

struct Harness {
  Scheduler sched;
  Contracts contracts;
  Ledger ledger{sched, contracts};

  void register_nodes(int n) {
    for (int i = 1; i <= n; ++i) {
      ledger.submit(NodeId{static_cast<std::uint32_t>(i)},
                    RegisterNodeCall{"192.168.0." + std::to_string(10 + i)});
    }
    ledger.produce_block(sched.now());
  }
};

}  // namespace

TEST_CASE("transactions execute at the next block boundary, boundary inclusive") {
  Harness h;
  h.register_nodes(1);
  h.ledger.start();

  std::vector<SimTime> executed;
  h.ledger.subscribe([&](const ContractLog& log) {
    if (kind_of(log.payload) == LogKind::ServiceRegistered) executed.push_back(log.emitted_at);
  });

  h.sched.schedule(from_ms(120), [&] {
    h.ledger.submit(NodeId{1}, RegisterServiceCall{"svc-a", {"170.100.8.33", 80, Proto::TCP}, {}});
  });
  h.sched.schedule(from_ms(1000), [&] {
    h.ledger.submit(NodeId{1}, RegisterServiceCall{"svc-b", {"170.100.8.34", 80, Proto::TCP}, {}});
  });
  h.sched.run_until(from_ms(2500));

  REQUIRE(executed.size() == 2);
  CHECK(executed[0] == from_ms(1000));  // 120ms submission rolls forward
  CHECK(executed[1] == from_ms(1000));  // exactly-on-boundary submission is included
}

TEST_CASE("within a block, execution order follows (submitted_at, sender, tx_id)") {
  // Frozen from the sort-order oracle below: node1's t=80ms tx runs before
  // node3's t=120ms tx.
  Harness h;
  h.register_nodes(3);
  h.ledger.start();

  std::vector<std::uint32_t> order;
  h.ledger.subscribe([&](const ContractLog& log) {
    if (const auto* l = std::get_if<ServiceRegisteredLog>(&log.payload)) {
      order.push_back(l->owner.value);
    }
  });
  h.sched.schedule(from_ms(120), [&] {
    h.ledger.submit(NodeId{3}, RegisterServiceCall{"svc-3", {"170.100.8.35", 80, Proto::TCP}, {}});
  });
  h.sched.schedule(from_ms(80), [&] {
    h.ledger.submit(NodeId{1}, RegisterServiceCall{"svc-1", {"170.100.8.36", 80, Proto::TCP}, {}});
  });
  h.sched.run_until(from_ms(1500));
  CHECK(order == std::vector<std::uint32_t>{1, 3});
}

TEST_CASE("sort-order oracle over random submission interleavings") {
  // Oracle: independently sort (submitted_at, sender, tx_id) triples and
  // compare with the ledger's execution order observed through logs.
  std::mt19937 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    Harness h;
    h.register_nodes(5);
    h.ledger.start();

    struct Submission {
      SimTime at;
      std::uint32_t sender;
      TxId tx_id;
      std::string service;
    };
    auto submissions = std::make_shared<std::vector<Submission>>();
    std::vector<std::uint32_t> executed_owner_seq;
    h.ledger.subscribe([&](const ContractLog& log) {
      if (const auto* l = std::get_if<ServiceRegisteredLog>(&log.payload)) {
        executed_owner_seq.push_back(l->owner.value);
      }
    });

    const int n = 12;
    for (int i = 0; i < n; ++i) {
      const SimTime at = from_ms(static_cast<std::int64_t>(rng() % 900));
      const std::uint32_t sender = 1 + rng() % 5;
      const std::string service = "svc-" + std::to_string(trial) + "-" + std::to_string(i);
      h.sched.schedule(at, [&h, submissions, at, sender, service] {
        const TxId id = h.ledger.submit(
            NodeId{sender}, RegisterServiceCall{service, {service, 80, Proto::TCP}, {}});
        submissions->push_back({at, sender, id, service});
      });
    }
    h.sched.run_until(from_ms(1500));

    std::stable_sort(submissions->begin(), submissions->end(),
                     [](const Submission& a, const Submission& b) {
                       return std::tie(a.at, a.sender, a.tx_id) < std::tie(b.at, b.sender, b.tx_id);
                     });
    std::vector<std::uint32_t> expected;
    for (const Submission& s : *submissions) expected.push_back(s.sender);
    CHECK(executed_owner_seq == expected);
  }
}

TEST_CASE("empty block leaves state unchanged") {
  Harness h;
  h.register_nodes(2);
  const Block& b = h.ledger.produce_block(from_ms(1000));
  CHECK(b.txs.empty());
  CHECK(h.contracts.node_count() == 2);
  CHECK(h.ledger.block_count() == 2);
}

TEST_CASE("subscribers receive all logs, in order, after the notification delay") {
  Harness h;
  h.register_nodes(1);

  std::vector<std::pair<SimTime, LogKind>> got_a, got_b;
  h.ledger.subscribe([&](const ContractLog& log) {
    got_a.push_back({h.sched.now(), kind_of(log.payload)});
  });
  h.ledger.subscribe([&](const ContractLog& log) {
    got_b.push_back({h.sched.now(), kind_of(log.payload)});
  });

  ContainerSpec c1{"c-0", "nginx", 8080};
  ContainerSpec c2{"c-1", "nginx", 8081};
  h.ledger.submit(NodeId{1}, RegisterServiceCall{"svc", {"170.100.8.33", 80, Proto::TCP}, {c1, c2}});
  h.sched.schedule(from_ms(1000), [&] { h.ledger.produce_block(from_ms(1000)); });
  h.sched.run_to_completion();

  REQUIRE(got_a.size() == 3);  // ServiceRegistered + 2 ContainerRegistered
  CHECK(got_a == got_b);       // broadcast semantics
  CHECK(got_a[0].second == LogKind::ServiceRegistered);
  CHECK(got_a[1].second == LogKind::ContainerRegistered);
  for (const auto& [at, kind] : got_a) CHECK(at == from_ms(1005));  // 5ms fanout
}

TEST_CASE("submission errors: unknown contract and unregistered sender") {
  Harness h;
  h.register_nodes(1);
  h.ledger.detach(ContractModule::Reputation);
  CHECK_THROWS_AS(h.ledger.submit(NodeId{1}, AdjustReputationCall{NodeId{1}, 1}), SubmitError);

  // Registration is the only call an unregistered sender may make.
  CHECK_THROWS_AS(
      h.ledger.submit(NodeId{9}, RegisterServiceCall{"svc", {"170.100.8.40", 80, Proto::TCP}, {}}),
      SubmitError);
  CHECK_NOTHROW(h.ledger.submit(NodeId{9}, RegisterNodeCall{"192.168.0.19"}));
}

TEST_CASE("failed contract calls become rejected-tx records, not ledger errors") {
  Harness h;
  h.register_nodes(1);
  h.ledger.submit(NodeId{1}, RegisterNodeCall{"192.168.0.11"});  // duplicate registration
  h.ledger.produce_block(from_ms(1000));
  REQUIRE(h.ledger.rejected().size() == 1);
  CHECK(h.ledger.rejected()[0].fault == ContractFault::AlreadyRegistered);
  CHECK(h.ledger.logs().empty());
}

TEST_CASE("block and log sequences are deterministic") {
  auto run = [] {
    Harness h;
    h.register_nodes(3);
    h.ledger.start();
    for (int i = 0; i < 6; ++i) {
      h.sched.schedule(from_ms(100 * i + 37), [&h, i] {
        h.ledger.submit(NodeId{static_cast<std::uint32_t>(1 + i % 3)},
                        RegisterServiceCall{"svc-" + std::to_string(i),
                                            {"10.0.0." + std::to_string(i), 80, Proto::TCP},
                                            {}});
      });
    }
    h.sched.run_until(from_ms(3000));
    std::vector<std::tuple<std::uint64_t, SimTime, std::uint64_t>> trace;
    for (const ContractLog& log : h.ledger.logs()) {
      trace.emplace_back(log.log_seq, log.emitted_at, log.block_height);
    }
    return trace;
  };
  CHECK(run() == run());
}
