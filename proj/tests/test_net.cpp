#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <optional>
#include <vector>

#include "fogsim/net.hpp"

using namespace fogsim;

namespace {

// Default pipeline, as wired in scenarios: data 2ms end-to-end (switch at
// the mid-point), packet-in 3ms, rule install 3ms.
struct Fixture {
  Scheduler sched;
  SdnController sdn{sched};
  ContainerRuntime runtime{sched};
  Network net{sched, sdn, runtime, NetConfig{}};

  Fixture() {
    sdn.register_virtual_service("170.100.8.33", 80, Proto::TCP);
  }

  void start_backend(const std::string& ip, SimTime startup = 0, SimTime processing = from_ms(8)) {
    ImageProfile profile{"p", startup, processing, ConnectionMode::PerRequest};
    runtime.create(NodeId{1}, "c", profile);
    net.bind_endpoint(ip, 8080, NodeId{1}, "c");
    sdn.upsert_backend("170.100.8.33", 80, Proto::TCP, BackendEndpoint{ip, 8080, true});
    sdn.set_active("170.100.8.33", 80, Proto::TCP, true);
  }

  FiveTuple tuple(std::uint16_t port) {
    return FiveTuple{"192.168.0.90", port, "170.100.8.33", 80, Proto::TCP};
  }
};

}  // namespace

TEST_CASE("sum-of-delays oracle: miss path connects in 10ms, hit path in 4ms") {
  // Miss: 1 (to switch) + 3 (packet-in) + 3 (install) + 1 (to backend)
  //       + 2 (accept back) = 10ms. Hit: 1 + 1 + 2 = 4ms.
  Fixture f;
  f.start_backend("192.168.0.11");

  std::optional<ConnectResult> first, second;
  f.sched.schedule(from_ms(100), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) { first = r; });
  });
  // Same five-tuple later: the installed rule short-circuits the controller.
  f.sched.schedule(from_ms(500), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) { second = r; });
  });
  f.sched.run_until(from_ms(1000));

  REQUIRE(first.has_value());
  CHECK(first->established);
  CHECK(first->connect_time == from_ms(10));
  REQUIRE(second.has_value());
  CHECK(second->connect_time == from_ms(4));
  CHECK(f.sdn.rules_installed() == 1);
}

TEST_CASE("SYNs retry on the 300ms timer until the service comes up") {
  Fixture f;
  NetConfig cfg;
  cfg.max_retries = 5;
  Network net(f.sched, f.sdn, f.runtime, cfg);

  // Service activates at t=450ms: the SYNs at 0 and 300 are lost, the one at
  // 600 succeeds, so the connect time carries two full timeouts.
  f.sched.schedule(from_ms(450), [&] {
    f.start_backend("192.168.0.11");
    net.bind_endpoint("192.168.0.11", 8080, NodeId{1}, "c");
  });

  std::optional<ConnectResult> result;
  f.sched.schedule(0, [&] {
    net.open_connection(f.tuple(1), [&](ConnectResult r) { result = r; });
  });
  f.sched.run_until(from_ms(2000));

  REQUIRE(result.has_value());
  CHECK(result->established);
  CHECK(result->connect_time == from_ms(610));
  CHECK(result->connect_time >= from_ms(300));
  CHECK((result->connect_time / kMillisecond) % 300 == 10);
}

TEST_CASE("connections fail after exhausting the attempt budget") {
  Fixture f;  // virtual service never activates
  std::optional<ConnectResult> result;
  f.sched.schedule(0, [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) { result = r; });
  });
  f.sched.run_until(from_ms(2000));
  REQUIRE(result.has_value());
  CHECK_FALSE(result->established);
  CHECK(result->connect_time == from_ms(900));  // 3 attempts x 300ms
  CHECK(f.net.failed_total() == 1);
  CHECK(f.net.opened() == f.net.established_total() + f.net.failed_total());
}

TEST_CASE("request over an established stream: transit + processing") {
  Fixture f;
  f.start_backend("192.168.0.11", 0, from_ms(8));

  std::optional<RequestOutcome> outcome;
  SimTime sent_at = 0;
  f.sched.schedule(from_ms(100), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) {
      REQUIRE(r.established);
      // Query later, on the idle stream: latency excludes any connect cost.
      f.sched.schedule(from_ms(500), [&, id = r.conn_id] {
        sent_at = f.sched.now();
        f.net.send_request(id, [&](RequestOutcome o) { outcome = o; });
      });
    });
  });
  f.sched.run_until(from_ms(1000));
  REQUIRE(outcome.has_value());
  CHECK(outcome->ok);
  CHECK(outcome->responded_at - sent_at == from_ms(12));  // 2 + 8 + 2
  CHECK(outcome->backend_host == NodeId{1});
}

TEST_CASE("requests arriving during initialization are held until it completes") {
  Fixture f;
  f.start_backend("192.168.0.11", from_ms(1000), from_ms(10));

  std::optional<RequestOutcome> outcome;
  SimTime sent_at = 0;
  f.sched.schedule(from_ms(100), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) {
      REQUIRE(r.established);
      sent_at = f.sched.now();
      f.net.send_request(r.conn_id, [&](RequestOutcome o) { outcome = o; });
    });
  });
  f.sched.run_until(from_ms(3000));
  REQUIRE(outcome.has_value());
  CHECK(outcome->ok);
  CHECK(outcome->served_pre_healthy);
  // Established at 110, request arrives 112, held until init completes at
  // 1000, +10 processing, +2 back: responds at 1012.
  CHECK(outcome->responded_at == from_ms(1012));
}

TEST_CASE("backend removal breaks established flows lazily") {
  Fixture f;
  f.start_backend("192.168.0.11");

  std::uint64_t conn_id = 0;
  f.sched.schedule(from_ms(100), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) { conn_id = r.conn_id; });
  });
  f.sched.run_until(from_ms(200));
  REQUIRE(f.net.is_established(conn_id));

  f.sdn.remove_backend("170.100.8.33", 80, Proto::TCP, "192.168.0.11");
  CHECK_FALSE(f.net.is_established(conn_id));  // marked broken by invalidation

  bool ok = true;
  f.net.send_request(conn_id, [&](RequestOutcome o) { ok = o.ok; });
  CHECK_FALSE(ok);
}

TEST_CASE("stopping the serving container fails the in-flight request and breaks the stream") {
  Fixture f;
  f.start_backend("192.168.0.11", 0, from_ms(50));

  std::optional<RequestOutcome> outcome;
  std::uint64_t conn_id = 0;
  f.sched.schedule(from_ms(100), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) {
      conn_id = r.conn_id;
      f.net.send_request(r.conn_id, [&](RequestOutcome o) { outcome = o; });
    });
  });
  f.sched.schedule(from_ms(120), [&] { f.runtime.stop("c", NodeId{1}); });
  f.sched.run_until(from_ms(1000));

  REQUIRE(outcome.has_value());
  CHECK_FALSE(outcome->ok);
  CHECK_FALSE(f.net.is_established(conn_id));
}

TEST_CASE("responses slower than the client timeout become errors") {
  Fixture f;
  f.start_backend("192.168.0.11", 0, from_ms(8000));  // slower than the 5000ms budget

  std::optional<RequestOutcome> outcome;
  SimTime sent_at = 0;
  f.sched.schedule(from_ms(100), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) {
      REQUIRE(r.established);
      sent_at = f.sched.now();
      f.net.send_request(r.conn_id, [&](RequestOutcome o) { outcome = o; });
    });
  });
  f.sched.run_until(from_ms(20000));
  REQUIRE(outcome.has_value());
  CHECK_FALSE(outcome->ok);
  CHECK(outcome->responded_at - sent_at == from_ms(5000));  // time to failure
}

TEST_CASE("closing accounts for conservation") {
  Fixture f;
  f.start_backend("192.168.0.11");
  std::uint64_t id = 0;
  f.sched.schedule(from_ms(10), [&] {
    f.net.open_connection(f.tuple(1), [&](ConnectResult r) { id = r.conn_id; });
  });
  f.sched.run_until(from_ms(100));
  f.net.close(id);
  CHECK(f.net.opened() == 1);
  CHECK(f.net.established_total() == 1);
  CHECK(f.net.closed_total() == 1);
  CHECK(f.net.failed_total() == 0);
}
