#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "fogsim/runtime.hpp"

using namespace fogsim;

namespace {

const ImageProfile kNginx{"nginx", from_ms(1000), from_ms(8), ConnectionMode::PerRequest};

}  // namespace

TEST_CASE("lifecycle: Starting immediately, Running in the same instant, init after startup") {
  Scheduler sched;
  ContainerRuntime rt(sched);
  const ContainerInstance& inst = rt.create(NodeId{1}, "c", kNginx);
  CHECK(inst.state == ContainerState::Starting);
  sched.run_until(0);
  CHECK(rt.instance("c", NodeId{1})->state == ContainerState::Running);
  CHECK(rt.instance("c", NodeId{1})->initialized_at() == from_ms(1000));

  CHECK_THROWS_AS(rt.create(NodeId{1}, "c", kNginx), RuntimeError);  // duplicate on host
  CHECK_NOTHROW(rt.create(NodeId{2}, "c", kNginx));  // same id elsewhere (migration overlap)
}

TEST_CASE("probe passes only once initialization is complete") {
  Scheduler sched;
  ContainerRuntime rt(sched);
  rt.create(NodeId{1}, "c", kNginx);
  sched.run_until(from_ms(500));
  CHECK_FALSE(rt.probe("c", NodeId{1}, from_ms(500)));  // 500 < 1000 startup
  sched.run_until(from_ms(1000));
  CHECK(rt.instance("c", NodeId{1})->state == ContainerState::Healthy);
  CHECK(rt.instance("c", NodeId{1})->healthy_at == from_ms(1000));
}

TEST_CASE("probe-schedule oracle: passes_required=2, interval 500, startup 800 -> Healthy at 1500") {
  // Oracle: probes fire at 0, 500, 1000, 1500, ...; a probe passes iff
  // t >= startup; Healthy lands on the second consecutive pass.
  const SimTime startup = from_ms(800);
  const SimTime interval = from_ms(500);
  SimTime expected = -1;
  int passes = 0;
  for (SimTime t = 0; t <= from_ms(5000); t += interval) {
    passes = t >= startup ? passes + 1 : 0;
    if (passes == 2) {
      expected = t;
      break;
    }
  }
  REQUIRE(expected == from_ms(1500));

  Scheduler sched;
  ContainerRuntime rt(sched, HealthCheckConfig{interval, from_ms(100), 2});
  ImageProfile profile = kNginx;
  profile.startup_time = startup;
  rt.create(NodeId{1}, "c", profile);
  sched.run_until(from_ms(5000));
  CHECK(rt.instance("c", NodeId{1})->healthy_at == expected);
}

TEST_CASE("zero startup turns Healthy on the first probe") {
  Scheduler sched;
  ContainerRuntime rt(sched);
  ImageProfile instant = kNginx;
  instant.startup_time = 0;
  rt.create(NodeId{1}, "c", instant);
  sched.run_until(0);
  CHECK(rt.instance("c", NodeId{1})->state == ContainerState::Healthy);
  CHECK(rt.instance("c", NodeId{1})->healthy_at == 0);
}

TEST_CASE("healthy notification reaches the registered callback") {
  Scheduler sched;
  ContainerRuntime rt(sched);
  std::vector<std::pair<ContainerId, SimTime>> notified;
  rt.on_healthy([&](const ContainerInstance& inst) {
    notified.push_back({inst.container_id, sched.now()});
  });
  rt.create(NodeId{1}, "c", kNginx);
  sched.run_until(from_ms(3000));
  REQUIRE(notified.size() == 1);
  CHECK(notified[0].first == "c");
  CHECK(notified[0].second == from_ms(1000));
  CHECK(rt.instance("c", NodeId{1})->healthy_at >=
        rt.instance("c", NodeId{1})->created_at + kNginx.startup_time);
}

TEST_CASE("requests queue behind initialization") {
  Scheduler sched;
  ContainerRuntime rt(sched);
  ImageProfile profile = kNginx;
  profile.per_request_processing = from_ms(10);
  rt.create(NodeId{1}, "c", profile);

  // Arrival mid-initialization: response at init_end + processing.
  SimTime responded = -1;
  sched.schedule(from_ms(200), [&] {
    rt.serve_request("c", NodeId{1}, from_ms(200), [&](SimTime at, bool ok) {
      CHECK(ok);
      responded = at;
    });
  });
  sched.run_until(from_ms(2000));
  CHECK(responded == from_ms(1010));

  // Arrival after initialization: response at arrival + processing.
  SimTime responded2 = -1;
  sched.schedule(from_ms(3000), [&] {
    rt.serve_request("c", NodeId{1}, from_ms(3000), [&](SimTime at, bool ok) {
      CHECK(ok);
      responded2 = at;
    });
  });
  sched.run_until(from_ms(4000));
  CHECK(responded2 == from_ms(3010));
}

TEST_CASE("stop fails in-flight requests and is idempotent") {
  Scheduler sched;
  ContainerRuntime rt(sched);
  ImageProfile instant = kNginx;
  instant.startup_time = 0;
  rt.create(NodeId{1}, "c", instant);
  sched.run_until(from_ms(100));

  bool ok_flag = true;
  SimTime failed_at = -1;
  rt.serve_request("c", NodeId{1}, from_ms(100), [&](SimTime at, bool ok) {
    ok_flag = ok;
    failed_at = at;
  });
  sched.schedule(from_ms(104), [&] { rt.stop("c", NodeId{1}); });
  sched.run_until(from_ms(1000));
  CHECK_FALSE(ok_flag);
  CHECK(failed_at == from_ms(104));

  CHECK(rt.instance("c", NodeId{1})->state == ContainerState::Stopped);
  CHECK_NOTHROW(rt.stop("c", NodeId{1}));  // second stop is a no-op
  CHECK(rt.trace().back().kind == RuntimeTraceEntry::Kind::Stop);

  // Requests to a stopped instance fail immediately.
  bool late_ok = true;
  rt.serve_request("c", NodeId{1}, sched.now(), [&](SimTime, bool ok) { late_ok = ok; });
  CHECK_FALSE(late_ok);
}

TEST_CASE("running-container accounting never goes negative") {
  Scheduler sched;
  ContainerRuntime rt(sched);
  ImageProfile instant = kNginx;
  instant.startup_time = 0;
  CHECK(rt.running_on(NodeId{1}) == 0);
  rt.create(NodeId{1}, "a", instant);
  rt.create(NodeId{1}, "b", instant);
  CHECK(rt.running_on(NodeId{1}) == 2);
  rt.stop("a", NodeId{1});
  rt.stop("a", NodeId{1});  // repeat stop must not double-count
  CHECK(rt.running_on(NodeId{1}) == 1);
  rt.stop("b", NodeId{1});
  CHECK(rt.running_on(NodeId{1}) == 0);

  CHECK(rt.live_instances("a").empty());
  rt.create(NodeId{1}, "a", instant);  // restart after stop is allowed
  CHECK(rt.live_instances("a").size() == 1);
}
