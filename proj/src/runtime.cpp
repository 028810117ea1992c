#include "fogsim/runtime.hpp"

#include <algorithm>

namespace fogsim {

const std::map<std::string, ImageProfile>& builtin_profiles() {
  static const std::map<std::string, ImageProfile> profiles = {
      {"nginx", {"nginx", from_ms(1000), from_ms(8), ConnectionMode::PerRequest}},
      {"nextcloud", {"nextcloud", from_ms(3000), from_ms(317), ConnectionMode::PerRequest}},
      {"postgres", {"postgres", from_ms(2000), from_ms(8), ConnectionMode::PersistentStream}},
  };
  return profiles;
}

ContainerInstance& ContainerRuntime::create(NodeId host, const ContainerId& id,
                                            const ImageProfile& profile) {
  const Key key{host, id};
  auto it = slots_.find(key);
  if (it != slots_.end() && it->second.instance.state != ContainerState::Stopped) {
    throw RuntimeError("DuplicateContainer: " + id + " on " + to_string(host));
  }

  const SimTime now = sched_.now();
  Slot slot;
  slot.instance.container_id = id;
  slot.instance.host = host;
  slot.instance.profile = profile;
  slot.instance.state = ContainerState::Starting;
  slot.instance.created_at = now;
  slots_[key] = std::move(slot);
  slots_.at(key).epoch = next_epoch_++;
  running_count_[host]++;
  trace_.push_back({RuntimeTraceEntry::Kind::Create, now, id, host});

  // Running in the same instant, after events already queued at `now`.
  sched_.schedule(now, [this, key] {
    auto sit = slots_.find(key);
    if (sit == slots_.end() || sit->second.instance.state != ContainerState::Starting) return;
    sit->second.instance.state = ContainerState::Running;
    sit->second.instance.running_at = sched_.now();
    trace_.push_back({RuntimeTraceEntry::Kind::Running, sched_.now(), key.second, key.first});
  });
  schedule_probe(key, slots_.at(key).epoch, now);
  return slots_.at(key).instance;
}

void ContainerRuntime::schedule_probe(Key key, std::uint64_t epoch, SimTime at) {
  sched_.schedule(at, [this, key, epoch, at] {
    auto it = slots_.find(key);
    if (it == slots_.end() || it->second.epoch != epoch) return;
    ContainerInstance& inst = it->second.instance;
    if (inst.state == ContainerState::Stopped || inst.state == ContainerState::Healthy) return;
    probe(key.second, key.first, at);
    if (it->second.instance.state != ContainerState::Healthy) {
      schedule_probe(key, epoch, at + health_.probe_interval);
    }
  });
}

bool ContainerRuntime::probe(const ContainerId& id, NodeId host, SimTime now) {
  auto it = slots_.find(Key{host, id});
  if (it == slots_.end()) return false;
  ContainerInstance& inst = it->second.instance;
  if (inst.state == ContainerState::Stopped) return false;

  const bool pass = now >= inst.initialized_at();
  if (!pass) {
    inst.consecutive_passes = 0;
    return false;
  }
  inst.consecutive_passes++;
  if (inst.state != ContainerState::Healthy &&
      inst.consecutive_passes >= health_.consecutive_passes_required) {
    inst.state = ContainerState::Healthy;
    inst.healthy_at = now;
    trace_.push_back({RuntimeTraceEntry::Kind::Healthy, now, id, host});
    if (notify_) {
      ContainerInstance snapshot = inst;
      sched_.schedule(now, [cb = notify_, snapshot] { cb(snapshot); });
    }
  }
  return true;
}

void ContainerRuntime::serve_request(const ContainerId& id, NodeId host, SimTime arrival,
                                     ResponseCallback done) {
  auto it = slots_.find(Key{host, id});
  if (it == slots_.end() || it->second.instance.state == ContainerState::Stopped) {
    done(arrival, false);
    return;
  }
  ContainerInstance& inst = it->second.instance;
  // Requests reaching a running-but-uninitialized instance queue behind
  // initialization; that queue is the source of the startup latency peaks.
  const SimTime start = std::max(arrival, inst.initialized_at());
  const SimTime done_at = start + inst.profile.per_request_processing;

  const std::uint64_t pid = next_pending_id_++;
  it->second.pending.push_back({pid, done});
  const Key key{host, id};
  sched_.schedule(done_at, [this, key, pid, done_at] {
    auto sit = slots_.find(key);
    if (sit == slots_.end()) return;
    auto& pending = sit->second.pending;
    auto pit = std::find_if(pending.begin(), pending.end(),
                            [pid](const Pending& p) { return p.id == pid; });
    if (pit == pending.end()) return;  // failed at stop
    ResponseCallback cb = std::move(pit->done);
    pending.erase(pit);
    cb(done_at, true);
  });
}

void ContainerRuntime::stop(const ContainerId& id, NodeId host) {
  auto it = slots_.find(Key{host, id});
  if (it == slots_.end() || it->second.instance.state == ContainerState::Stopped) return;
  ContainerInstance& inst = it->second.instance;
  inst.state = ContainerState::Stopped;
  running_count_[host]--;
  trace_.push_back({RuntimeTraceEntry::Kind::Stop, sched_.now(), id, host});

  // In-flight requests on the stopped instance fail now.
  std::vector<Pending> failed;
  failed.swap(it->second.pending);
  const SimTime now = sched_.now();
  for (Pending& p : failed) {
    sched_.schedule(now, [cb = std::move(p.done), now] { cb(now, false); });
  }
}

const ContainerInstance* ContainerRuntime::instance(const ContainerId& id, NodeId host) const {
  auto it = slots_.find(Key{host, id});
  return it == slots_.end() ? nullptr : &it->second.instance;
}

std::vector<const ContainerInstance*> ContainerRuntime::live_instances(const ContainerId& id) const {
  std::vector<const ContainerInstance*> out;
  for (const auto& [key, slot] : slots_) {
    if (key.second == id && slot.instance.state != ContainerState::Stopped) {
      out.push_back(&slot.instance);
    }
  }
  return out;
}

int ContainerRuntime::running_on(NodeId host) const {
  auto it = running_count_.find(host);
  return it == running_count_.end() ? 0 : it->second;
}

}  // namespace fogsim
