#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace fogsim {

// Fog node identifier. Numeric so that tie-breaks ("lowest node id") are
// well-defined and cheap to audit in traces.
struct NodeId {
  std::uint32_t value{0};

  auto operator<=>(const NodeId&) const = default;
};

inline std::string to_string(NodeId id) { return "node" + std::to_string(id.value); }

constexpr NodeId kNoNode{0};  // node ids are 1-based; 0 means "unset"

using ServiceId = std::string;
using ContainerId = std::string;
using EventId = std::uint64_t;
using TxId = std::uint64_t;

enum class Proto : std::uint8_t { TCP, UDP };

inline const char* to_string(Proto p) { return p == Proto::TCP ? "TCP" : "UDP"; }

// Exact-match connection key as seen by the switch.
struct FiveTuple {
  std::string src_ip;
  std::uint16_t src_port{0};
  std::string dst_ip;  // virtual service address
  std::uint16_t dst_port{0};
  Proto proto{Proto::TCP};

  auto operator<=>(const FiveTuple&) const = default;
};

inline std::string to_string(const FiveTuple& t) {
  return t.src_ip + ":" + std::to_string(t.src_port) + "->" + t.dst_ip + ":" +
         std::to_string(t.dst_port) + "/" + to_string(t.proto);
}

}  // namespace fogsim
