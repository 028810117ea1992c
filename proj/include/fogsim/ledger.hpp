#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fogsim/contracts.hpp"
#include "fogsim/ids.hpp"
#include "fogsim/scheduler.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

struct LedgerTransaction {
  TxId tx_id{0};
  NodeId sender;
  SimTime submitted_at{0};
  ContractCall payload;
};

struct Block {
  std::uint64_t height{0};
  SimTime produced_at{0};
  std::vector<LedgerTransaction> txs;
};

struct ContractLog {
  std::uint64_t log_seq{0};  // global emission order
  SimTime emitted_at{0};
  std::uint64_t block_height{0};
  TxId tx_id{0};  // the transaction this log is a consequence of
  LogPayload payload;
};

struct RejectedTx {
  TxId tx_id{0};
  NodeId sender;
  SimTime executed_at{0};
  ContractFault fault{ContractFault::WrongPhase};
  std::string detail;
};

/// Raised synchronously by submit(); distinct from execution-time rejections,
/// which are recorded and dropped.
class SubmitError : public std::runtime_error {
 public:
  SubmitError(ContractFault fault, const std::string& detail)
      : std::runtime_error(std::string(to_string(fault)) + ": " + detail), fault_(fault) {}
  ContractFault fault() const { return fault_; }

 private:
  ContractFault fault_;
};

struct LedgerConfig {
  SimTime block_interval{from_ms(1000)};
  SimTime log_delay{from_ms(5)};  // P2P fanout of asynchronous logs
};

/// Simulated permissioned blockchain. Transactions queue until the next
/// block boundary (multiples of block_interval, boundary inclusive), execute
/// sequentially in (submitted_at, sender, tx_id) order against the contract
/// suite, and the resulting logs are broadcast to every subscriber after a
/// fixed notification delay.
class Ledger {
 public:
  using LogHandler = std::function<void(const ContractLog&)>;

  Ledger(Scheduler& sched, Contracts& contracts, LedgerConfig config = {});

  /// Begins periodic block production at t = block_interval, 2*block_interval, ...
  void start();

  /// Queues a transaction at the current sim time. It executes in the first
  /// block whose production time >= now. Throws SubmitError for calls to
  /// unattached contracts and for non-registration calls from unregistered
  /// senders.
  TxId submit(NodeId sender, ContractCall call);

  /// Registers a log subscriber; it receives every log emitted after this
  /// call, in emission order, log_delay after emission.
  std::size_t subscribe(LogHandler handler);

  /// Executes all pending transactions with submitted_at <= now into a new
  /// block. Invoked by the production timer; exposed for direct-drive tests.
  /// `now` must be the current scheduler time, a block boundary.
  const Block& produce_block(SimTime now);

  // Detaching a contract module makes calls to it fail at submission.
  void detach(ContractModule m) { attached_.erase(m); }

  const Contracts& contracts() const { return contracts_; }
  SimTime block_interval() const { return config_.block_interval; }

  // Run traces.
  std::uint64_t block_count() const { return next_height_ - 1; }
  const std::vector<Block>& nonempty_blocks() const { return nonempty_blocks_; }
  const std::vector<ContractLog>& logs() const { return logs_; }
  const std::vector<RejectedTx>& rejected() const { return rejected_; }

 private:
  void schedule_next_block();

  Scheduler& sched_;
  Contracts& contracts_;
  LedgerConfig config_;
  std::set<ContractModule> attached_;
  std::vector<LedgerTransaction> pending_;
  std::vector<LogHandler> subscribers_;
  std::vector<Block> nonempty_blocks_;
  Block last_block_;
  std::vector<ContractLog> logs_;
  std::vector<RejectedTx> rejected_;
  TxId next_tx_id_{1};
  std::uint64_t next_height_{1};
  SimTime next_boundary_{0};
  bool started_{false};
};

}  // namespace fogsim
