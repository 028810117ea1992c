#include "fogsim/ledger.hpp"

#include <algorithm>

namespace fogsim {

Ledger::Ledger(Scheduler& sched, Contracts& contracts, LedgerConfig config)
    : sched_(sched), contracts_(contracts), config_(config) {
  attached_ = {ContractModule::DeviceRegistry, ContractModule::EventContract,
               ContractModule::ContainerRegistry, ContractModule::Reputation,
               ContractModule::InterDomain};
}

void Ledger::start() {
  if (started_) return;
  started_ = true;
  next_boundary_ = config_.block_interval;
  schedule_next_block();
}

void Ledger::schedule_next_block() {
  const SimTime at = next_boundary_;
  // Two-step firing: the inner event runs after everything already queued at
  // the boundary instant, so a submission at exactly t = boundary lands in
  // that block (boundary inclusive).
  sched_.schedule(at, [this, at] {
    sched_.schedule(at, [this, at] {
      produce_block(at);
      next_boundary_ += config_.block_interval;
      schedule_next_block();
    });
  });
}

TxId Ledger::submit(NodeId sender, ContractCall call) {
  const ContractModule target = module_of(call);
  if (attached_.count(target) == 0) {
    throw SubmitError(ContractFault::UnknownContract, to_string(target));
  }
  const bool is_registration = std::holds_alternative<RegisterNodeCall>(call);
  if (!is_registration && !contracts_.node_registered(sender)) {
    throw SubmitError(ContractFault::UnregisteredSender, to_string(sender));
  }
  LedgerTransaction tx;
  tx.tx_id = next_tx_id_++;
  tx.sender = sender;
  tx.submitted_at = sched_.now();
  tx.payload = std::move(call);
  const TxId id = tx.tx_id;
  pending_.push_back(std::move(tx));
  return id;
}

std::size_t Ledger::subscribe(LogHandler handler) {
  subscribers_.push_back(std::move(handler));
  return subscribers_.size() - 1;
}

const Block& Ledger::produce_block(SimTime now) {
  Block block;
  block.height = next_height_++;
  block.produced_at = now;

  auto cut = std::stable_partition(pending_.begin(), pending_.end(),
                                   [now](const LedgerTransaction& tx) { return tx.submitted_at <= now; });
  block.txs.assign(std::make_move_iterator(pending_.begin()), std::make_move_iterator(cut));
  pending_.erase(pending_.begin(), cut);

  // Deterministic total order inside the block.
  std::sort(block.txs.begin(), block.txs.end(),
            [](const LedgerTransaction& a, const LedgerTransaction& b) {
              if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
              if (a.sender != b.sender) return a.sender < b.sender;
              return a.tx_id < b.tx_id;
            });

  for (const LedgerTransaction& tx : block.txs) {
    std::vector<LogPayload> emitted;
    try {
      emitted = contracts_.execute(tx.sender, tx.payload, now);
    } catch (const ContractError& e) {
      rejected_.push_back(RejectedTx{tx.tx_id, tx.sender, now, e.fault(), e.what()});
      continue;
    }
    for (LogPayload& payload : emitted) {
      ContractLog log;
      log.log_seq = logs_.size();
      log.emitted_at = now;
      log.block_height = block.height;
      log.tx_id = tx.tx_id;
      log.payload = std::move(payload);
      logs_.push_back(log);
      for (const LogHandler& handler : subscribers_) {
        sched_.schedule(now + config_.log_delay, [handler, log] { handler(log); });
      }
    }
  }

  last_block_ = block;
  if (!block.txs.empty()) nonempty_blocks_.push_back(block);
  return last_block_;
}

}  // namespace fogsim
