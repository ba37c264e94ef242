#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "areon/adversary.hpp"
#include "areon/config.hpp"
#include "areon/dag.hpp"

namespace areon {

struct ReorgEvent {
  std::int32_t slot = 0;
  std::uint32_t node = 0;
  std::int32_t depth = 0;
};

struct TipsRow {
  std::int32_t slot = 0;
  std::uint32_t node = 0;
  std::uint32_t tips = 0;
};

struct LivenessStats {
  std::uint64_t included = 0;  // honest payloads that went k-deep everywhere
  std::uint64_t censored = 0;  // honest payloads still shallow at horizon
  double mean_delay = 0.0;     // slots from creation to global k-depth
  double p95_delay = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::int32_t horizon = 0;

  std::uint64_t blocks_total = 0;
  std::uint64_t blocks_honest = 0;
  std::uint64_t blocks_adversary = 0;
  std::uint64_t payloads_dropped = 0;

  // Reorg = ledger update that evicts entries; depth = tail length from the
  // earliest evicted position of the previous ledger.
  std::map<std::int32_t, std::uint64_t> depth_hist;
  std::vector<ReorgEvent> reorg_events;
  std::int32_t max_depth = 0;

  std::vector<BlockId> final_ledger;  // node 0, ids in ledger order
  double lambda_ledger = 0.0;         // node-0 final length / horizon

  std::vector<TipsRow> tips_rows;  // per sampled node per slot
  std::uint32_t tips_max = 0;
  double tips_p99 = 0.0;
  double tips_mean = 0.0;

  double dg_min_fraction = 1.0;   // worst interval inclusion ratio
  double dg_rate_per_slot = 0.0;  // honest inclusions per slot
  double dq_fraction = 1.0;       // honest share of included blocks
  std::uint64_t dg_intervals = 0;

  double dcp_pass_fraction = 1.0;
  std::uint64_t dcp_checks = 0;

  LivenessStats liveness;

  std::uint32_t adv_branches = 0;
  std::uint32_t adv_releases = 0;
  std::uint64_t adv_budget_used = 0;
  bool adv_budget_exhausted = false;
  double adv_mean_achieved = 0.0;
  std::int32_t adv_max_achieved = 0;
  std::vector<AttackLogEntry> attack_log;
};

// Runs one deterministic simulation of the configured variant and seed.
// Praos configs are routed to the chain engine in praos.hpp.
RunResult run_simulation(const Config& cfg);

// Delivery delay for one (block, recipient) pair, in slots of time.
double sample_delay(const Config& cfg, std::uint64_t seed, BlockId id,
                    std::uint32_t recipient);

}  // namespace areon
