#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "areon/config.hpp"
#include "areon/dag.hpp"
#include "areon/protocol.hpp"

namespace areon {

enum class AttackAction { start_branch, extend, release, abandon };

struct AttackLogEntry {
  std::int32_t slot = 0;
  AttackAction action = AttackAction::start_branch;
  std::int32_t anchor_slot = -1;
  std::int32_t released = 0;         // blocks released by this action
  std::int32_t projected_depth = 0;  // eviction depth the actor expected
  std::int32_t achieved_depth = 0;   // deepest honest eviction attributed
};

const char* to_string(AttackAction a);

// Withholding adversary. It watches every broadcast instantly (its model of
// the public DAG ignores delivery lag), grows at most one private branch
// anchored below the public frontier, gives each private block a payload
// contending with the newest non-empty public tip, and merges every
// compatible visible tip into its references so absorbed honest work counts
// for the private side of the weight race. Fights over history older than
// the 2w-slot sliding attack window are abandoned.
//
// The heuristic strategy releases the whole branch at the first wake where
// the withheld tip's windowed gap against the strongest conflicting public
// tip is strictly positive. The exhaustive strategy scores every
// ancestry-closed release prefix exactly against the public model, projects
// the value of holding via a drifted random walk on the weight gap, and picks
// the best plan; exact scorings are charged against a budget, after which it
// degrades to the heuristic rule (reported via budget stats).
class Adversary {
 public:
  Adversary(const Config& cfg, DagStore& store, const Eligibility& elig);

  // Every broadcast block enters the public model immediately.
  void observe(BlockIdx idx);

  struct WakeResult {
    std::vector<BlockIdx> releases;  // ancestry order, ready to broadcast
  };
  WakeResult wake(std::int32_t slot);

  // Engine feedback: an honest node evicted `depth` entries at `slot`.
  void note_reorg(std::int32_t slot, std::int32_t depth);

  const std::vector<AttackLogEntry>& log() const { return log_; }
  std::uint32_t branches_started() const { return branches_; }
  std::uint32_t releases_made() const { return releases_; }
  std::uint64_t budget_used() const { return budget_used_; }
  bool budget_exhausted() const { return budget_exhausted_; }
  std::uint64_t blocks_created() const { return created_; }

 private:
  void refresh_public_state(std::int32_t slot);
  std::optional<BlockIdx> pick_anchor(std::int32_t slot) const;
  Payload pick_payload(std::int32_t slot,
                       const std::vector<BlockIdx>& ancestry);
  void start_or_extend(std::int32_t slot);
  void abandon(std::int32_t slot);

  // Eviction depth at the public model if `count` branch blocks were visible
  // now, judged at the next slot boundary.
  std::int32_t projected_depth(std::int32_t slot, std::size_t count);

  bool heuristic_release(std::int32_t slot, WakeResult& out);
  bool exhaustive_release(std::int32_t slot, WakeResult& out);
  void do_release(std::int32_t slot, std::size_t count, std::int32_t projected,
                  WakeResult& out);

  const Config& cfg_;
  DagStore& store_;
  const Eligibility& elig_;
  DagView public_view_;
  std::vector<BlockIdx> public_frontier_;
  Bits public_ledger_bits_;
  std::vector<BlockIdx> public_ledger_;

  std::optional<BlockIdx> anchor_;
  std::int32_t anchor_slot_ = -1;
  std::vector<BlockIdx> branch_;

  std::vector<AttackLogEntry> log_;
  std::uint32_t branches_ = 0, releases_ = 0;
  std::uint64_t budget_used_ = 0, created_ = 0;
  bool budget_exhausted_ = false;
  std::uint64_t observed_honest_ = 0;
  std::int32_t last_release_slot_ = -1;
  std::size_t last_release_log_ = SIZE_MAX;
};

}  // namespace areon
