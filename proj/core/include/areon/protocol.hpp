#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "areon/config.hpp"
#include "areon/dag.hpp"
#include "areon/expected.hpp"

namespace areon {

// Stake-weighted slot lottery shared by both protocol variants and the chain
// baseline. Thresholds depend on stake only, so they are precomputed per
// validator; the per-slot coin is a keyed hash, independent of draw order.
struct Eligibility {
  double f = 0.25;
  PhiFn phi_fn = PhiFn::praos_style;
  std::uint64_t seed = 1;
  std::vector<double> stake;      // index = validator id
  std::vector<double> threshold;  // phi(f, stake share)
  Vid adversary = kNoValidator;   // last id when adversary stake > 0

  double lambda() const;          // expected block births per slot
  double lambda_honest() const;
};

double phi(PhiFn fn, double f, double stake_share);

// Honest validators draw Pareto-distributed stakes normalized to
// 1 - adversary_stake; the adversary is one extra validator holding the rest.
Eligibility make_eligibility(const Config& cfg, std::uint64_t seed);

double draw_y(std::uint64_t seed, Vid v, std::int32_t slot);
bool eligible(const Eligibility& e, Vid v, std::int32_t slot);

// With probability p_conflict the payload contends for one of a small set of
// shared keys (collisions between such payloads are real conflicts);
// otherwise it gets a private key nothing else will ever touch.
Payload sample_payload(const Config& cfg, std::uint64_t seed, Vid v,
                       std::int32_t slot);

// True when the payload conflicts with some block in the combined full
// ancestry (targets included) of `ref_targets`.
bool payload_conflicts_with_ancestry(const DagStore& store,
                                     const Payload& payload,
                                     const std::vector<BlockIdx>& ref_targets);

// Newest visible block older than the window that the chosen references do
// not already cover (over full reachability). Reattachment target for
// orphaned history; nullopt when everything old is covered.
std::optional<BlockIdx> select_long_ref(const DagView& view,
                                        const std::vector<BlockIdx>& refs,
                                        std::int32_t t, std::int32_t w);

struct CreationResult {
  Block block;
  bool payload_dropped = false;
};

// Both creators reference the caller's preferred frontier. The ideal variant
// sees no window (callers pass the full-view frontier) and never drops a
// payload; the base variant adds a long reference when one is due and blanks
// a payload that would conflict with its own ancestry.
CreationResult create_block_ideal(const DagView& view, const Config& cfg,
                                  const Eligibility& e, Vid v,
                                  std::int32_t slot,
                                  const std::vector<BlockIdx>& refs);
CreationResult create_block_base(const DagView& view, const Config& cfg,
                                 const Eligibility& e, Vid v,
                                 std::int32_t slot,
                                 const std::vector<BlockIdx>& refs);

enum class ReceiveStatus { inserted, duplicate, deferred };

enum class ReceptionError {
  auth_invalid,
  above_threshold,
  non_positive_ref_distance,
  too_many_long_refs,
  cycle_detected,
  refs_not_antichain,
  no_references,
  payload_conflict,
};

const char* to_string(ReceptionError e);
const char* to_string(ReceiveStatus s);

// Blocks waiting for parents, in arrival order. Re-examined after every
// successful insert; an entry leaves the mailbox only once its parents are
// all present, at which point it is validated like a fresh arrival (and
// discarded if invalid).
struct Mailbox {
  std::deque<Block> pending;
};

// Validates and inserts one block into a view, deferring on missing parents.
// Checks run in a fixed, documented order (tests pin it):
//   duplicate, defer, auth, threshold, then per reference self-cycle /
//   distance / window class, then missing refs, short-ref antichain,
//   payload-vs-ancestry.
// The ideal variant skips distance, window, antichain and payload checks.
// A short ref further back than w and a long ref inside the window are both
// window misclassifications; the single long_ref slot makes a literal second
// long reference unrepresentable, so too_many_long_refs is the error for
// every long-reference budget violation.
Expected<ReceiveStatus, ReceptionError> receive_block(
    Variant variant, DagStore& store, DagView& view, Mailbox& mb,
    const Eligibility& e, std::int32_t w, const Block& b);

// Drains every pending block whose parents have shown up; returns how many
// got inserted. Call after receive_block reports `inserted`.
int drain_mailbox(Variant variant, DagStore& store, DagView& view, Mailbox& mb,
                  const Eligibility& e, std::int32_t w);

}  // namespace areon
