#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "areon/bits.hpp"
#include "areon/block.hpp"
#include "areon/expected.hpp"

namespace areon {

using BlockIdx = std::uint32_t;

enum class StoreError {
  duplicate_id,
  unknown_reference,
};

// Append-only arena shared by every view in a run. Edges only ever point at
// blocks that already exist, so reachability between stored blocks is fixed
// at insertion time and each block's ancestor closure can be computed once.
//
// Fork choice reads only short-edge reachability (anc_short); long edges
// carry no fork-choice influence at all and matter only for ledger
// membership, payload-conflict ancestry and inclusion tracking (anc_full).
class DagStore {
 public:
  struct Stored {
    Block b;
    Bits anc_short;  // short-edge ancestor closure, includes self
    Bits anc_full;   // closure over short and long edges, includes self
    std::vector<BlockIdx> short_children;
    std::vector<BlockIdx> long_children;
  };

  DagStore();
  explicit DagStore(const Block& genesis);

  BlockIdx size() const { return BlockIdx(blocks_.size()); }
  const Stored& at(BlockIdx i) const { return blocks_[i]; }
  const Block& block(BlockIdx i) const { return blocks_[i].b; }
  BlockIdx genesis() const { return 0; }

  std::optional<BlockIdx> find(BlockId id) const;
  bool contains(BlockId id) const { return find(id).has_value(); }

  // Requires every referenced id to be present already. Duplicate content
  // (same id) is rejected; nothing here checks protocol validity.
  Expected<BlockIdx, StoreError> insert(const Block& b);

  BlockKey key(BlockIdx i) const {
    const Block& b = blocks_[i].b;
    return BlockKey{b.slot, b.y, b.id};
  }
  bool key_less(BlockIdx a, BlockIdx b) const { return key(a) < key(b); }

  // Arena indices sorted ascending by (slot, y, id).
  const std::vector<BlockIdx>& key_order() const { return key_order_; }

  // Position in key_order() of the first entry with key >= k.
  std::size_t lower_bound_key(const BlockKey& k) const;

  // Non-empty stored blocks sharing a conflict key, in insertion order.
  const std::vector<BlockIdx>* payloads_with_key(std::uint64_t key) const;

 private:
  void init_genesis(const Block& g);

  std::vector<Stored> blocks_;
  std::unordered_map<BlockId, BlockIdx> index_;
  std::vector<BlockIdx> key_order_;
  std::unordered_map<std::uint64_t, std::vector<BlockIdx>> payload_index_;
};

// One participant's knowledge of the DAG: which stored blocks it has plus the
// caches fork choice needs. Invariant: a block is only added after all of its
// referenced blocks (short and long), so closures restricted to a view are
// always fully contained in it.
class DagView {
 public:
  explicit DagView(const DagStore& store);

  const DagStore& store() const { return *store_; }
  bool contains(BlockIdx i) const { return present_.test(i); }
  const Bits& present() const { return present_; }
  std::int32_t max_slot() const { return max_slot_; }
  std::size_t block_count() const { return count_; }

  void add(BlockIdx i);

  // Present blocks with no in-view short-ref child, ascending by key.
  const std::vector<BlockIdx>& childless() const { return childless_; }

 private:
  const DagStore* store_;
  Bits present_;
  std::vector<std::uint16_t> short_child_cnt_;
  std::vector<BlockIdx> childless_;
  std::int32_t max_slot_ = 0;
  std::size_t count_ = 0;
};

enum class TieBreak { larger, smaller };

// The window at evaluation slot t covers slots [t-w, t-1].
inline bool in_window(std::int32_t slot, std::int32_t t, std::int32_t w) {
  return slot >= t - w && slot <= t - 1;
}

// Number of b's short refs whose targets lie at most w slots behind b's own
// slot. Reception bounds every short ref this way, so for stored blocks this
// equals the short-ref count; the distance check still guards blocks probed
// before insertion.
int wref(const DagStore& store, BlockIdx b, std::int32_t w);

// Present blocks inside the window at t with no in-view short-ref child,
// ascending by key.
std::vector<BlockIdx> tips_w(const DagView& view, std::int32_t t,
                             std::int32_t w);

// Every visible block with no in-view short-ref child, ascending by key.
// Unbounded-referencing creators cite this whole set.
std::vector<BlockIdx> tips_full(const DagView& view);

// Newest (by key) common short-edge ancestor of i and j, or nullopt when the
// two share none (possible only for blocks attached purely by a long ref).
std::optional<BlockIdx> cca(const DagView& view, BlockIdx i, BlockIdx j);

// Sum of wref over the region strictly above c: short-edge ancestors of x
// that are short-edge descendants of c, excluding c itself. Long refs never
// reach the region (it is a short-closure intersection) and carry no wref,
// so they are weightless here by construction. Zero when x does not descend
// from c.
std::int64_t subdag_weight(const DagView& view, BlockIdx x, BlockIdx c,
                           std::int32_t w);

// Weight of i's region minus the weight of j's region over their common
// ancestor. Without a common ancestor each side scores its whole
// short-ancestor closure instead.
std::int64_t windowed_gap(const DagView& view, BlockIdx i, BlockIdx j,
                          std::int32_t w);

// Conflict-tolerant rule: the heavier region wins; equal weights fall back to
// (y, id), direction per tie.
BlockIdx ctr(const DagView& view, BlockIdx i, BlockIdx j, std::int32_t w,
             TieBreak tie);

// Undefeated tips, ascending by key. Conflicting tip pairs are visited in
// ascending (key of smaller, key of larger) order; each pair with both sides
// still alive is resolved by ctr and the loser is skipped from then on.
std::vector<BlockIdx> preferred_frontier(const DagView& view, std::int32_t t,
                                         std::int32_t w, TieBreak tie);

// Every block reachable from the frontier over short and long edges,
// ascending by key. This is the ledger order.
std::vector<BlockIdx> linearize(const DagView& view,
                                const std::vector<BlockIdx>& frontier);

// Lexicographically least maximum antichain (by the sorted key sequence)
// among in-window present blocks, mutual reachability judged over short
// edges. `forced` members are required to be in the result and must
// themselves be pairwise incomparable in-window blocks.
std::vector<BlockIdx> max_antichain(const DagView& view, std::int32_t t,
                                    std::int32_t w,
                                    const std::vector<BlockIdx>& forced = {});

// Eviction depth of replacing ledger `prev` (in ledger order) with the set
// `next`: zero when next keeps all of prev, otherwise the tail length of
// prev measured from its earliest entry missing from next.
std::int32_t eviction_depth(const std::vector<BlockIdx>& prev,
                            const Bits& next);

}  // namespace areon
