#include "areon/dag.hpp"

#include <algorithm>
#include <cassert>

namespace areon {

DagStore::DagStore() { init_genesis(make_genesis()); }

DagStore::DagStore(const Block& genesis) { init_genesis(genesis); }

void DagStore::init_genesis(const Block& g) {
  assert(g.slot == 0 && g.short_refs.empty() && !g.long_ref);
  Stored s;
  s.b = g;
  s.anc_short.set(0);
  s.anc_full.set(0);
  blocks_.push_back(std::move(s));
  index_.emplace(g.id, 0);
  key_order_.push_back(0);
}

std::optional<BlockIdx> DagStore::find(BlockId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t DagStore::lower_bound_key(const BlockKey& k) const {
  auto it = std::lower_bound(
      key_order_.begin(), key_order_.end(), k,
      [this](BlockIdx i, const BlockKey& kk) { return key(i) < kk; });
  return std::size_t(it - key_order_.begin());
}

const std::vector<BlockIdx>* DagStore::payloads_with_key(
    std::uint64_t key) const {
  auto it = payload_index_.find(key);
  if (it == payload_index_.end()) return nullptr;
  return &it->second;
}

Expected<BlockIdx, StoreError> DagStore::insert(const Block& b) {
  if (auto existing = find(b.id)) {
    return StoreError::duplicate_id;
  }
  std::vector<BlockIdx> short_t;
  short_t.reserve(b.short_refs.size());
  for (BlockId r : b.short_refs) {
    auto t = find(r);
    if (!t) return StoreError::unknown_reference;
    short_t.push_back(*t);
  }
  std::optional<BlockIdx> long_t;
  if (b.long_ref) {
    auto t = find(*b.long_ref);
    if (!t) return StoreError::unknown_reference;
    long_t = *t;
  }

  BlockIdx idx = BlockIdx(blocks_.size());
  Stored s;
  s.b = b;
  s.anc_short.resize(idx + 1);
  s.anc_full.resize(idx + 1);
  s.anc_short.set(idx);
  s.anc_full.set(idx);
  for (BlockIdx t : short_t) {
    s.anc_short.or_with(blocks_[t].anc_short);
    s.anc_full.or_with(blocks_[t].anc_full);
  }
  if (long_t) s.anc_full.or_with(blocks_[*long_t].anc_full);

  blocks_.push_back(std::move(s));
  index_.emplace(b.id, idx);
  for (BlockIdx t : short_t) blocks_[t].short_children.push_back(idx);
  if (long_t) blocks_[*long_t].long_children.push_back(idx);

  std::size_t pos = lower_bound_key(key(idx));
  key_order_.insert(key_order_.begin() + pos, idx);

  if (!b.payload.is_empty) payload_index_[b.payload.conflict_key].push_back(idx);
  return idx;
}

DagView::DagView(const DagStore& store) : store_(&store) {
  present_.set(store.genesis());
  short_child_cnt_.resize(store.size(), 0);
  childless_.push_back(store.genesis());
  count_ = 1;
}

void DagView::add(BlockIdx i) {
  if (present_.test(i)) return;
  const auto& s = store_->at(i);
  if (short_child_cnt_.size() < store_->size())
    short_child_cnt_.resize(store_->size(), 0);
  present_.set(i);
  ++count_;
  if (s.b.slot > max_slot_) max_slot_ = s.b.slot;

  auto key_pos = [this](BlockIdx x) {
    return std::lower_bound(childless_.begin(), childless_.end(), x,
                            [this](BlockIdx a, BlockIdx b) {
                              return store_->key_less(a, b);
                            });
  };

  for (BlockId rid : s.b.short_refs) {
    BlockIdx t = *store_->find(rid);
    assert(present_.test(t));
    if (short_child_cnt_[t]++ == 0) {
      auto it = key_pos(t);
      assert(it != childless_.end() && *it == t);
      childless_.erase(it);
    }
  }
  if (s.b.long_ref) assert(present_.test(*store_->find(*s.b.long_ref)));

  // A just-added block cannot have in-view children: any child references it
  // and would have been deferred until now.
  childless_.insert(key_pos(i), i);
}

int wref(const DagStore& store, BlockIdx b, std::int32_t w) {
  const Block& blk = store.block(b);
  int n = 0;
  for (BlockId rid : blk.short_refs) {
    BlockIdx target = *store.find(rid);
    std::int32_t dist = blk.slot - store.block(target).slot;
    if (dist >= 1 && dist <= w) ++n;
  }
  return n;
}

std::vector<BlockIdx> tips_w(const DagView& view, std::int32_t t,
                             std::int32_t w) {
  std::vector<BlockIdx> out;
  for (BlockIdx i : view.childless())
    if (in_window(view.store().block(i).slot, t, w)) out.push_back(i);
  return out;
}

std::vector<BlockIdx> tips_full(const DagView& view) {
  const auto& c = view.childless();
  return std::vector<BlockIdx>(c.begin(), c.end());
}

namespace {

std::int64_t own_closure_weight(const DagView& view, BlockIdx x,
                                std::int32_t w) {
  const DagStore& store = view.store();
  std::int64_t sum = 0;
  store.at(x).anc_short.for_each_set(
      [&](std::size_t d) { sum += wref(store, BlockIdx(d), w); });
  return sum;
}

bool key_pair_less(const DagStore& store, BlockIdx i, BlockIdx j,
                   TieBreak tie) {
  const Block& a = store.block(i);
  const Block& b = store.block(j);
  bool less = a.y != b.y ? a.y < b.y : a.id < b.id;
  return tie == TieBreak::larger ? less : !less;
}

}  // namespace

std::optional<BlockIdx> cca(const DagView& view, BlockIdx i, BlockIdx j) {
  const DagStore& store = view.store();
  const Bits& ai = store.at(i).anc_short;
  const Bits& aj = store.at(j).anc_short;
  const auto& order = store.key_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (ai.test(*it) && aj.test(*it)) return *it;
  return std::nullopt;
}

std::int64_t subdag_weight(const DagView& view, BlockIdx x, BlockIdx c,
                           std::int32_t w) {
  const DagStore& store = view.store();
  if (!store.at(x).anc_short.test(c)) return 0;
  std::int64_t sum = 0;
  store.at(x).anc_short.for_each_set([&](std::size_t d) {
    BlockIdx di = BlockIdx(d);
    // The shared anchor belongs to neither side of the race.
    if (di == c) return;
    if (store.at(di).anc_short.test(c)) sum += wref(store, di, w);
  });
  return sum;
}

std::int64_t windowed_gap(const DagView& view, BlockIdx i, BlockIdx j,
                          std::int32_t w) {
  auto c = cca(view, i, j);
  if (c) return subdag_weight(view, i, *c, w) - subdag_weight(view, j, *c, w);
  return own_closure_weight(view, i, w) - own_closure_weight(view, j, w);
}

BlockIdx ctr(const DagView& view, BlockIdx i, BlockIdx j, std::int32_t w,
             TieBreak tie) {
  std::int64_t gap = windowed_gap(view, i, j, w);
  if (gap > 0) return i;
  if (gap < 0) return j;
  return key_pair_less(view.store(), i, j, tie) ? j : i;
}

std::vector<BlockIdx> preferred_frontier(const DagView& view, std::int32_t t,
                                         std::int32_t w, TieBreak tie) {
  std::vector<BlockIdx> tips = tips_w(view, t, w);
  if (tips.size() <= 1) return tips;
  const DagStore& store = view.store();
  std::vector<bool> defeated(tips.size(), false);
  for (std::size_t a = 0; a + 1 < tips.size(); ++a) {
    if (defeated[a]) continue;
    for (std::size_t b = a + 1; b < tips.size(); ++b) {
      if (defeated[a]) break;
      if (defeated[b]) continue;
      if (!conflicts(store.block(tips[a]).payload, store.block(tips[b]).payload))
        continue;
      BlockIdx win = ctr(view, tips[a], tips[b], w, tie);
      defeated[win == tips[a] ? b : a] = true;
    }
  }
  std::vector<BlockIdx> out;
  for (std::size_t k = 0; k < tips.size(); ++k)
    if (!defeated[k]) out.push_back(tips[k]);
  return out;
}

std::vector<BlockIdx> linearize(const DagView& view,
                                const std::vector<BlockIdx>& frontier) {
  const DagStore& store = view.store();
  Bits members;
  for (BlockIdx f : frontier) members.or_with(store.at(f).anc_full);
  std::vector<BlockIdx> out;
  out.reserve(members.count());
  for (BlockIdx i : store.key_order())
    if (members.test(i)) out.push_back(i);
  return out;
}

std::int32_t eviction_depth(const std::vector<BlockIdx>& prev,
                            const Bits& next) {
  for (std::size_t p = 0; p < prev.size(); ++p)
    if (!next.test(prev[p])) return std::int32_t(prev.size() - p);
  return 0;
}

}  // namespace areon
