#include "areon/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace areon::oracle {

namespace {

std::optional<BlockIdx> find_target(const DagStore& store, BlockId id) {
  return store.find(id);
}

void visit_parents(const DagStore& store, BlockIdx cur, bool follow_long,
                   Bits& seen, std::vector<BlockIdx>& stack) {
  const Block& b = store.block(cur);
  auto push = [&](BlockId id) {
    auto t = find_target(store, id);
    assert(t.has_value());  // stored blocks only reference stored blocks
    if (!seen.test(*t)) {
      seen.set(*t);
      stack.push_back(*t);
    }
  };
  for (BlockId id : b.short_refs) push(id);
  if (follow_long && b.long_ref) push(*b.long_ref);
}

Bits ancestors(const DagStore& store, BlockIdx src, bool follow_long) {
  Bits seen;
  std::vector<BlockIdx> stack{src};
  seen.set(src);
  while (!stack.empty()) {
    BlockIdx cur = stack.back();
    stack.pop_back();
    visit_parents(store, cur, follow_long, seen, stack);
  }
  return seen;
}

// Every present block whose short refs include b, found the slow way.
std::vector<BlockIdx> short_children_of(const DagStore& store,
                                        const DagView& view, BlockIdx b) {
  std::vector<BlockIdx> out;
  BlockId want = store.block(b).id;
  for (BlockIdx i = 0; i < store.size(); ++i) {
    if (!view.contains(i)) continue;
    for (BlockId id : store.block(i).short_refs)
      if (id == want) {
        out.push_back(i);
        break;
      }
  }
  return out;
}

std::vector<BlockIdx> window_members(const DagStore& store,
                                     const DagView& view, std::int32_t t,
                                     std::int32_t w) {
  std::vector<BlockIdx> out;
  for (BlockIdx i = 0; i < store.size(); ++i)
    if (view.contains(i) && in_window(store.block(i).slot, t, w))
      out.push_back(i);
  std::sort(out.begin(), out.end(),
            [&](BlockIdx a, BlockIdx b) { return store.key_less(a, b); });
  return out;
}

}  // namespace

Bits ancestors_short(const DagStore& store, BlockIdx src) {
  return ancestors(store, src, false);
}

Bits ancestors_full(const DagStore& store, BlockIdx src) {
  return ancestors(store, src, true);
}

bool reachable_short(const DagStore& store, BlockIdx from, BlockIdx to) {
  return ancestors_short(store, from).test(to);
}

int wref(const DagStore& store, BlockIdx b, std::int32_t w) {
  int n = 0;
  for (BlockId id : store.block(b).short_refs) {
    auto tgt = find_target(store, id);
    assert(tgt.has_value());
    std::int32_t dist = store.block(b).slot - store.block(*tgt).slot;
    if (dist >= 1 && dist <= w) ++n;
  }
  return n;
}

std::vector<BlockIdx> tips(const DagStore& store, const DagView& view,
                           std::int32_t t, std::int32_t w) {
  std::vector<BlockIdx> out;
  for (BlockIdx i : window_members(store, view, t, w))
    if (short_children_of(store, view, i).empty()) out.push_back(i);
  return out;
}

std::optional<BlockIdx> cca(const DagStore& store, const DagView& view,
                            BlockIdx i, BlockIdx j) {
  Bits ai = ancestors_short(store, i);
  Bits aj = ancestors_short(store, j);
  std::optional<BlockIdx> best;
  for (BlockIdx c = 0; c < store.size(); ++c) {
    if (!view.contains(c) || !ai.test(c) || !aj.test(c)) continue;
    if (!best || store.key_less(*best, c)) best = c;
  }
  return best;
}

std::int64_t subdag_weight(const DagStore& store, const DagView& view,
                           BlockIdx x, BlockIdx c, std::int32_t w) {
  if (!ancestors_short(store, x).test(c)) return 0;
  Bits ax = ancestors_short(store, x);
  std::int64_t sum = 0;
  for (BlockIdx d = 0; d < store.size(); ++d) {
    if (!view.contains(d) || !ax.test(d)) continue;
    if (d == c) continue;  // the shared anchor belongs to neither side
    if (!ancestors_short(store, d).test(c)) continue;  // d must cover c
    sum += oracle::wref(store, d, w);
  }
  return sum;
}

std::int64_t windowed_gap(const DagStore& store, const DagView& view,
                          BlockIdx i, BlockIdx j, std::int32_t w) {
  auto c = cca(store, view, i, j);
  if (c) {
    return subdag_weight(store, view, i, *c, w) -
           subdag_weight(store, view, j, *c, w);
  }
  // No common short ancestor: each side scores its whole closure.
  auto own = [&](BlockIdx x) {
    Bits ax = ancestors_short(store, x);
    std::int64_t sum = 0;
    for (BlockIdx d = 0; d < store.size(); ++d) {
      if (!view.contains(d) || !ax.test(d)) continue;
      sum += oracle::wref(store, d, w);
    }
    return sum;
  };
  return own(i) - own(j);
}

BlockIdx ctr(const DagStore& store, const DagView& view, BlockIdx i,
             BlockIdx j, std::int32_t w, TieBreak tie) {
  std::int64_t g = windowed_gap(store, view, i, j, w);
  if (g > 0) return i;
  if (g < 0) return j;
  auto yid = [&](BlockIdx b) {
    return std::pair<double, BlockId>(store.block(b).y, store.block(b).id);
  };
  bool i_larger = yid(i) > yid(j);
  if (tie == TieBreak::larger) return i_larger ? i : j;
  return i_larger ? j : i;
}

std::vector<BlockIdx> preferred_frontier(const DagStore& store,
                                         const DagView& view, std::int32_t t,
                                         std::int32_t w, TieBreak tie) {
  std::vector<BlockIdx> ts = tips(store, view, t, w);
  std::vector<bool> dead(ts.size(), false);
  for (std::size_t a = 0; a + 1 < ts.size(); ++a) {
    if (dead[a]) continue;
    for (std::size_t b = a + 1; b < ts.size(); ++b) {
      if (dead[a]) break;
      if (dead[b]) continue;
      if (!conflicts(store.block(ts[a]).payload, store.block(ts[b]).payload))
        continue;
      BlockIdx win = ctr(store, view, ts[a], ts[b], w, tie);
      dead[win == ts[a] ? b : a] = true;
    }
  }
  std::vector<BlockIdx> out;
  for (std::size_t k = 0; k < ts.size(); ++k)
    if (!dead[k]) out.push_back(ts[k]);
  return out;
}

std::vector<BlockIdx> linearize(const DagStore& store, const DagView& view,
                                const std::vector<BlockIdx>& frontier) {
  Bits seen;
  for (BlockIdx f : frontier) seen.or_with(ancestors_full(store, f));
  std::vector<BlockIdx> out;
  for (BlockIdx i = 0; i < store.size(); ++i)
    if (view.contains(i) && seen.test(i)) out.push_back(i);
  std::sort(out.begin(), out.end(),
            [&](BlockIdx a, BlockIdx b) { return store.key_less(a, b); });
  return out;
}

std::vector<BlockIdx> max_antichain(const DagStore& store, const DagView& view,
                                    std::int32_t t, std::int32_t w) {
  std::vector<BlockIdx> win = window_members(store, view, t, w);
  std::size_t n = win.size();
  assert(n <= 20);
  if (n == 0) return {};

  // comparable[a] bit b set when a and b are short-edge comparable.
  std::vector<std::uint32_t> comparable(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (reachable_short(store, win[a], win[b]) ||
          reachable_short(store, win[b], win[a]))
        comparable[a] |= 1u << b;
    }

  // Try every subset; among the maximum independent ones keep the
  // lexicographically least key sequence. Window members are already in key
  // order, so a mask's bit list maps to an ascending key list.
  std::uint32_t full = (1u << n) - 1;
  int best_size = 0;
  std::vector<BlockIdx> best;
  std::vector<BlockIdx> cand;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    int size = std::popcount(mask);
    if (size < best_size) continue;
    bool ok = true;
    for (std::uint32_t m = mask; m;) {
      std::uint32_t b = std::uint32_t(std::countr_zero(m));
      m &= m - 1;
      if (comparable[b] & mask) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    cand.clear();
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (1u << b)) cand.push_back(win[b]);
    bool take = size > best_size;
    if (!take && size == best_size)
      take = std::lexicographical_compare(
          cand.begin(), cand.end(), best.begin(), best.end(),
          [&](BlockIdx x, BlockIdx y) { return store.key_less(x, y); });
    if (take) {
      best = cand;
      best_size = size;
    }
  }
  return best;
}

int min_chain_cover(const DagStore& store, const DagView& view, std::int32_t t,
                    std::int32_t w) {
  std::vector<BlockIdx> win = window_members(store, view, t, w);
  std::size_t n = win.size();
  assert(n <= 16);
  if (n == 0) return 0;

  std::vector<std::uint32_t> comparable(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && (reachable_short(store, win[a], win[b]) ||
                     reachable_short(store, win[b], win[a])))
        comparable[a] |= 1u << b;

  std::uint32_t full = (1u << n) - 1;
  std::vector<bool> is_chain(full + 1, false);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    bool ok = true;
    for (std::uint32_t m = mask; ok && m;) {
      std::uint32_t b = std::uint32_t(std::countr_zero(m));
      m &= m - 1;
      // Every other member must be comparable with b.
      if ((mask & ~(1u << b) & ~comparable[b]) != 0) ok = false;
    }
    is_chain[mask] = ok;
  }

  std::vector<int> cover(full + 1, INT32_MAX);
  cover[0] = 0;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    // Enumerate submasks that contain mask's lowest vertex; that vertex must
    // sit in some chain, so this loses no optimal solution.
    std::uint32_t low = mask & (0u - mask);
    for (std::uint32_t sub = mask;; sub = (sub - 1) & mask) {
      if ((sub & low) && is_chain[sub] && cover[mask ^ sub] != INT32_MAX)
        cover[mask] = std::min(cover[mask], cover[mask ^ sub] + 1);
      if (sub == 0) break;
    }
  }
  assert(cover[full] != INT32_MAX);
  return cover[full];
}

}  // namespace areon::oracle
