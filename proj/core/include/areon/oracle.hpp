#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "areon/dag.hpp"

namespace areon::oracle {

// Reference implementations recomputed from first principles on every call:
// reachability by BFS over the raw reference lists, child relations by
// scanning every present block, optima by exhaustive enumeration. Nothing
// here touches the store's precomputed closures or the view's caches, so
// these are fit to judge the fast paths.

// Short-edge ancestors of src (inclusive), as a presence mask over the store.
Bits ancestors_short(const DagStore& store, BlockIdx src);
Bits ancestors_full(const DagStore& store, BlockIdx src);
bool reachable_short(const DagStore& store, BlockIdx from, BlockIdx to);

int wref(const DagStore& store, BlockIdx b, std::int32_t w);

std::vector<BlockIdx> tips(const DagStore& store, const DagView& view,
                           std::int32_t t, std::int32_t w);

std::optional<BlockIdx> cca(const DagStore& store, const DagView& view,
                            BlockIdx i, BlockIdx j);

std::int64_t subdag_weight(const DagStore& store, const DagView& view,
                           BlockIdx x, BlockIdx c, std::int32_t w);

std::int64_t windowed_gap(const DagStore& store, const DagView& view,
                          BlockIdx i, BlockIdx j, std::int32_t w);

BlockIdx ctr(const DagStore& store, const DagView& view, BlockIdx i,
             BlockIdx j, std::int32_t w, TieBreak tie);

std::vector<BlockIdx> preferred_frontier(const DagStore& store,
                                         const DagView& view, std::int32_t t,
                                         std::int32_t w, TieBreak tie);

std::vector<BlockIdx> linearize(const DagStore& store, const DagView& view,
                                const std::vector<BlockIdx>& frontier);

// Exhaustive lexicographically-least maximum antichain over the in-window
// present blocks (by the sorted key sequence). Eligible windows are capped
// at 20 vertices; larger inputs are a caller bug.
std::vector<BlockIdx> max_antichain(const DagStore& store, const DagView& view,
                                    std::int32_t t, std::int32_t w);

// Size of a minimum chain cover of the in-window present blocks, chains
// taken over short-edge reachability. Computed by subset dynamic
// programming, capped at 16 vertices. Equals the maximum antichain size.
int min_chain_cover(const DagStore& store, const DagView& view, std::int32_t t,
                    std::int32_t w);

}  // namespace areon::oracle
