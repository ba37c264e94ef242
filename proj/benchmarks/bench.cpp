#include <benchmark/benchmark.h>

#include "areon/config.hpp"
#include "areon/dag.hpp"
#include "areon/protocol.hpp"
#include "areon/rng.hpp"
#include "areon/sim.hpp"

namespace {

using namespace areon;

// A straight chain of single-ref blocks plus side branches every few slots,
// enough structure for frontier and weight paths to matter.
void build_dag(DagStore& store, DagView& view, int slots) {
  BlockIdx tip = store.genesis();
  for (int s = 1; s <= slots; ++s) {
    Block b;
    b.slot = s;
    b.validator = 0;
    b.y = rng::uniform(7, rng::kDomGen, std::uint64_t(s));
    b.short_refs.push_back(store.block(tip).id);
    b.id = compute_block_id(b);
    tip = store.insert(b).value();
    view.add(tip);
    if (s % 3 == 0) {
      Block side;
      side.slot = s;
      side.validator = 1;
      side.y = rng::uniform(7, rng::kDomGen, std::uint64_t(s), 1);
      side.short_refs.push_back(
          store.block(view.childless().front()).id);
      side.id = compute_block_id(side);
      view.add(store.insert(side).value());
    }
  }
}

void bm_insert_chain(benchmark::State& state) {
  for (auto _ : state) {
    DagStore store;
    DagView view(store);
    build_dag(store, view, int(state.range(0)));
    benchmark::DoNotOptimize(view.block_count());
  }
}
BENCHMARK(bm_insert_chain)->Arg(200)->Arg(1000);

void bm_preferred_frontier(benchmark::State& state) {
  DagStore store;
  DagView view(store);
  int slots = int(state.range(0));
  build_dag(store, view, slots);
  for (auto _ : state) {
    auto f = preferred_frontier(view, slots + 1, 30, TieBreak::larger);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(bm_preferred_frontier)->Arg(200)->Arg(1000);

void bm_max_antichain(benchmark::State& state) {
  DagStore store;
  DagView view(store);
  int slots = int(state.range(0));
  build_dag(store, view, slots);
  for (auto _ : state) {
    auto a = max_antichain(view, slots + 1, 12);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(bm_max_antichain)->Arg(60)->Arg(200);

void bm_small_run(benchmark::State& state) {
  Config cfg;
  cfg.n_honest = 16;
  cfg.horizon_slots = int(state.range(0));
  cfg.adversary_stake = 0.3;
  cfg.adversary_strategy = AdversaryStrategy::heuristic;
  for (auto _ : state) {
    RunResult r = run_simulation(cfg);
    benchmark::DoNotOptimize(r.max_depth);
  }
}
BENCHMARK(bm_small_run)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
