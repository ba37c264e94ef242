#include "areon/sim.hpp"

#include <algorithm>
#include <cassert>
#include <queue>

#include "areon/praos.hpp"
#include "areon/protocol.hpp"
#include "areon/rng.hpp"

namespace areon {

double sample_delay(const Config& cfg, std::uint64_t seed, BlockId id,
                    std::uint32_t recipient) {
  double u = rng::uniform(seed, rng::kDomDelay, id, recipient);
  switch (cfg.delay_model) {
    case DelayModel::fixed_bound: return rng::fixed_bound(u, cfg.delay_cap);
    case DelayModel::exp_capped:
      return rng::exp_capped(u, cfg.delay_mean, cfg.delay_cap);
  }
  return 0.0;
}

namespace {

// Deliveries at a boundary land before that slot's end snapshot; the next
// slot's creations come after the snapshot, and the adversary acts last.
enum : std::uint8_t {
  kPhDelivery = 0,
  kPhSlotEnd = 1,
  kPhSlotStart = 2,
  kPhAdvWake = 3,
};

struct Event {
  double time = 0.0;
  std::uint8_t phase = 0;
  std::uint64_t seq = 0;
  std::int32_t slot = 0;    // slot events
  std::uint32_t node = 0;   // deliveries
  BlockIdx block = 0;       // deliveries
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.phase != b.phase) return a.phase > b.phase;
    return a.seq > b.seq;
  }
};

struct NodeState {
  DagView view;
  Mailbox mb;
  std::vector<BlockIdx> frontier;
  Bits ledger_bits;
  std::vector<BlockIdx> ledger;

  explicit NodeState(const DagStore& store) : view(store) {
    frontier.push_back(store.genesis());
    ledger_bits.set(store.genesis());
    ledger.push_back(store.genesis());
  }
};

struct DcpSample {
  std::uint32_t node = 0;
  std::int32_t slot = 0;
  Bits trimmed;
};

// Longest short-edge distance from the frontier down to each ledger block.
// Ledger blocks reachable only over long edges are ancient reattached
// history and count as settled.
void ledger_depths(const DagStore& store, const std::vector<BlockIdx>& ledger,
                   const Bits& ledger_bits,
                   const std::vector<BlockIdx>& frontier, std::int32_t k,
                   std::vector<std::int32_t>& depth_out) {
  depth_out.assign(ledger.size(), 0);
  Bits in_frontier;
  for (BlockIdx f : frontier) in_frontier.set(f);
  std::vector<std::int32_t> depth_by_idx(store.size(), -1);
  for (std::size_t p = ledger.size(); p-- > 0;) {
    BlockIdx b = ledger[p];
    if (in_frontier.test(b)) {
      depth_by_idx[b] = 0;
    } else {
      std::int32_t d = -1;
      for (BlockIdx c : store.at(b).short_children) {
        if (!ledger_bits.test(c)) continue;
        assert(depth_by_idx[c] >= 0);  // children are newer, already done
        d = std::max(d, depth_by_idx[c] + 1);
      }
      depth_by_idx[b] = d >= 0 ? d : k;
    }
    depth_out[p] = depth_by_idx[b];
  }
}

std::vector<std::uint32_t> pick_sampled_nodes(std::uint32_t n) {
  std::vector<std::uint32_t> out;
  if (n <= 8) {
    for (std::uint32_t j = 0; j < n; ++j) out.push_back(j);
  } else {
    std::uint32_t stride = n / 8;
    for (std::uint32_t j = 0; j < n && out.size() < 8; j += stride)
      out.push_back(j);
  }
  return out;
}

}  // namespace

RunResult run_simulation(const Config& cfg) {
  if (cfg.variant == Variant::praos) return run_praos(cfg);

  const std::uint32_t n = cfg.n_honest;
  const std::int32_t horizon = cfg.horizon_slots;
  const double tau = cfg.slot_duration;

  DagStore store;
  Eligibility elig = make_eligibility(cfg, cfg.seed);
  std::vector<NodeState> nodes;
  nodes.reserve(n);
  for (std::uint32_t j = 0; j < n; ++j) nodes.emplace_back(store);

  std::optional<Adversary> adv;
  if (cfg.adversary_strategy != AdversaryStrategy::none &&
      elig.adversary != kNoValidator)
    adv.emplace(cfg, store, elig);

  RunResult res;
  res.seed = cfg.seed;
  res.horizon = horizon;

  std::priority_queue<Event, std::vector<Event>, EventAfter> heap;
  std::uint64_t seq = 0;
  auto push_slot = [&](std::uint8_t phase, std::int32_t s, double time) {
    heap.push(Event{time, phase, seq++, s, 0, 0});
  };

  auto broadcast = [&](BlockIdx idx, std::uint32_t origin, double now) {
    const Block& b = store.block(idx);
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j == origin) continue;
      double d = sample_delay(cfg, cfg.seed, b.id, j);
      heap.push(Event{now + d, kPhDelivery, seq++, 0, j, idx});
    }
    if (adv) adv->observe(idx);
  };

  // Observability state, mostly per node 0.
  std::vector<std::int32_t> first_inclusion;  // node 0; -1 = never yet
  auto note_included = [&](BlockIdx i, std::int32_t s) {
    if (first_inclusion.size() < store.size())
      first_inclusion.resize(store.size(), -1);
    if (first_inclusion[i] < 0) first_inclusion[i] = s;
  };
  std::vector<DcpSample> dcp_samples;
  std::vector<std::vector<std::int32_t>> k_deep_first;  // [node][idx]
  if (cfg.track_liveness) k_deep_first.resize(n);
  std::vector<std::uint64_t> tips_hist;  // index = tip count, over all nodes
  auto sampled_nodes = pick_sampled_nodes(n);
  std::vector<std::int32_t> depth_scratch;

  auto slot_end = [&](std::int32_t s) {
    std::int32_t t = s + 1;
    std::int32_t w = effective_w(cfg, t);
    for (std::uint32_t j = 0; j < n; ++j) {
      NodeState& nd = nodes[j];
      std::vector<BlockIdx> tips = tips_w(nd.view, t, w);
      std::uint32_t tip_count = std::uint32_t(tips.size());
      if (tips_hist.size() <= tip_count) tips_hist.resize(tip_count + 1, 0);
      ++tips_hist[tip_count];
      for (std::uint32_t sj : sampled_nodes)
        if (sj == j) res.tips_rows.push_back({s, j, tip_count});

      if (!tips.empty()) {
        nd.frontier = preferred_frontier(nd.view, t, w, cfg.tie_break);
        Bits next;
        for (BlockIdx f : nd.frontier) next.or_with(store.at(f).anc_full);

        if (nd.ledger_bits.any_and_not(next)) {
          std::int32_t depth = eviction_depth(nd.ledger, next);
          assert(depth > 0);
          // A discarded suffix made only of the adversary's own blocks (a
          // briefly adopted withheld release aging out of the window) removes
          // nothing an honest party produced; only evictions that drop at
          // least one honest block count as reorg events.
          bool honest_hit = false;
          for (std::size_t p = nd.ledger.size() - std::size_t(depth);
               p < nd.ledger.size(); ++p) {
            BlockIdx i = nd.ledger[p];
            if (!next.test(i) && store.block(i).validator != elig.adversary) {
              honest_hit = true;
              break;
            }
          }
          if (honest_hit) {
            res.reorg_events.push_back({s, j, depth});
            ++res.depth_hist[depth];
            res.max_depth = std::max(res.max_depth, depth);
            if (adv) adv->note_reorg(s, depth);
          }
          std::vector<BlockIdx> rebuilt;
          rebuilt.reserve(next.count());
          for (BlockIdx i : store.key_order())
            if (next.test(i)) rebuilt.push_back(i);
          if (j == 0)
            for (BlockIdx i : rebuilt)
              if (!nd.ledger_bits.test(i)) note_included(i, s);
          nd.ledger = std::move(rebuilt);
        } else {
          std::vector<BlockIdx> added;
          next.for_each_set_and_not(nd.ledger_bits,
                                    [&](std::size_t i) {
                                      added.push_back(BlockIdx(i));
                                    });
          if (!added.empty()) {
            std::sort(added.begin(), added.end(),
                      [&](BlockIdx a, BlockIdx b) {
                        return store.key_less(a, b);
                      });
            if (j == 0)
              for (BlockIdx i : added) note_included(i, s);
            if (store.key_less(nd.ledger.back(), added.front())) {
              nd.ledger.insert(nd.ledger.end(), added.begin(), added.end());
            } else {
              std::size_t old_len = nd.ledger.size();
              nd.ledger.insert(nd.ledger.end(), added.begin(), added.end());
              std::inplace_merge(
                  nd.ledger.begin(),
                  nd.ledger.begin() + std::ptrdiff_t(old_len),
                  nd.ledger.end(), [&](BlockIdx a, BlockIdx b) {
                    return store.key_less(a, b);
                  });
            }
          }
        }
        nd.ledger_bits = std::move(next);
      }
      // On a windowed tip drought the node keeps its last ledger; the
      // frontier empties so the next creation attaches via a long reference.
      if (tips.empty()) nd.frontier.clear();

      if (cfg.track_dcp && s > 0 && s % cfg.dcp_sample_every == 0 &&
          j < cfg.dcp_sample_nodes) {
        std::int32_t cutoff = s - 2 * cfg.delta_slots();
        Bits trimmed;
        for (BlockIdx i : nd.ledger)
          if (store.block(i).slot <= cutoff) trimmed.set(i);
        dcp_samples.push_back({j, s, std::move(trimmed)});
      }

      if (cfg.track_liveness) {
        ledger_depths(store, nd.ledger, nd.ledger_bits, nd.frontier,
                      cfg.liveness_k, depth_scratch);
        auto& first = k_deep_first[j];
        if (first.size() < store.size()) first.resize(store.size(), -1);
        for (std::size_t p = 0; p < nd.ledger.size(); ++p) {
          BlockIdx i = nd.ledger[p];
          if (depth_scratch[p] >= cfg.liveness_k && first[i] < 0) first[i] = s;
        }
      }
    }
  };

  auto slot_start = [&](std::int32_t s, double now) {
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!eligible(elig, v, s)) continue;
      NodeState& nd = nodes[v];
      // Creators cite every visible tip in the reference window, not just the
      // preferred frontier: race losers must keep getting referenced or
      // honest weight stops aggregating across forks.
      std::vector<BlockIdx> refs = tips_w(nd.view, s, effective_w(cfg, s));
      CreationResult cr =
          cfg.variant == Variant::ideal
              ? create_block_ideal(nd.view, cfg, elig, v, s, refs)
              : create_block_base(nd.view, cfg, elig, v, s, refs);
      auto rcv = receive_block(cfg.variant, store, nd.view, nd.mb, elig,
                               cfg.w, cr.block);
      assert(rcv.has_value() && rcv.value() == ReceiveStatus::inserted);
      (void)rcv;
      ++res.blocks_honest;
      if (cr.payload_dropped) ++res.payloads_dropped;
      broadcast(*store.find(cr.block.id), v, now);
    }
  };

  push_slot(kPhSlotStart, 1, 1.0 * tau);

  while (!heap.empty()) {
    Event ev = heap.top();
    heap.pop();
    if (ev.phase == kPhDelivery) {
      NodeState& nd = nodes[ev.node];
      auto rcv = receive_block(cfg.variant, store, nd.view, nd.mb, elig,
                               cfg.w, store.block(ev.block));
      if (rcv.has_value() && rcv.value() == ReceiveStatus::inserted)
        drain_mailbox(cfg.variant, store, nd.view, nd.mb, elig, cfg.w);
    } else if (ev.phase == kPhSlotStart) {
      slot_start(ev.slot, ev.time);
      push_slot(kPhAdvWake, ev.slot, ev.time);
      push_slot(kPhSlotEnd, ev.slot, (ev.slot + 1) * tau);
    } else if (ev.phase == kPhAdvWake) {
      if (adv) {
        auto wr = adv->wake(ev.slot);
        for (BlockIdx idx : wr.releases) broadcast(idx, UINT32_MAX, ev.time);
      }
    } else {
      slot_end(ev.slot);
      if (ev.slot >= horizon) break;
      push_slot(kPhSlotStart, ev.slot + 1, (ev.slot + 1) * tau);
    }
  }

  // Final accounting, all against the state at the last slot end.
  res.blocks_adversary = adv ? adv->blocks_created() : 0;
  res.blocks_total = res.blocks_honest + res.blocks_adversary;
  assert(res.blocks_total + 1 == store.size());

  res.final_ledger.reserve(nodes[0].ledger.size());
  for (BlockIdx i : nodes[0].ledger) res.final_ledger.push_back(store.block(i).id);
  res.lambda_ledger = double(nodes[0].ledger.size()) / double(horizon);

  std::uint64_t tips_n = 0, tips_sum = 0;
  for (std::size_t c = 0; c < tips_hist.size(); ++c) {
    tips_n += tips_hist[c];
    tips_sum += tips_hist[c] * c;
    if (tips_hist[c] > 0) res.tips_max = std::uint32_t(c);
  }
  if (tips_n > 0) {
    res.tips_mean = double(tips_sum) / double(tips_n);
    std::uint64_t target = (99 * tips_n + 99) / 100;  // ceil(0.99 n)
    std::uint64_t seen = 0;
    for (std::size_t c = 0; c < tips_hist.size(); ++c) {
      seen += tips_hist[c];
      if (seen >= target) {
        res.tips_p99 = double(c);
        break;
      }
    }
  }

  // Dispersion: per-interval inclusion of honest creations at node 0, with a
  // grace of one delay horizon past each interval's end.
  {
    first_inclusion.resize(store.size(), -1);
    std::int32_t ell = cfg.w;
    std::int32_t grace = cfg.delta_slots();
    std::vector<std::uint64_t> created, included;
    std::uint64_t inc_honest_total = 0, inc_total = 0;
    for (BlockIdx i = 1; i < store.size(); ++i) {
      const Block& b = store.block(i);
      bool honest = b.validator != elig.adversary;
      if (first_inclusion[i] >= 0) {
        ++inc_total;
        if (honest) ++inc_honest_total;
      }
      if (!honest) continue;
      std::size_t m = std::size_t((b.slot - 1) / ell);
      std::int32_t deadline = std::int32_t(m + 1) * ell + grace;
      if (deadline > horizon) continue;
      if (created.size() <= m) {
        created.resize(m + 1, 0);
        included.resize(m + 1, 0);
      }
      ++created[m];
      if (first_inclusion[i] >= 0 && first_inclusion[i] <= deadline)
        ++included[m];
    }
    for (std::size_t m = 0; m < created.size(); ++m) {
      if (created[m] == 0) continue;
      ++res.dg_intervals;
      res.dg_min_fraction = std::min(
          res.dg_min_fraction, double(included[m]) / double(created[m]));
    }
    res.dg_rate_per_slot = double(inc_honest_total) / double(horizon);
    res.dq_fraction =
        inc_total > 0 ? double(inc_honest_total) / double(inc_total) : 1.0;
  }

  if (cfg.track_dcp) {
    std::uint64_t checks = 0, passed = 0;
    for (const DcpSample& a : dcp_samples) {
      for (std::uint32_t j = 0; j < n; ++j) {
        ++checks;
        if (!a.trimmed.any_and_not(nodes[j].ledger_bits)) ++passed;
      }
      for (const DcpSample& b : dcp_samples) {
        if (&a == &b || a.slot > b.slot) continue;
        if (a.slot == b.slot && a.node == b.node) continue;
        ++checks;
        if (!a.trimmed.any_and_not(b.trimmed)) ++passed;
      }
    }
    res.dcp_checks = checks;
    res.dcp_pass_fraction = checks > 0 ? double(passed) / double(checks) : 1.0;
  }

  if (cfg.track_liveness) {
    std::vector<std::int32_t> delays;
    for (BlockIdx i = 1; i < store.size(); ++i) {
      const Block& b = store.block(i);
      if (b.validator == elig.adversary || b.payload.is_empty) continue;
      std::int32_t worst = -1;
      bool everywhere = true;
      for (std::uint32_t j = 0; j < n; ++j) {
        std::int32_t fs = i < k_deep_first[j].size() ? k_deep_first[j][i] : -1;
        if (fs < 0) {
          everywhere = false;
          break;
        }
        worst = std::max(worst, fs - b.slot);
      }
      if (everywhere)
        delays.push_back(worst);
      else
        ++res.liveness.censored;
    }
    res.liveness.included = delays.size();
    if (!delays.empty()) {
      std::sort(delays.begin(), delays.end());
      double sum = 0;
      for (std::int32_t d : delays) sum += d;
      res.liveness.mean_delay = sum / double(delays.size());
      res.liveness.p95_delay =
          delays[std::min(delays.size() - 1,
                          std::size_t(0.95 * double(delays.size())))];
    }
  }

  if (adv) {
    res.adv_branches = adv->branches_started();
    res.adv_releases = adv->releases_made();
    res.adv_budget_used = adv->budget_used();
    res.adv_budget_exhausted = adv->budget_exhausted();
    res.attack_log = adv->log();
    double sum = 0;
    std::uint64_t k = 0;
    for (const AttackLogEntry& e : res.attack_log) {
      if (e.action != AttackAction::release) continue;
      sum += e.achieved_depth;
      res.adv_max_achieved = std::max(res.adv_max_achieved, e.achieved_depth);
      ++k;
    }
    res.adv_mean_achieved = k > 0 ? sum / double(k) : 0.0;
  }

  return res;
}

}  // namespace areon
