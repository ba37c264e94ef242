#include "areon/praos.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <queue>
#include <unordered_map>
#include <vector>

#include "areon/protocol.hpp"
#include "areon/rng.hpp"

namespace areon {

namespace {

struct PBlock {
  BlockId id = 0;
  std::int32_t slot = 0;
  Vid validator = kNoValidator;
  double y = 0.0;
  BlockId parent = 0;
  std::uint32_t height = 0;
};

BlockId praos_id(const PBlock& b) {
  std::uint64_t h = 0x50524153u;  // domain-separates from DAG block ids
  h = rng::mix64(h ^ std::uint64_t(std::uint32_t(b.slot)));
  h = rng::mix64(h ^ b.validator);
  h = rng::mix64(h ^ std::bit_cast<std::uint64_t>(b.y));
  h = rng::mix64(h ^ b.parent);
  return h ? h : 1;
}

PBlock make_genesis_p() {
  PBlock g;
  g.slot = 0;
  g.y = 0.0;
  g.parent = 0;
  g.height = 0;
  g.id = praos_id(g);
  return g;
}

struct PNode {
  std::unordered_map<BlockId, PBlock> known;
  std::deque<PBlock> pending;
  std::vector<BlockId> chain;  // genesis first
};

struct PEvent {
  double time = 0.0;
  std::uint8_t phase = 0;  // 0 delivery, 2 slot start, 3 adversary wake
  std::uint64_t seq = 0;
  std::int32_t slot = 0;
  std::uint32_t node = 0;
  PBlock block;
};

struct PEventAfter {
  bool operator()(const PEvent& a, const PEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.phase != b.phase) return a.phase > b.phase;
    return a.seq > b.seq;
  }
};

// Selfish withholding on a chain: privately extend the public tip, stay
// ahead, cash out while still strictly longer once the public chain closes
// within one block. A fork that falls level or behind is lost and dropped.
struct PraosAdversary {
  const Config& cfg;
  const Eligibility& elig;
  std::unordered_map<BlockId, PBlock> known;
  BlockId public_tip = 0;
  std::uint32_t public_height = 0;
  std::vector<PBlock> fork;
  std::uint32_t fork_root_height = 0;
  std::int32_t fork_root_slot = -1;

  std::vector<AttackLogEntry> log;
  std::uint32_t branches = 0, releases = 0;
  std::uint64_t created = 0;
  std::int32_t last_release_slot = -1;
  std::size_t last_release_log = SIZE_MAX;

  PraosAdversary(const Config& c, const Eligibility& e, const PBlock& genesis)
      : cfg(c), elig(e) {
    known.emplace(genesis.id, genesis);
    public_tip = genesis.id;
  }

  void observe(const PBlock& b) {
    if (!known.emplace(b.id, b).second) return;
    if (b.height > public_height) {
      public_height = b.height;
      public_tip = b.id;
    }
  }

  void abandon_fork(std::int32_t slot) {
    log.push_back({slot, AttackAction::abandon, fork_root_slot,
                   std::int32_t(fork.size()), 0, 0});
    fork.clear();
    fork_root_slot = -1;
  }

  std::vector<PBlock> wake(std::int32_t slot) {
    std::vector<PBlock> out;
    if (elig.adversary == kNoValidator) return out;

    if (!fork.empty() &&
        fork_root_height + fork.size() <= public_height)
      abandon_fork(slot);  // level or behind: strictly-longer never adopts

    if (eligible(elig, elig.adversary, slot)) {
      PBlock b;
      b.slot = slot;
      b.validator = elig.adversary;
      b.y = draw_y(elig.seed, elig.adversary, slot);
      if (fork.empty()) {
        const PBlock& root = known.at(public_tip);
        fork_root_height = root.height;
        fork_root_slot = root.slot;
        b.parent = root.id;
        b.height = root.height + 1;
        ++branches;
      } else {
        b.parent = fork.back().id;
        b.height = fork.back().height + 1;
      }
      b.id = praos_id(b);
      ++created;
      bool started = fork.empty();
      fork.push_back(b);
      known.emplace(b.id, b);
      log.push_back({slot,
                     started ? AttackAction::start_branch
                             : AttackAction::extend,
                     fork_root_slot, 0, 0, 0});
    }

    if (!fork.empty()) {
      std::uint32_t lead = fork_root_height + std::uint32_t(fork.size()) -
                           public_height;
      std::int32_t victims = std::int32_t(public_height - fork_root_height);
      if (lead == 1 && victims > 0) {
        out = fork;
        log.push_back({slot, AttackAction::release, fork_root_slot,
                       std::int32_t(fork.size()), victims, 0});
        last_release_slot = slot;
        last_release_log = log.size() - 1;
        ++releases;
        fork.clear();
        fork_root_slot = -1;
      }
    }
    return out;
  }

  void note_reorg(std::int32_t slot, std::int32_t depth) {
    if (last_release_log == SIZE_MAX) return;
    if (slot > last_release_slot + cfg.delta_slots() + 2) return;
    AttackLogEntry& e = log[last_release_log];
    e.achieved_depth = std::max(e.achieved_depth, depth);
  }
};

}  // namespace

RunResult run_praos(const Config& cfg) {
  assert(cfg.variant == Variant::praos);
  const std::uint32_t n = cfg.n_honest;
  const std::int32_t horizon = cfg.horizon_slots;
  const double tau = cfg.slot_duration;

  Eligibility elig = make_eligibility(cfg, cfg.seed);
  PBlock genesis = make_genesis_p();

  std::vector<PNode> nodes(n);
  for (PNode& nd : nodes) {
    nd.known.emplace(genesis.id, genesis);
    nd.chain.push_back(genesis.id);
  }

  std::optional<PraosAdversary> adv;
  if (cfg.adversary_strategy != AdversaryStrategy::none &&
      elig.adversary != kNoValidator)
    adv.emplace(cfg, elig, genesis);

  RunResult res;
  res.seed = cfg.seed;
  res.horizon = horizon;

  std::priority_queue<PEvent, std::vector<PEvent>, PEventAfter> heap;
  std::uint64_t seq = 0;
  std::int32_t current_slot = 0;

  auto broadcast = [&](const PBlock& b, std::uint32_t origin, double now) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j == origin) continue;
      double d = sample_delay(cfg, cfg.seed, b.id, j);
      PEvent ev;
      ev.time = now + d;
      ev.phase = 0;
      ev.seq = seq++;
      ev.node = j;
      ev.block = b;
      heap.push(ev);
    }
    if (adv) adv->observe(b);
  };

  // Adoption of a strictly longer chain; returns eviction depth (0 = none).
  auto adopt = [&](PNode& nd, const PBlock& b) {
    if (b.height + 1 <= nd.chain.size()) return 0;
    std::vector<BlockId> fresh;
    fresh.reserve(b.height + 1);
    for (BlockId cur = b.id;;) {
      const PBlock& pb = nd.known.at(cur);
      fresh.push_back(cur);
      if (pb.height == 0) break;
      cur = pb.parent;
    }
    std::reverse(fresh.begin(), fresh.end());
    std::size_t lcp = 0;
    while (lcp < nd.chain.size() && lcp < fresh.size() &&
           nd.chain[lcp] == fresh[lcp])
      ++lcp;
    int depth = int(nd.chain.size() - lcp);
    nd.chain = std::move(fresh);
    return depth;
  };

  auto record_reorg = [&](std::uint32_t j, std::int32_t depth) {
    if (depth <= 0) return;
    res.reorg_events.push_back({current_slot, j, depth});
    ++res.depth_hist[depth];
    res.max_depth = std::max(res.max_depth, depth);
    if (adv) adv->note_reorg(current_slot, depth);
  };

  auto receive = [&](std::uint32_t j, const PBlock& b) {
    PNode& nd = nodes[j];
    if (nd.known.count(b.id)) return;
    std::deque<PBlock> queue{b};
    while (!queue.empty()) {
      PBlock cur = queue.front();
      queue.pop_front();
      if (nd.known.count(cur.id)) continue;
      auto parent = nd.known.find(cur.parent);
      if (parent == nd.known.end()) {
        nd.pending.push_back(cur);
        continue;
      }
      if (cur.slot <= parent->second.slot) continue;
      if (cur.validator >= elig.threshold.size() ||
          cur.y >= elig.threshold[cur.validator])
        continue;
      PBlock fixed = cur;
      fixed.height = parent->second.height + 1;
      nd.known.emplace(fixed.id, fixed);
      record_reorg(j, adopt(nd, fixed));
      // Anything waiting on this block gets one more look.
      std::size_t before = nd.pending.size();
      for (std::size_t k = 0; k < before; ++k) {
        PBlock p = nd.pending.front();
        nd.pending.pop_front();
        if (p.parent == fixed.id)
          queue.push_back(p);
        else
          nd.pending.push_back(p);
      }
    }
  };

  {
    PEvent ev;
    ev.time = 1.0 * tau;
    ev.phase = 2;
    ev.seq = seq++;
    ev.slot = 1;
    heap.push(ev);
  }

  while (!heap.empty()) {
    PEvent ev = heap.top();
    heap.pop();
    if (ev.phase == 0) {
      receive(ev.node, ev.block);
    } else if (ev.phase == 2) {
      current_slot = ev.slot;
      for (std::uint32_t v = 0; v < n; ++v) {
        if (!eligible(elig, v, ev.slot)) continue;
        PNode& nd = nodes[v];
        PBlock b;
        b.slot = ev.slot;
        b.validator = v;
        b.y = draw_y(elig.seed, v, ev.slot);
        b.parent = nd.chain.back();
        b.height = std::uint32_t(nd.chain.size());
        b.id = praos_id(b);
        nd.known.emplace(b.id, b);
        nd.chain.push_back(b.id);
        ++res.blocks_honest;
        broadcast(b, v, ev.time);
      }
      PEvent wk;
      wk.time = ev.time;
      wk.phase = 3;
      wk.seq = seq++;
      wk.slot = ev.slot;
      heap.push(wk);
      if (ev.slot < horizon) {
        PEvent nx;
        nx.time = (ev.slot + 1) * tau;
        nx.phase = 2;
        nx.seq = seq++;
        nx.slot = ev.slot + 1;
        heap.push(nx);
      }
    } else if (ev.phase == 3) {
      if (adv)
        for (const PBlock& b : adv->wake(ev.slot))
          broadcast(b, UINT32_MAX, ev.time);
      if (ev.slot >= horizon && heap.empty()) break;
    }
    // Past the horizon only in-flight deliveries within one delay cap matter.
    if (!heap.empty() && heap.top().time > (horizon + 1) * tau) break;
  }

  res.blocks_adversary = adv ? adv->created : 0;
  res.blocks_total = res.blocks_honest + res.blocks_adversary;

  const PNode& obs = nodes[0];
  res.final_ledger.assign(obs.chain.begin(), obs.chain.end());
  res.lambda_ledger = double(obs.chain.size()) / double(horizon);
  res.tips_max = 1;
  res.tips_p99 = 1.0;
  res.tips_mean = 1.0;
  res.tips_rows.push_back({horizon, 0, 1});

  if (adv) {
    res.adv_branches = adv->branches;
    res.adv_releases = adv->releases;
    res.attack_log = adv->log;
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
