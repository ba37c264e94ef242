#include "areon/adversary.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "areon/rng.hpp"

namespace areon {

const char* to_string(AttackAction a) {
  switch (a) {
    case AttackAction::start_branch: return "start_branch";
    case AttackAction::extend: return "extend";
    case AttackAction::release: return "release";
    case AttackAction::abandon: return "abandon";
  }
  return "?";
}

Adversary::Adversary(const Config& cfg, DagStore& store,
                     const Eligibility& elig)
    : cfg_(cfg), store_(store), elig_(elig), public_view_(store) {
  public_ledger_bits_.set(store.genesis());
  public_ledger_.push_back(store.genesis());
}

void Adversary::observe(BlockIdx idx) {
  if (public_view_.contains(idx)) return;
  public_view_.add(idx);
  if (store_.block(idx).validator != elig_.adversary) ++observed_honest_;
}

void Adversary::refresh_public_state(std::int32_t slot) {
  // Judge the public model the way honest nodes will at this slot's end.
  std::int32_t t = slot + 1;
  public_frontier_ =
      preferred_frontier(public_view_, t, effective_w(cfg_, t), cfg_.tie_break);
  Bits bits;
  for (BlockIdx f : public_frontier_) bits.or_with(store_.at(f).anc_full);
  if (!bits.equals(public_ledger_bits_)) {
    public_ledger_bits_ = std::move(bits);
    public_ledger_.clear();
    for (BlockIdx i : store_.key_order())
      if (public_ledger_bits_.test(i)) public_ledger_.push_back(i);
  }
}

std::optional<BlockIdx> Adversary::pick_anchor(std::int32_t slot) const {
  if (public_frontier_.empty()) return std::nullopt;
  // Newest in-window strict common short-ancestor of every public tip.
  std::int32_t w = effective_w(cfg_, slot);
  const auto& order = store_.key_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    BlockIdx c = *it;
    std::int32_t cs = store_.block(c).slot;
    if (cs >= slot) continue;
    if (cs < slot - w) break;  // key order is slot-major, older from here on
    if (!public_view_.contains(c)) continue;
    bool common = true;
    for (BlockIdx f : public_frontier_) {
      if (f == c || !store_.at(f).anc_short.test(c)) {
        common = false;
        break;
      }
    }
    if (common) return c;
  }
  return std::nullopt;
}

Payload Adversary::pick_payload(std::int32_t slot,
                                const std::vector<BlockIdx>& ancestry) {
  std::uint64_t tx = rng::mix(elig_.seed, rng::kDomTx, elig_.adversary,
                              std::uint64_t(slot));
  // Contend with the newest public tip that carries a payload, skipping keys
  // the branch ancestry already holds (copying those would make the block
  // invalid at honest reception).
  for (auto it = public_frontier_.rbegin(); it != public_frontier_.rend();
       ++it) {
    const Payload& tip = store_.block(*it).payload;
    if (tip.is_empty) continue;
    Payload p{tx, tip.conflict_key, false};
    if (!payload_conflicts_with_ancestry(store_, p, ancestry)) return p;
  }
  return Payload{tx, (1ULL << 63) | tx, false};
}

void Adversary::start_or_extend(std::int32_t slot) {
  if (elig_.adversary == kNoValidator ||
      !eligible(elig_, elig_.adversary, slot))
    return;

  std::vector<BlockIdx> refs;
  std::int32_t anchor_slot_for_log;
  if (branch_.empty()) {
    auto a = pick_anchor(slot);
    if (!a) return;
    anchor_ = a;
    anchor_slot_ = store_.block(*a).slot;
    refs.push_back(*a);
    anchor_slot_for_log = anchor_slot_;
  } else {
    BlockIdx tip = branch_.back();
    if (slot - store_.block(tip).slot > cfg_.w &&
        cfg_.variant != Variant::ideal)
      return;  // unextendable; the abandon rule fires next wake
    refs.push_back(tip);
    anchor_slot_for_log = anchor_slot_;
  }

  Block b;
  b.slot = slot;
  b.validator = elig_.adversary;
  b.y = draw_y(elig_.seed, elig_.adversary, slot);
  b.payload = pick_payload(slot, refs);

  // Widen the reference antichain with every visible tip whose history stays
  // clear of the contested payload: merged honest work then counts for the
  // private branch's side of the weight race.
  {
    DagView scratch = public_view_;
    for (BlockIdx p : branch_) scratch.add(p);
    BlockIdx base = refs.front();
    const Bits& base_anc = store_.at(base).anc_full;
    for (BlockIdx h : tips_w(scratch, slot, effective_w(cfg_, slot))) {
      if (h == base) continue;
      if (store_.at(h).anc_full.test(base) || base_anc.test(h)) continue;
      std::vector<BlockIdx> one{h};
      if (payload_conflicts_with_ancestry(store_, b.payload, one)) continue;
      refs.push_back(h);
    }
    std::sort(refs.begin(), refs.end(), [&](BlockIdx x, BlockIdx y) {
      return store_.key_less(x, y);
    });
  }

  for (BlockIdx r : refs) b.short_refs.push_back(store_.block(r).id);
  b.id = compute_block_id(b);
  auto ins = store_.insert(b);
  assert(ins.has_value());  // fresh (validator, slot) pair, id is new
  bool started = branch_.empty();
  branch_.push_back(ins.value());
  ++created_;
  if (started) ++branches_;
  log_.push_back({slot,
                  started ? AttackAction::start_branch : AttackAction::extend,
                  anchor_slot_for_log, 0, 0, 0});
}

void Adversary::abandon(std::int32_t slot) {
  log_.push_back({slot, AttackAction::abandon, anchor_slot_,
                  std::int32_t(branch_.size()), 0, 0});
  branch_.clear();
  anchor_.reset();
  anchor_slot_ = -1;
}

std::int32_t Adversary::projected_depth(std::int32_t slot, std::size_t count) {
  DagView scratch = public_view_;
  for (std::size_t i = 0; i < count; ++i) scratch.add(branch_[i]);
  std::int32_t t = slot + 1;
  auto frontier =
      preferred_frontier(scratch, t, effective_w(cfg_, t), cfg_.tie_break);
  Bits bits;
  for (BlockIdx f : frontier) bits.or_with(store_.at(f).anc_full);
  return eviction_depth(public_ledger_, bits);
}

void Adversary::do_release(std::int32_t slot, std::size_t count,
                           std::int32_t projected, WakeResult& out) {
  assert(count > 0 && count <= branch_.size());
  out.releases.assign(branch_.begin(), branch_.begin() + std::ptrdiff_t(count));
  log_.push_back({slot, AttackAction::release, anchor_slot_,
                  std::int32_t(count), projected, 0});
  last_release_slot_ = slot;
  last_release_log_ = log_.size() - 1;
  ++releases_;
  branch_.erase(branch_.begin(), branch_.begin() + std::ptrdiff_t(count));
  if (branch_.empty()) {
    anchor_.reset();
    anchor_slot_ = -1;
  } else {
    // The released tip is public now and roots what is left of the branch.
    anchor_ = out.releases.back();
    anchor_slot_ = store_.block(out.releases.back()).slot;
  }
}

bool Adversary::heuristic_release(std::int32_t slot, WakeResult& out) {
  // Greedy rule: release everything the first time the withheld tip's
  // windowed gap against the strongest conflicting public tip turns strictly
  // positive. Ties stay withheld; the tie-break is not worth burning the
  // branch over.
  BlockIdx tip = branch_.back();
  const Payload& mine = store_.block(tip).payload;
  std::int32_t w = effective_w(cfg_, slot + 1);

  std::optional<BlockIdx> rival;
  for (BlockIdx f : public_frontier_) {
    if (!conflicts(mine, store_.block(f).payload)) continue;
    if (!rival || windowed_gap(public_view_, f, *rival, w) > 0) rival = f;
  }
  if (!rival) return false;

  DagView scratch = public_view_;
  for (BlockIdx p : branch_) scratch.add(p);
  if (windowed_gap(scratch, tip, *rival, w) <= 0) return false;

  do_release(slot, branch_.size(), projected_depth(slot, branch_.size()), out);
  return true;
}

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

bool Adversary::exhaustive_release(std::int32_t slot, WakeResult& out) {
  // Score every release prefix exactly on one incrementally grown clone of
  // the public model. Each prefix evaluation is charged against the budget.
  DagView scratch = public_view_;
  std::int32_t t = slot + 1;
  std::int32_t w = effective_w(cfg_, t);
  std::int32_t best_depth = 0;
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < branch_.size(); ++i) {
    scratch.add(branch_[i]);
    if (budget_used_ >= cfg_.exhaustive_budget) {
      budget_exhausted_ = true;
      break;
    }
    ++budget_used_;
    auto frontier = preferred_frontier(scratch, t, w, cfg_.tie_break);
    Bits bits;
    for (BlockIdx f : frontier) bits.or_with(store_.at(f).anc_full);
    std::int32_t d = eviction_depth(public_ledger_, bits);
    if (d > best_depth) {
      best_depth = d;
      best_count = i + 1;
    }
  }
  if (budget_exhausted_) return heuristic_release(slot, out);

  if (best_depth <= 0) return false;

  // Deadline: if the branch tip leaves the honest window before the next
  // wake could act, holding forfeits everything scored above.
  BlockIdx tip = branch_.back();
  bool tip_leaving = cfg_.variant != Variant::ideal &&
                     (slot + 1) - store_.block(tip).slot >= w;
  bool anchor_expiring = anchor_slot_ >= 0 && anchor_slot_ <= slot - 2 * cfg_.w;
  bool deadline = tip_leaving || anchor_expiring;
  if (!deadline) {
    // Value of waiting: the weight race against the strongest conflicting
    // public tip drifts at the block-rate difference; project the chance the
    // branch is still ahead after h more slots and what depth it would buy.
    double la = double(created_) / std::max(1, slot);
    double lh = double(observed_honest_) / std::max(1, slot);
    double lled = double(public_ledger_.size()) / double(slot + 1);
    std::int64_t gap = 0;
    bool have_rival = false;
    for (BlockIdx f : public_frontier_) {
      if (!conflicts(store_.block(tip).payload, store_.block(f).payload))
        continue;
      gap = windowed_gap(scratch, tip, f, w);
      have_rival = true;
      break;
    }
    double mu = la - lh;
    double sigma = std::sqrt(std::max(la + lh, 1e-9));
    double hold_best = 0.0;
    for (int h = 1; h <= 8; ++h) {
      double p_ahead = have_rival
                           ? std_normal_cdf((double(gap) + mu * h) /
                                            (sigma * std::sqrt(double(h))))
                           : la / std::max(la + lh, 1e-9);
      double v = (double(best_depth) + lled * h) * p_ahead *
                 std::pow(0.95, double(h));
      hold_best = std::max(hold_best, v);
    }
    if (hold_best > double(best_depth)) return false;  // keep holding
  }

  do_release(slot, best_count, best_depth, out);
  return true;
}

Adversary::WakeResult Adversary::wake(std::int32_t slot) {
  WakeResult out;
  if (cfg_.adversary_strategy == AdversaryStrategy::none) return out;
  refresh_public_state(slot);

  if (!branch_.empty()) {
    // Sliding attack window: a fight over history older than 2w slots is
    // forfeit, so the branch is scrapped and the next anchor starts fresh.
    bool anchor_stale = anchor_slot_ < slot - 2 * cfg_.w;
    bool tip_dead = cfg_.variant != Variant::ideal &&
                    slot - store_.block(branch_.back()).slot > cfg_.w;
    if (anchor_stale || tip_dead) abandon(slot);
  }

  start_or_extend(slot);

  if (!branch_.empty()) {
    if (cfg_.adversary_strategy == AdversaryStrategy::heuristic ||
        budget_exhausted_)
      heuristic_release(slot, out);
    else
      exhaustive_release(slot, out);
  }
  return out;
}

void Adversary::note_reorg(std::int32_t slot, std::int32_t depth) {
  if (last_release_log_ == SIZE_MAX) return;
  if (slot > last_release_slot_ + cfg_.delta_slots() + 2) return;
  AttackLogEntry& e = log_[last_release_log_];
  e.achieved_depth = std::max(e.achieved_depth, depth);
}

}  // namespace areon
