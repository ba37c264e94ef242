#include "areon/protocol.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "areon/rng.hpp"

namespace areon {

double Eligibility::lambda() const {
  double s = 0;
  for (double t : threshold) s += t;
  return s;
}

double Eligibility::lambda_honest() const {
  double s = lambda();
  if (adversary != kNoValidator) s -= threshold[adversary];
  return s;
}

double phi(PhiFn fn, double f, double stake_share) {
  if (stake_share <= 0) return 0.0;
  if (fn == PhiFn::praos_style) return 1.0 - std::pow(1.0 - f, stake_share);
  double p = f * stake_share;
  return p < 1.0 ? p : 1.0;
}

Eligibility make_eligibility(const Config& cfg, std::uint64_t seed) {
  Eligibility e;
  e.f = cfg.f;
  e.phi_fn = cfg.phi_fn;
  e.seed = seed;

  std::uint32_t n = cfg.n_honest;
  bool with_adv = cfg.adversary_stake > 0;
  e.stake.resize(n + (with_adv ? 1 : 0), 0.0);

  double raw_sum = 0;
  std::vector<double> raw(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    double u = rng::uniform(seed, rng::kDomStake, v);
    raw[v] = rng::pareto(u, cfg.stake_pareto_shape);
    raw_sum += raw[v];
  }
  double honest_total = 1.0 - cfg.adversary_stake;
  for (std::uint32_t v = 0; v < n; ++v)
    e.stake[v] = raw[v] / raw_sum * honest_total;
  if (with_adv) {
    e.adversary = n;
    e.stake[n] = cfg.adversary_stake;
  }

  e.threshold.resize(e.stake.size());
  for (std::size_t v = 0; v < e.stake.size(); ++v)
    e.threshold[v] = phi(e.phi_fn, e.f, e.stake[v]);
  return e;
}

double draw_y(std::uint64_t seed, Vid v, std::int32_t slot) {
  return rng::uniform(seed, rng::kDomEligibility, v, std::uint64_t(slot));
}

bool eligible(const Eligibility& e, Vid v, std::int32_t slot) {
  if (v >= e.threshold.size()) return false;
  return draw_y(e.seed, v, slot) < e.threshold[v];
}

Payload sample_payload(const Config& cfg, std::uint64_t seed, Vid v,
                       std::int32_t slot) {
  // 64 shared keys keeps same-key collisions frequent enough to matter at
  // the configured conflict rates without making every block contested.
  static constexpr std::uint64_t kSharedKeys = 64;
  static constexpr std::uint64_t kPrivateBit = std::uint64_t(1) << 63;
  Payload p;
  p.is_empty = false;
  p.tx_id = rng::mix(seed, rng::kDomTx, v, std::uint64_t(slot));
  double u = rng::uniform(seed, rng::kDomPayloadKind, v, std::uint64_t(slot));
  if (u < cfg.p_conflict) {
    p.conflict_key =
        rng::mix(seed, rng::kDomPayloadKey, v, std::uint64_t(slot)) %
        kSharedKeys;
  } else {
    p.conflict_key = kPrivateBit | p.tx_id;
  }
  return p;
}

std::optional<BlockIdx> select_long_ref(const DagView& view,
                                        const std::vector<BlockIdx>& refs,
                                        std::int32_t t, std::int32_t w) {
  const DagStore& store = view.store();
  const auto& order = store.key_order();
  // Walk newest-first; everything at or above slot t-w is skipped, after that
  // the first present block not covered by the refs' ancestry wins.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    BlockIdx i = *it;
    if (store.block(i).slot >= t - w) continue;
    if (!view.contains(i)) continue;
    bool covered = false;
    for (BlockIdx r : refs)
      if (store.at(r).anc_full.test(i)) {
        covered = true;
        break;
      }
    if (!covered) return i;
  }
  return std::nullopt;
}

// Uses the store's same-key index, so cost scales with the number of blocks
// contending for this key, not with history size.
bool payload_conflicts_with_ancestry(const DagStore& store,
                                     const Payload& payload,
                                     const std::vector<BlockIdx>& ref_targets) {
  if (payload.is_empty) return false;
  const auto* same_key = store.payloads_with_key(payload.conflict_key);
  if (!same_key) return false;
  for (BlockIdx z : *same_key) {
    if (store.block(z).payload.tx_id == payload.tx_id) continue;
    for (BlockIdx r : ref_targets)
      if (store.at(r).anc_full.test(z)) return true;
  }
  return false;
}

namespace {

Block make_block(const Eligibility& e, Vid v, std::int32_t slot,
                 const DagStore& store, const std::vector<BlockIdx>& refs,
                 std::optional<BlockIdx> long_ref, Payload payload) {
  Block b;
  b.slot = slot;
  b.validator = v;
  b.y = draw_y(e.seed, v, slot);
  b.short_refs.reserve(refs.size());
  for (BlockIdx r : refs) b.short_refs.push_back(store.block(r).id);
  if (long_ref) b.long_ref = store.block(*long_ref).id;
  b.payload = payload;
  b.auth_valid = true;
  b.id = compute_block_id(b);
  return b;
}

}  // namespace

CreationResult create_block_ideal(const DagView& view, const Config& cfg,
                                  const Eligibility& e, Vid v,
                                  std::int32_t slot,
                                  const std::vector<BlockIdx>& refs) {
  assert(!refs.empty());
  Payload payload = sample_payload(cfg, e.seed, v, slot);
  CreationResult r;
  r.block =
      make_block(e, v, slot, view.store(), refs, std::nullopt, payload);
  return r;
}

CreationResult create_block_base(const DagView& view, const Config& cfg,
                                 const Eligibility& e, Vid v,
                                 std::int32_t slot,
                                 const std::vector<BlockIdx>& refs) {
  CreationResult r;
  std::optional<BlockIdx> lref = select_long_ref(view, refs, slot, cfg.w);
  assert(!refs.empty() || lref);

  Payload payload = sample_payload(cfg, e.seed, v, slot);
  std::vector<BlockIdx> ancestry = refs;
  if (lref) ancestry.push_back(*lref);
  if (payload_conflicts_with_ancestry(view.store(), payload, ancestry)) {
    payload = Payload{};
    r.payload_dropped = true;
  }
  r.block = make_block(e, v, slot, view.store(), refs, lref, payload);
  return r;
}

const char* to_string(ReceptionError e) {
  switch (e) {
    case ReceptionError::auth_invalid: return "auth_invalid";
    case ReceptionError::above_threshold: return "above_threshold";
    case ReceptionError::non_positive_ref_distance:
      return "non_positive_ref_distance";
    case ReceptionError::too_many_long_refs: return "too_many_long_refs";
    case ReceptionError::cycle_detected: return "cycle_detected";
    case ReceptionError::refs_not_antichain: return "refs_not_antichain";
    case ReceptionError::no_references: return "no_references";
    case ReceptionError::payload_conflict: return "payload_conflict";
  }
  return "?";
}

const char* to_string(ReceiveStatus s) {
  switch (s) {
    case ReceiveStatus::inserted: return "inserted";
    case ReceiveStatus::duplicate: return "duplicate";
    case ReceiveStatus::deferred: return "deferred";
  }
  return "?";
}

namespace {

bool parents_present(const DagStore& store, const DagView& view,
                     const Block& b) {
  for (BlockId r : b.short_refs) {
    auto t = store.find(r);
    if (!t || !view.contains(*t)) return false;
  }
  if (b.long_ref) {
    auto t = store.find(*b.long_ref);
    if (!t || !view.contains(*t)) return false;
  }
  return true;
}

Expected<ReceiveStatus, ReceptionError> validate_and_insert(
    Variant variant, DagStore& store, DagView& view, const Eligibility& e,
    std::int32_t w, const Block& b) {
  if (!b.auth_valid) return ReceptionError::auth_invalid;
  if (b.validator >= e.threshold.size())
    return ReceptionError::auth_invalid;
  if (b.y >= e.threshold[b.validator])
    return ReceptionError::above_threshold;

  bool base = variant == Variant::base;
  for (BlockId r : b.short_refs) {
    if (r == b.id) return ReceptionError::cycle_detected;
    if (!base) continue;
    std::int32_t rs = store.block(*store.find(r)).slot;
    std::int32_t dist = b.slot - rs;
    if (dist < 1) return ReceptionError::non_positive_ref_distance;
    if (dist > w) return ReceptionError::too_many_long_refs;
  }
  if (b.long_ref) {
    if (*b.long_ref == b.id) return ReceptionError::cycle_detected;
    if (base) {
      std::int32_t rs = store.block(*store.find(*b.long_ref)).slot;
      std::int32_t dist = b.slot - rs;
      if (dist < 1) return ReceptionError::non_positive_ref_distance;
      if (dist <= w) return ReceptionError::too_many_long_refs;
    }
  }

  if (base) {
    if (b.short_refs.empty() && !b.long_ref)
      return ReceptionError::no_references;

    std::vector<BlockIdx> targets;
    targets.reserve(b.short_refs.size());
    for (BlockId r : b.short_refs) targets.push_back(*store.find(r));
    for (std::size_t i = 0; i + 1 < targets.size(); ++i)
      for (std::size_t j = i + 1; j < targets.size(); ++j) {
        if (targets[i] == targets[j] ||
            store.at(targets[i]).anc_short.test(targets[j]) ||
            store.at(targets[j]).anc_short.test(targets[i]))
          return ReceptionError::refs_not_antichain;
      }

    if (b.long_ref) targets.push_back(*store.find(*b.long_ref));
    if (payload_conflicts_with_ancestry(store, b.payload, targets))
      return ReceptionError::payload_conflict;
  }

  BlockIdx idx;
  if (auto existing = store.find(b.id)) {
    idx = *existing;
  } else {
    auto ins = store.insert(b);
    assert(ins.has_value());
    idx = ins.value();
  }
  view.add(idx);
  return ReceiveStatus::inserted;
}

}  // namespace

Expected<ReceiveStatus, ReceptionError> receive_block(
    Variant variant, DagStore& store, DagView& view, Mailbox& mb,
    const Eligibility& e, std::int32_t w, const Block& b) {
  if (auto idx = store.find(b.id); idx && view.contains(*idx))
    return ReceiveStatus::duplicate;
  if (!parents_present(store, view, b)) {
    mb.pending.push_back(b);
    return ReceiveStatus::deferred;
  }
  return validate_and_insert(variant, store, view, e, w, b);
}

int drain_mailbox(Variant variant, DagStore& store, DagView& view, Mailbox& mb,
                  const Eligibility& e, std::int32_t w) {
  int inserted = 0;
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (std::size_t i = 0; i < mb.pending.size();) {
      const Block& b = mb.pending[i];
      auto idx = store.find(b.id);
      if (idx && view.contains(*idx)) {
        mb.pending.erase(mb.pending.begin() + i);
        continue;
      }
      if (!parents_present(store, view, b)) {
        ++i;
        continue;
      }
      Block taken = std::move(mb.pending[i]);
      mb.pending.erase(mb.pending.begin() + i);
      auto res = validate_and_insert(variant, store, view, e, w, taken);
      if (res && res.value() == ReceiveStatus::inserted) {
        ++inserted;
        progressed = true;
        i = 0;  // earlier arrivals may have been waiting on this block
      }
    }
  }
  return inserted;
}

}  // namespace areon
