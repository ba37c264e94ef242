#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "areon/dag.hpp"
#include "areon/expected.hpp"

namespace areon {

enum class Variant { ideal, base, praos };
enum class PhiFn { praos_style, linear };
enum class DelayModel { fixed_bound, exp_capped };
enum class AdversaryStrategy { none, heuristic, exhaustive };

struct Config {
  Variant variant = Variant::base;
  std::uint32_t n_honest = 1000;
  double adversary_stake = 0.30;
  double stake_pareto_shape = 1.16;
  double f = 0.25;
  PhiFn phi_fn = PhiFn::praos_style;
  std::int32_t w = 30;
  double slot_duration = 1.0;
  DelayModel delay_model = DelayModel::exp_capped;
  double delay_mean = 7.5;
  double delay_cap = 60.0;
  std::int32_t horizon_slots = 500;
  std::uint64_t seed = 1;
  AdversaryStrategy adversary_strategy = AdversaryStrategy::heuristic;
  double p_conflict = 0.05;
  TieBreak tie_break = TieBreak::larger;
  std::vector<double> epsilon_targets = {1e-3, 1e-6};
  std::int32_t liveness_k = 3;
  std::uint64_t exhaustive_budget = 10000;
  bool track_ledgers = false;
  bool track_dcp = false;
  bool track_liveness = false;
  std::int32_t dcp_sample_every = 50;
  std::uint32_t dcp_sample_nodes = 4;
  double c1 = 1.8;
  double c2 = 2.7;

  // Delay horizon in slots: every delivery lands within this many slots.
  std::int32_t delta_slots() const;
};

// Effective window width at evaluation slot t: the ideal variant has no
// window, so it evaluates over every past slot.
inline std::int32_t effective_w(const Config& cfg, std::int32_t t) {
  return cfg.variant == Variant::ideal ? t : cfg.w;
}

struct ConfigError {
  int line = 0;
  std::string message;
};

// Plain `key = value` text, one setting per line, `#` starts a comment.
// Unknown keys, duplicate keys and malformed values are errors.
Expected<Config, ConfigError> parse_config(const std::string& text);

// Applies one key/value pair onto an existing config (sweep axes and
// sweep-cell overrides go through here).
Status<std::string> apply_setting(Config& cfg, const std::string& key,
                                  const std::string& value);

Status<std::string> validate(const Config& cfg);

// Canonical `key = value` rendering covering every field, stable across runs.
std::string serialize_config(const Config& cfg);

struct SweepSpec {
  Config base;
  // Axis order follows file order; each axis lists raw value strings.
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::uint32_t seeds = 1;
  std::uint32_t max_cells = 256;
};

// Sweep files take the same keys as run configs plus `axis.<key> = v1,v2,...`
// lines, a `seeds` count and a `max_cells` guard.
Expected<SweepSpec, ConfigError> parse_sweep(const std::string& text);

std::string to_string(Variant v);
std::string to_string(PhiFn v);
std::string to_string(DelayModel v);
std::string to_string(AdversaryStrategy v);
std::string to_string(TieBreak v);

}  // namespace areon
