#include "areon/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace areon {

std::int32_t Config::delta_slots() const {
  if (delay_cap <= 0) return 0;
  return std::int32_t(std::ceil(delay_cap / slot_duration));
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t c = s.find(',', pos);
    if (c == std::string::npos) {
      out.push_back(trim(s.substr(pos)));
      break;
    }
    out.push_back(trim(s.substr(pos, c - pos)));
    pos = c + 1;
  }
  return out;
}

bool parse_u64(const std::string& v, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && p == v.data() + v.size();
}

bool parse_i32(const std::string& v, std::int32_t& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && p == v.data() + v.size();
}

bool parse_u32(const std::string& v, std::uint32_t& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && p == v.data() + v.size();
}

bool parse_f64(const std::string& v, double& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && p == v.data() + v.size();
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true") {
    out = true;
    return true;
  }
  if (v == "false") {
    out = false;
    return true;
  }
  return false;
}

std::string f64_str(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::ideal: return "ideal";
    case Variant::base: return "base";
    case Variant::praos: return "praos";
  }
  return "?";
}
std::string to_string(PhiFn v) {
  return v == PhiFn::praos_style ? "praos_style" : "linear";
}
std::string to_string(DelayModel v) {
  return v == DelayModel::fixed_bound ? "fixed_bound" : "exp_capped";
}
std::string to_string(AdversaryStrategy v) {
  switch (v) {
    case AdversaryStrategy::none: return "none";
    case AdversaryStrategy::heuristic: return "heuristic";
    case AdversaryStrategy::exhaustive: return "exhaustive";
  }
  return "?";
}
std::string to_string(TieBreak v) {
  return v == TieBreak::larger ? "larger" : "smaller";
}

Status<std::string> apply_setting(Config& cfg, const std::string& key,
                                  const std::string& value) {
  auto bad = [&](const char* what) {
    return Status<std::string>(std::string("invalid value for ") + what +
                               ": '" + value + "'");
  };
  if (key == "variant") {
    if (value == "ideal") cfg.variant = Variant::ideal;
    else if (value == "base") cfg.variant = Variant::base;
    else if (value == "praos") cfg.variant = Variant::praos;
    else return bad("variant");
  } else if (key == "n_honest") {
    if (!parse_u32(value, cfg.n_honest)) return bad("n_honest");
  } else if (key == "adversary_stake") {
    if (!parse_f64(value, cfg.adversary_stake)) return bad("adversary_stake");
  } else if (key == "stake_pareto_shape") {
    if (!parse_f64(value, cfg.stake_pareto_shape))
      return bad("stake_pareto_shape");
  } else if (key == "f") {
    if (!parse_f64(value, cfg.f)) return bad("f");
  } else if (key == "phi_fn") {
    if (value == "praos_style") cfg.phi_fn = PhiFn::praos_style;
    else if (value == "linear") cfg.phi_fn = PhiFn::linear;
    else return bad("phi_fn");
  } else if (key == "w") {
    if (!parse_i32(value, cfg.w)) return bad("w");
  } else if (key == "slot_duration") {
    if (!parse_f64(value, cfg.slot_duration)) return bad("slot_duration");
  } else if (key == "delay_model") {
    if (value == "fixed_bound") cfg.delay_model = DelayModel::fixed_bound;
    else if (value == "exp_capped") cfg.delay_model = DelayModel::exp_capped;
    else return bad("delay_model");
  } else if (key == "delay_mean") {
    if (!parse_f64(value, cfg.delay_mean)) return bad("delay_mean");
  } else if (key == "delay_cap") {
    if (!parse_f64(value, cfg.delay_cap)) return bad("delay_cap");
  } else if (key == "horizon_slots") {
    if (!parse_i32(value, cfg.horizon_slots)) return bad("horizon_slots");
  } else if (key == "seed") {
    if (!parse_u64(value, cfg.seed)) return bad("seed");
  } else if (key == "adversary_strategy") {
    if (value == "none") cfg.adversary_strategy = AdversaryStrategy::none;
    else if (value == "heuristic")
      cfg.adversary_strategy = AdversaryStrategy::heuristic;
    else if (value == "exhaustive")
      cfg.adversary_strategy = AdversaryStrategy::exhaustive;
    else return bad("adversary_strategy");
  } else if (key == "p_conflict") {
    if (!parse_f64(value, cfg.p_conflict)) return bad("p_conflict");
  } else if (key == "tie_break") {
    if (value == "larger") cfg.tie_break = TieBreak::larger;
    else if (value == "smaller") cfg.tie_break = TieBreak::smaller;
    else return bad("tie_break");
  } else if (key == "epsilon_targets") {
    std::vector<double> eps;
    for (const auto& part : split_csv(value)) {
      double e;
      if (!parse_f64(part, e)) return bad("epsilon_targets");
      eps.push_back(e);
    }
    if (eps.empty()) return bad("epsilon_targets");
    cfg.epsilon_targets = std::move(eps);
  } else if (key == "liveness_k") {
    if (!parse_i32(value, cfg.liveness_k)) return bad("liveness_k");
  } else if (key == "exhaustive_budget") {
    if (!parse_u64(value, cfg.exhaustive_budget))
      return bad("exhaustive_budget");
  } else if (key == "track_ledgers") {
    if (!parse_bool(value, cfg.track_ledgers)) return bad("track_ledgers");
  } else if (key == "track_dcp") {
    if (!parse_bool(value, cfg.track_dcp)) return bad("track_dcp");
  } else if (key == "track_liveness") {
    if (!parse_bool(value, cfg.track_liveness)) return bad("track_liveness");
  } else if (key == "dcp_sample_every") {
    if (!parse_i32(value, cfg.dcp_sample_every)) return bad("dcp_sample_every");
  } else if (key == "dcp_sample_nodes") {
    if (!parse_u32(value, cfg.dcp_sample_nodes)) return bad("dcp_sample_nodes");
  } else if (key == "c1") {
    if (!parse_f64(value, cfg.c1)) return bad("c1");
  } else if (key == "c2") {
    if (!parse_f64(value, cfg.c2)) return bad("c2");
  } else {
    return Status<std::string>("unknown key '" + key + "'");
  }
  return Status<std::string>::ok();
}

Status<std::string> validate(const Config& cfg) {
  auto fail = [](std::string m) { return Status<std::string>(std::move(m)); };
  if (cfg.n_honest < 1) return fail("n_honest must be at least 1");
  if (cfg.adversary_stake < 0 || cfg.adversary_stake >= 1)
    return fail("adversary_stake must be in [0, 1)");
  if (cfg.stake_pareto_shape <= 0) return fail("stake_pareto_shape must be > 0");
  if (cfg.f <= 0 || cfg.f >= 1) return fail("f must be in (0, 1)");
  if (cfg.w < 1) return fail("w must be at least 1");
  if (cfg.slot_duration <= 0) return fail("slot_duration must be > 0");
  if (cfg.delay_mean < 0) return fail("delay_mean must be >= 0");
  if (cfg.delay_cap < 0) return fail("delay_cap must be >= 0");
  if (cfg.delay_model == DelayModel::exp_capped && cfg.delay_mean == 0 &&
      cfg.delay_cap > 0)
    return fail("exp_capped needs delay_mean > 0");
  if (cfg.horizon_slots < 1) return fail("horizon_slots must be at least 1");
  if (cfg.p_conflict < 0 || cfg.p_conflict > 1)
    return fail("p_conflict must be in [0, 1]");
  for (double e : cfg.epsilon_targets)
    if (e <= 0 || e > 1) return fail("epsilon targets must be in (0, 1]");
  if (cfg.liveness_k < 1) return fail("liveness_k must be at least 1");
  if (cfg.dcp_sample_every < 1) return fail("dcp_sample_every must be >= 1");
  if (cfg.dcp_sample_nodes < 1) return fail("dcp_sample_nodes must be >= 1");
  return Status<std::string>::ok();
}

namespace {

struct LineSetting {
  int line;
  std::string key, value;
};

Expected<std::vector<LineSetting>, ConfigError> tokenize(
    const std::string& text) {
  std::vector<LineSetting> out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      return ConfigError{lineno, "expected 'key = value'"};
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      return ConfigError{lineno, "expected 'key = value'"};
    out.push_back({lineno, key, value});
  }
  return out;
}

}  // namespace

Expected<Config, ConfigError> parse_config(const std::string& text) {
  auto toks = tokenize(text);
  if (!toks) return toks.error();
  Config cfg;
  std::set<std::string> seen;
  for (const auto& t : toks.value()) {
    if (!seen.insert(t.key).second)
      return ConfigError{t.line, "duplicate key '" + t.key + "'"};
    auto st = apply_setting(cfg, t.key, t.value);
    if (!st) return ConfigError{t.line, st.error()};
  }
  auto st = validate(cfg);
  if (!st) return ConfigError{0, st.error()};
  return cfg;
}

Expected<SweepSpec, ConfigError> parse_sweep(const std::string& text) {
  auto toks = tokenize(text);
  if (!toks) return toks.error();
  SweepSpec spec;
  std::set<std::string> seen;
  for (const auto& t : toks.value()) {
    if (!seen.insert(t.key).second)
      return ConfigError{t.line, "duplicate key '" + t.key + "'"};
    if (t.key.rfind("axis.", 0) == 0) {
      std::string axis_key = t.key.substr(5);
      std::vector<std::string> values = split_csv(t.value);
      if (values.empty())
        return ConfigError{t.line, "axis needs at least one value"};
      Config probe = spec.base;
      for (const auto& v : values) {
        auto st = apply_setting(probe, axis_key, v);
        if (!st) return ConfigError{t.line, st.error()};
      }
      spec.axes.emplace_back(axis_key, std::move(values));
    } else if (t.key == "seeds") {
      if (!parse_u32(t.value, spec.seeds) || spec.seeds < 1)
        return ConfigError{t.line, "seeds must be a positive integer"};
    } else if (t.key == "max_cells") {
      if (!parse_u32(t.value, spec.max_cells) || spec.max_cells < 1)
        return ConfigError{t.line, "max_cells must be a positive integer"};
    } else {
      auto st = apply_setting(spec.base, t.key, t.value);
      if (!st) return ConfigError{t.line, st.error()};
    }
  }
  auto st = validate(spec.base);
  if (!st) return ConfigError{0, st.error()};
  return spec;
}

std::string serialize_config(const Config& cfg) {
  std::ostringstream o;
  o << "variant = " << to_string(cfg.variant) << "\n";
  o << "n_honest = " << cfg.n_honest << "\n";
  o << "adversary_stake = " << f64_str(cfg.adversary_stake) << "\n";
  o << "stake_pareto_shape = " << f64_str(cfg.stake_pareto_shape) << "\n";
  o << "f = " << f64_str(cfg.f) << "\n";
  o << "phi_fn = " << to_string(cfg.phi_fn) << "\n";
  o << "w = " << cfg.w << "\n";
  o << "slot_duration = " << f64_str(cfg.slot_duration) << "\n";
  o << "delay_model = " << to_string(cfg.delay_model) << "\n";
  o << "delay_mean = " << f64_str(cfg.delay_mean) << "\n";
  o << "delay_cap = " << f64_str(cfg.delay_cap) << "\n";
  o << "horizon_slots = " << cfg.horizon_slots << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "adversary_strategy = " << to_string(cfg.adversary_strategy) << "\n";
  o << "p_conflict = " << f64_str(cfg.p_conflict) << "\n";
  o << "tie_break = " << to_string(cfg.tie_break) << "\n";
  o << "epsilon_targets = ";
  for (std::size_t i = 0; i < cfg.epsilon_targets.size(); ++i) {
    if (i) o << ",";
    o << f64_str(cfg.epsilon_targets[i]);
  }
  o << "\n";
  o << "liveness_k = " << cfg.liveness_k << "\n";
  o << "exhaustive_budget = " << cfg.exhaustive_budget << "\n";
  o << "track_ledgers = " << (cfg.track_ledgers ? "true" : "false") << "\n";
  o << "track_dcp = " << (cfg.track_dcp ? "true" : "false") << "\n";
  o << "track_liveness = " << (cfg.track_liveness ? "true" : "false") << "\n";
  o << "dcp_sample_every = " << cfg.dcp_sample_every << "\n";
  o << "dcp_sample_nodes = " << cfg.dcp_sample_nodes << "\n";
  o << "c1 = " << f64_str(cfg.c1) << "\n";
  o << "c2 = " << f64_str(cfg.c2) << "\n";
  return o.str();
}

}  // namespace areon
