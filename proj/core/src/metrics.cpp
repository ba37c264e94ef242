#include "areon/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>

#include "areon/protocol.hpp"
#include "json.hpp"

namespace areon {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  assert(ec == std::errc());
  return std::string(buf, p);
}

}  // namespace

Aggregate aggregate_runs(const std::vector<RunResult>& runs) {
  Aggregate a;
  a.runs = runs.size();
  if (runs.empty()) return a;

  double sum_max = 0, sum_lambda = 0, sum_tips_mean = 0, sum_dq = 0;
  double sum_dg_rate = 0;
  double live_delay_weighted = 0;
  double achieved_sum = 0;
  std::uint64_t achieved_rel = 0;

  for (const RunResult& r : runs) {
    a.blocks_honest += r.blocks_honest;
    a.blocks_adversary += r.blocks_adversary;
    a.payloads_dropped += r.payloads_dropped;
    for (auto [d, c] : r.depth_hist) {
      a.depth_hist[d] += c;
      a.reorg_events += c;
    }
    ++a.max_depth_hist[r.max_depth];
    a.max_depth = std::max(a.max_depth, r.max_depth);
    sum_max += r.max_depth;

    sum_lambda += r.lambda_ledger;
    sum_tips_mean += r.tips_mean;
    a.tips_p99 = std::max(a.tips_p99, r.tips_p99);
    a.tips_max = std::max(a.tips_max, r.tips_max);

    a.dg_min = std::min(a.dg_min, r.dg_min_fraction);
    sum_dg_rate += r.dg_rate_per_slot;
    sum_dq += r.dq_fraction;
    a.dcp_pass = std::min(a.dcp_pass, r.dcp_pass_fraction);
    a.dcp_checks += r.dcp_checks;

    a.live_included += r.liveness.included;
    a.live_censored += r.liveness.censored;
    live_delay_weighted += r.liveness.mean_delay * double(r.liveness.included);
    a.live_p95_delay = std::max(a.live_p95_delay, r.liveness.p95_delay);

    a.adv_branches += r.adv_branches;
    a.adv_releases += r.adv_releases;
    achieved_sum += r.adv_mean_achieved * double(r.adv_releases);
    achieved_rel += r.adv_releases;
    a.adv_max_achieved = std::max(a.adv_max_achieved, r.adv_max_achieved);
    a.adv_budget_used += r.adv_budget_used;
    a.adv_budget_exhausted = a.adv_budget_exhausted || r.adv_budget_exhausted;
  }

  double n = double(runs.size());
  a.mean_max_depth = sum_max / n;
  a.lambda_ledger = sum_lambda / n;
  a.tips_mean = sum_tips_mean / n;
  a.dg_rate = sum_dg_rate / n;
  a.dq_mean = sum_dq / n;
  if (a.live_included > 0)
    a.live_mean_delay = live_delay_weighted / double(a.live_included);
  if (achieved_rel > 0) a.adv_mean_achieved = achieved_sum / double(achieved_rel);
  return a;
}

double preorg_at(const Aggregate& agg, std::int32_t d) {
  if (agg.runs == 0) return 0.0;
  std::uint64_t hits = 0;
  for (auto [m, c] : agg.max_depth_hist)
    if (m >= d) hits += c;
  return double(hits) / double(agg.runs);
}

const char* to_string(FitError e) {
  switch (e) {
    case FitError::insufficient_data: return "insufficient_data";
    case FitError::non_decaying_tail: return "non_decaying_tail";
  }
  return "?";
}

Expected<ExpFit, FitError> fit_exponential(
    const std::map<std::int32_t, std::uint64_t>& hist,
    std::uint64_t min_count) {
  std::uint64_t total = 0;
  for (auto [d, c] : hist) total += c;
  std::vector<std::pair<double, double>> pts;  // (depth, ln freq)
  for (auto [d, c] : hist) {
    if (c < min_count || c == 0) continue;
    pts.push_back({double(d), std::log(double(c) / double(total))});
  }
  if (pts.size() < 2)
    return Expected<ExpFit, FitError>::err(FitError::insufficient_data);

  double sx = 0, sy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
  }
  double mx = sx / double(pts.size()), my = sy / double(pts.size());
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  assert(sxx > 0);  // depths in a map are distinct
  double slope = sxy / sxx;
  if (slope >= 0)
    return Expected<ExpFit, FitError>::err(FitError::non_decaying_tail);

  double intercept = my - slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (auto [x, y] : pts) {
    double e = y - (intercept + slope * x);
    ss_res += e * e;
    ss_tot += (y - my) * (y - my);
  }
  ExpFit fit;
  fit.gamma = -slope;
  fit.amplitude = std::exp(intercept);
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points = int(pts.size());
  return Expected<ExpFit, FitError>::ok(fit);
}

std::int32_t settlement_depth(double amplitude, double gamma, double eps) {
  assert(gamma > 0 && eps > 0);
  if (amplitude <= eps) return 0;
  double d = std::ceil(std::log(amplitude / eps) / gamma);
  return d < 0 ? 0 : std::int32_t(d);
}

std::int32_t empirical_settlement(const Aggregate& agg, double eps) {
  for (std::int32_t d = 1; d <= agg.max_depth + 1; ++d)
    if (preorg_at(agg, d) <= eps) return d;
  return -1;
}

std::int32_t k_calibration(std::int32_t w, double eps, double c1, double c2) {
  assert(eps > 0);
  return std::int32_t(std::llround(c1 * double(w) + c2 * std::log(1.0 / eps)));
}

TbEstimate tb_estimator(const Config& cfg, const Aggregate& agg, double c) {
  Eligibility e = make_eligibility(cfg, cfg.seed);
  double horizon = std::max(std::int32_t(1), cfg.delta_slots());
  if (cfg.variant == Variant::ideal && cfg.delay_cap == 0.0) horizon = 1;
  TbEstimate tb;
  tb.bound = c * (1.0 + e.lambda() * horizon);
  tb.observed_p99 = agg.tips_p99;
  tb.observed_max = agg.tips_max;
  tb.within = tb.observed_p99 <= tb.bound;
  return tb;
}

namespace {

ordered_json config_section(const Config& cfg) {
  // Canonical key = value lines, re-emitted as a string-valued object so the
  // rendering matches the config serializer byte for byte.
  ordered_json obj = ordered_json::object();
  std::string text = serialize_config(cfg);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    std::size_t sep = line.find(" = ");
    if (sep == std::string::npos) continue;
    obj[line.substr(0, sep)] = line.substr(sep + 3);
  }
  return obj;
}

ordered_json hist_section(const std::map<std::int32_t, std::uint64_t>& hist) {
  ordered_json obj = ordered_json::object();
  for (auto [d, c] : hist) obj[std::to_string(d)] = c;
  return obj;
}

}  // namespace

std::string summary_json(const Config& cfg, const Aggregate& agg) {
  ordered_json j;
  j["config"] = config_section(cfg);
  j["runs"] = agg.runs;

  ordered_json blocks;
  blocks["honest"] = agg.blocks_honest;
  blocks["adversary"] = agg.blocks_adversary;
  blocks["payloads_dropped"] = agg.payloads_dropped;
  j["blocks"] = blocks;

  ordered_json reorg;
  reorg["events"] = agg.reorg_events;
  reorg["max_depth"] = agg.max_depth;
  reorg["mean_max_depth"] = agg.mean_max_depth;
  reorg["depth_hist"] = hist_section(agg.depth_hist);
  reorg["max_depth_hist"] = hist_section(agg.max_depth_hist);
  ordered_json phat = ordered_json::object();
  for (std::int32_t d = 1; d <= agg.max_depth; ++d)
    phat[std::to_string(d)] = preorg_at(agg, d);
  reorg["phat"] = phat;
  j["reorg"] = reorg;

  auto fit = fit_exponential(agg.depth_hist);
  ordered_json jfit;
  if (fit) {
    jfit["gamma"] = fit.value().gamma;
    jfit["amplitude"] = fit.value().amplitude;
    jfit["r2"] = fit.value().r2;
    jfit["points"] = fit.value().points;
  } else {
    jfit["error"] = to_string(fit.error());
  }
  j["fit"] = jfit;

  ordered_json settle = ordered_json::array();
  for (double eps : cfg.epsilon_targets) {
    ordered_json s;
    s["epsilon"] = eps;
    s["empirical"] = empirical_settlement(agg, eps);
    std::int32_t fitted = -1;
    if (fit && fit.value().gamma > 0)
      fitted = settlement_depth(fit.value().amplitude, fit.value().gamma, eps);
    s["fitted"] = fitted;
    s["k_calibration"] = k_calibration(cfg.w, eps, cfg.c1, cfg.c2);
    s["time_fitted"] =
        fitted >= 0 ? settlement_time(fitted, cfg.slot_duration) : -1.0;
    settle.push_back(s);
  }
  j["settlement"] = settle;

  j["lambda_ledger"] = agg.lambda_ledger;

  TbEstimate tb = tb_estimator(cfg, agg);
  ordered_json tips;
  tips["mean"] = agg.tips_mean;
  tips["p99"] = agg.tips_p99;
  tips["max"] = agg.tips_max;
  tips["bound"] = tb.bound;
  tips["within_bound"] = tb.within;
  j["tips"] = tips;

  ordered_json disp;
  disp["dg_min"] = agg.dg_min;
  disp["dg_rate"] = agg.dg_rate;
  disp["dq"] = agg.dq_mean;
  j["dispersion"] = disp;

  if (cfg.track_dcp) {
    ordered_json dcp;
    dcp["checks"] = agg.dcp_checks;
    dcp["pass_fraction"] = agg.dcp_pass;
    j["dcp"] = dcp;
  }
  if (cfg.track_liveness) {
    ordered_json live;
    live["k"] = cfg.liveness_k;
    live["included"] = agg.live_included;
    live["censored"] = agg.live_censored;
    live["mean_delay"] = agg.live_mean_delay;
    live["p95_delay"] = agg.live_p95_delay;
    j["liveness"] = live;
  }
  if (cfg.adversary_strategy != AdversaryStrategy::none &&
      cfg.adversary_stake > 0) {
    ordered_json adv;
    adv["strategy"] = to_string(cfg.adversary_strategy);
    adv["branches"] = agg.adv_branches;
    adv["releases"] = agg.adv_releases;
    adv["mean_achieved"] = agg.adv_mean_achieved;
    adv["max_achieved"] = agg.adv_max_achieved;
    adv["budget_used"] = agg.adv_budget_used;
    adv["budget_exhausted"] = agg.adv_budget_exhausted;
    j["adversary"] = adv;
  }
  return j.dump(2) + "\n";
}

std::string histogram_csv(const Aggregate& agg) {
  std::string out = "depth,count,freq,phat\n";
  std::uint64_t total = 0;
  for (auto [d, c] : agg.depth_hist) total += c;
  std::int32_t top = agg.max_depth;
  if (!agg.depth_hist.empty())
    top = std::max(top, agg.depth_hist.rbegin()->first);
  for (std::int32_t d = 1; d <= top; ++d) {
    auto it = agg.depth_hist.find(d);
    std::uint64_t c = it == agg.depth_hist.end() ? 0 : it->second;
    double freq = total > 0 ? double(c) / double(total) : 0.0;
    out += std::to_string(d);
    out += ',';
    out += std::to_string(c);
    out += ',';
    out += fmt_double(freq);
    out += ',';
    out += fmt_double(preorg_at(agg, d));
    out += '\n';
  }
  return out;
}

std::string tips_csv(const std::vector<TipsRow>& rows) {
  std::string out = "slot,node,tips\n";
  for (const TipsRow& r : rows) {
    out += std::to_string(r.slot);
    out += ',';
    out += std::to_string(r.node);
    out += ',';
    out += std::to_string(r.tips);
    out += '\n';
  }
  return out;
}

std::string runs_jsonl(const std::vector<RunResult>& runs) {
  std::string out;
  for (const RunResult& r : runs) {
    ordered_json j;
    j["seed"] = r.seed;
    j["max_depth"] = r.max_depth;
    j["reorg_events"] = r.reorg_events.size();
    j["blocks_honest"] = r.blocks_honest;
    j["blocks_adversary"] = r.blocks_adversary;
    j["lambda_ledger"] = r.lambda_ledger;
    j["ledger_len"] = r.final_ledger.size();
    j["dg_min"] = r.dg_min_fraction;
    j["dq"] = r.dq_fraction;
    j["adv_releases"] = r.adv_releases;
    j["adv_mean_achieved"] = r.adv_mean_achieved;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string render_compare(const std::string& label_a, const Aggregate& a,
                           const std::string& label_b, const Aggregate& b) {
  std::string out = "depth";
  out += "\tphat_" + label_a;
  out += "\tphat_" + label_b;
  out += "\tratio_" + label_a + "_over_" + label_b;
  out += '\n';
  std::int32_t top = std::max(a.max_depth, b.max_depth);
  for (std::int32_t d = 1; d <= top; ++d) {
    double pa = preorg_at(a, d);
    double pb = preorg_at(b, d);
    out += std::to_string(d);
    out += '\t';
    out += fmt_double(pa);
    out += '\t';
    out += fmt_double(pb);
    out += '\t';
    if (pa > 0 && pb > 0) {
      out += fmt_double(pa / pb);
    } else if (pa > 0 && pb == 0) {
      // b never reached depth d, so its phat resolves to below 1/runs.
      out += ">=";
      out += fmt_double(pa * double(b.runs));
    } else if (pa == 0 && pb > 0) {
      out += "0";
    } else {
      out += "-";
    }
    out += '\n';
  }
  return out;
}

}  // namespace areon
