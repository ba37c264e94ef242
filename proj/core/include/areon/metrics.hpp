#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "areon/config.hpp"
#include "areon/expected.hpp"
#include "areon/sim.hpp"

namespace areon {

// Pooled statistics over the runs (one per seed) of a single configuration.
struct Aggregate {
  std::uint64_t runs = 0;
  std::uint64_t blocks_honest = 0;
  std::uint64_t blocks_adversary = 0;
  std::uint64_t payloads_dropped = 0;

  std::map<std::int32_t, std::uint64_t> depth_hist;      // every reorg event
  std::map<std::int32_t, std::uint64_t> max_depth_hist;  // one entry per run
  std::uint64_t reorg_events = 0;
  std::int32_t max_depth = 0;
  double mean_max_depth = 0.0;

  double lambda_ledger = 0.0;  // mean over runs
  double tips_mean = 0.0;
  double tips_p99 = 0.0;  // worst per-run p99
  std::uint32_t tips_max = 0;

  double dg_min = 1.0;
  double dg_rate = 0.0;
  double dq_mean = 1.0;
  double dcp_pass = 1.0;  // worst per-run pass fraction
  std::uint64_t dcp_checks = 0;

  std::uint64_t live_included = 0;
  std::uint64_t live_censored = 0;
  double live_mean_delay = 0.0;
  double live_p95_delay = 0.0;  // worst per-run p95

  std::uint32_t adv_branches = 0;
  std::uint32_t adv_releases = 0;
  double adv_mean_achieved = 0.0;  // mean over runs of per-run means
  std::int32_t adv_max_achieved = 0;
  std::uint64_t adv_budget_used = 0;
  bool adv_budget_exhausted = false;
};

Aggregate aggregate_runs(const std::vector<RunResult>& runs);

// P(per-run max reorg depth >= d), from the per-run maxima.
double preorg_at(const Aggregate& agg, std::int32_t d);

struct ExpFit {
  double gamma = 0.0;      // decay rate per depth unit
  double amplitude = 0.0;  // fitted frequency at depth 0
  double r2 = 0.0;
  int points = 0;
};

enum class FitError { insufficient_data, non_decaying_tail };
const char* to_string(FitError e);

// Least squares on (depth, ln frequency) over bins with at least min_count
// events. Needs two such bins and a negative slope.
Expected<ExpFit, FitError> fit_exponential(
    const std::map<std::int32_t, std::uint64_t>& hist,
    std::uint64_t min_count = 5);

// Depth at which the fitted tail drops below eps: ceil(ln(A/eps) / gamma),
// floored at zero.
std::int32_t settlement_depth(double amplitude, double gamma, double eps);

// Smallest d >= 1 with preorg_at(d) <= eps, or -1 when even the deepest
// observed depth stays above eps.
std::int32_t empirical_settlement(const Aggregate& agg, double eps);

// Rule-of-thumb confirmation depth from the window and a target failure
// probability: round(c1 * w + c2 * ln(1 / eps)).
std::int32_t k_calibration(std::int32_t w, double eps, double c1, double c2);

inline double settlement_time(std::int32_t d, double tau) { return d * tau; }

// Tip-load sanity bound: observed p99 tip count against what the birth rate
// and the delay horizon can explain.
struct TbEstimate {
  double bound = 0.0;
  double observed_p99 = 0.0;
  std::uint32_t observed_max = 0;
  bool within = false;
};
TbEstimate tb_estimator(const Config& cfg, const Aggregate& agg,
                        double c = 4.0);

// Deterministic export set for one configuration's batch of runs. All
// writers produce byte-stable output for identical inputs.
std::string summary_json(const Config& cfg, const Aggregate& agg);
std::string histogram_csv(const Aggregate& agg);
std::string tips_csv(const std::vector<TipsRow>& rows);
std::string runs_jsonl(const std::vector<RunResult>& runs);

// Side-by-side tail comparison. Rows where one side has no run at depth d
// report the resolvable lower bound on the ratio instead of a point value.
std::string render_compare(const std::string& label_a, const Aggregate& a,
                           const std::string& label_b, const Aggregate& b);

}  // namespace areon
