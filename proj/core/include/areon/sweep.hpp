#pragma once

#include <string>
#include <utility>
#include <vector>

#include "areon/config.hpp"
#include "areon/expected.hpp"

namespace areon {

struct SweepCell {
  std::vector<std::pair<std::string, std::string>> overrides;
  Config cfg;
  std::string dir_name;
};

// Stable directory name for a cell: 16 hex digits hashed from the canonical
// override lines, so reruns and partial resumes land in the same place.
std::string cell_dir_name(
    const std::vector<std::pair<std::string, std::string>>& overrides);

// Cartesian product of the axes in file order, base config plus overrides,
// each cell validated. Fails on invalid combinations or too many cells.
Expected<std::vector<SweepCell>, std::string> expand_sweep(
    const SweepSpec& spec);

// Runs each cell over spec.seeds consecutive seeds and writes per-cell
// directories plus manifest.json under out_dir. A cell directory holding a
// COMPLETE marker is left untouched, which makes interrupted sweeps
// resumable. Returns the number of cells executed (skipped ones excluded).
Expected<int, std::string> run_sweep(const SweepSpec& spec,
                                     const std::string& out_dir);

struct Aggregate;

// Runs cfg over `seeds` consecutive seeds starting at cfg.seed and writes
// the export set into dir: config.txt, summary.json, histogram.csv,
// tips.csv (first seed only), runs.jsonl, then a COMPLETE marker. Output is
// byte-stable for identical inputs; nothing in it depends on wall time.
// The pooled statistics are copied into agg_out when given.
Expected<int, std::string> run_and_export(const Config& cfg,
                                          std::uint32_t seeds,
                                          const std::string& dir,
                                          Aggregate* agg_out = nullptr);

}  // namespace areon
