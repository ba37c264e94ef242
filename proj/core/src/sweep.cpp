#include "areon/sweep.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "areon/metrics.hpp"
#include "areon/rng.hpp"
#include "areon/sim.hpp"
#include "json.hpp"

namespace areon {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string cell_dir_name(
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::uint64_t h = 0x53574545ULL;
  for (const auto& [k, v] : overrides) {
    for (char c : k) h = rng::mix64(h ^ std::uint64_t(std::uint8_t(c)));
    h = rng::mix64(h ^ 0x3D);  // separates key from value
    for (char c : v) h = rng::mix64(h ^ std::uint64_t(std::uint8_t(c)));
    h = rng::mix64(h ^ 0x0A);
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

Expected<std::vector<SweepCell>, std::string> expand_sweep(
    const SweepSpec& spec) {
  using R = Expected<std::vector<SweepCell>, std::string>;
  std::size_t cells = 1;
  for (const auto& [key, values] : spec.axes) {
    if (values.empty()) return R::err("axis '" + key + "' has no values");
    cells *= values.size();
    if (cells > spec.max_cells)
      return R::err("sweep expands past max_cells = " +
                    std::to_string(spec.max_cells));
  }

  std::vector<SweepCell> out;
  out.reserve(cells);
  for (std::size_t n = 0; n < cells; ++n) {
    SweepCell cell;
    cell.cfg = spec.base;
    std::size_t rem = n;
    // First axis varies slowest, matching the file's reading order.
    std::size_t block = cells;
    for (const auto& [key, values] : spec.axes) {
      block /= values.size();
      std::size_t pick = rem / block;
      rem %= block;
      cell.overrides.push_back({key, values[pick]});
      auto st = apply_setting(cell.cfg, key, values[pick]);
      if (!st)
        return R::err("cell " + std::to_string(n) + ": " + st.error());
    }
    auto st = validate(cell.cfg);
    if (!st)
      return R::err("cell " + std::to_string(n) + ": " + st.error());
    cell.dir_name = cell_dir_name(cell.overrides);
    out.push_back(std::move(cell));
  }
  return R::ok(std::move(out));
}

namespace {

Status<std::string> write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) return Status<std::string>("cannot open " + p.string());
  f.write(bytes.data(), std::streamsize(bytes.size()));
  f.close();
  if (!f) return Status<std::string>("short write to " + p.string());
  return Status<std::string>();
}

}  // namespace

Expected<int, std::string> run_and_export(const Config& cfg,
                                          std::uint32_t seeds,
                                          const std::string& dir,
                                          Aggregate* agg_out) {
  using R = Expected<int, std::string>;
  if (seeds == 0) return R::err("seeds must be positive");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return R::err("cannot create " + dir + ": " + ec.message());

  std::vector<RunResult> runs;
  runs.reserve(seeds);
  for (std::uint32_t i = 0; i < seeds; ++i) {
    Config c = cfg;
    c.seed = cfg.seed + i;
    runs.push_back(run_simulation(c));
  }
  Aggregate agg = aggregate_runs(runs);
  if (agg_out) *agg_out = agg;

  fs::path base(dir);
  for (auto&& [name, bytes] :
       std::initializer_list<std::pair<const char*, std::string>>{
           {"config.txt", serialize_config(cfg)},
           {"summary.json", summary_json(cfg, agg)},
           {"histogram.csv", histogram_csv(agg)},
           {"tips.csv", tips_csv(runs.front().tips_rows)},
           {"runs.jsonl", runs_jsonl(runs)},
           {"COMPLETE", std::string()}}) {
    auto st = write_file(base / name, bytes);
    if (!st) return R::err(st.error());
  }
  return R::ok(int(seeds));
}

Expected<int, std::string> run_sweep(const SweepSpec& spec,
                                     const std::string& out_dir) {
  using R = Expected<int, std::string>;
  auto cells = expand_sweep(spec);
  if (!cells) return R::err(cells.error());

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return R::err("cannot create " + out_dir + ": " + ec.message());

  ordered_json manifest;
  manifest["seeds"] = spec.seeds;
  manifest["base"] = ordered_json::object();
  {
    // Same string-valued rendering the per-cell summaries use.
    std::string text = serialize_config(spec.base);
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string::npos) eol = text.size();
      std::string line = text.substr(pos, eol - pos);
      pos = eol + 1;
      std::size_t sep = line.find(" = ");
      if (sep != std::string::npos)
        manifest["base"][line.substr(0, sep)] = line.substr(sep + 3);
    }
  }
  ordered_json jcells = ordered_json::array();
  for (const SweepCell& cell : cells.value()) {
    ordered_json jc;
    jc["dir"] = cell.dir_name;
    ordered_json ov = ordered_json::object();
    for (const auto& [k, v] : cell.overrides) ov[k] = v;
    jc["overrides"] = ov;
    jcells.push_back(jc);
  }
  manifest["cells"] = jcells;
  auto st = write_file(fs::path(out_dir) / "manifest.json",
                       manifest.dump(2) + "\n");
  if (!st) return R::err(st.error());

  int executed = 0;
  for (const SweepCell& cell : cells.value()) {
    fs::path dir = fs::path(out_dir) / cell.dir_name;
    if (fs::exists(dir / "COMPLETE")) continue;
    auto r = run_and_export(cell.cfg, spec.seeds, dir.string());
    if (!r) return R::err("cell " + cell.dir_name + ": " + r.error());
    ++executed;
  }
  return R::ok(executed);
}

}  // namespace areon
