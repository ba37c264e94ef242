#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "areon/config.hpp"
#include "areon/dump.hpp"
#include "areon/metrics.hpp"
#include "areon/oracle.hpp"
#include "areon/sim.hpp"
#include "areon/sweep.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;   // bad config, flags or input files
constexpr int kExitRuntime = 3;  // simulation or filesystem failure

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

std::string hex_id(areon::BlockId id) {
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[id & 0xF];
    id >>= 4;
  }
  return std::string(buf, 16);
}

bool parse_hex_id(const std::string& s, areon::BlockId& out) {
  if (s.empty() || s.size() > 16) return false;
  out = 0;
  for (char c : s) {
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      v = c - 'A' + 10;
    else
      return false;
    out = (out << 4) | areon::BlockId(v);
  }
  return true;
}

int load_config(const std::string& path, const std::vector<std::string>& sets,
                areon::Config& cfg) {
  if (!path.empty()) {
    std::string text;
    if (!read_file(path, text)) {
      std::cerr << "error: cannot read config " << path << "\n";
      return kExitConfig;
    }
    auto parsed = areon::parse_config(text);
    if (!parsed) {
      std::cerr << "error: " << path << ":" << parsed.error().line << ": "
                << parsed.error().message << "\n";
      return kExitConfig;
    }
    cfg = parsed.value();
  }
  for (const std::string& s : sets) {
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set needs key=value, got '" << s << "'\n";
      return kExitConfig;
    }
    auto st = areon::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    if (!st) {
      std::cerr << "error: --set " << s << ": " << st.error() << "\n";
      return kExitConfig;
    }
  }
  auto st = areon::validate(cfg);
  if (!st) {
    std::cerr << "error: " << st.error() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& sets, const std::string& out_dir,
            std::uint32_t seeds) {
  areon::Config cfg;
  int rc = load_config(config_path, sets, cfg);
  if (rc != kExitOk) return rc;
  areon::Aggregate agg;
  auto r = areon::run_and_export(cfg, seeds, out_dir, &agg);
  if (!r) {
    std::cerr << "error: " << r.error() << "\n";
    return kExitRuntime;
  }
  std::cout << "runs=" << agg.runs << " reorg_events=" << agg.reorg_events
            << " max_depth=" << agg.max_depth
            << " lambda_ledger=" << agg.lambda_ledger << " out=" << out_dir
            << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir) {
  std::string text;
  if (!read_file(spec_path, text)) {
    std::cerr << "error: cannot read sweep spec " << spec_path << "\n";
    return kExitConfig;
  }
  auto spec = areon::parse_sweep(text);
  if (!spec) {
    std::cerr << "error: " << spec_path << ":" << spec.error().line << ": "
              << spec.error().message << "\n";
    return kExitConfig;
  }
  auto r = areon::run_sweep(spec.value(), out_dir);
  if (!r) {
    std::cerr << "error: " << r.error() << "\n";
    return kExitRuntime;
  }
  std::cout << "cells_executed=" << r.value() << " out=" << out_dir << "\n";
  return kExitOk;
}

int load_aggregate(const std::string& dir, areon::Aggregate& agg) {
  std::string text;
  if (!read_file(dir + "/runs.jsonl", text)) {
    std::cerr << "error: cannot read " << dir << "/runs.jsonl\n";
    return kExitConfig;
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("max_depth")) {
      std::cerr << "error: bad runs.jsonl line in " << dir << "\n";
      return kExitConfig;
    }
    std::int32_t md = j["max_depth"].get<std::int32_t>();
    ++agg.runs;
    ++agg.max_depth_hist[md];
    agg.max_depth = std::max(agg.max_depth, md);
  }
  if (agg.runs == 0) {
    std::cerr << "error: no runs in " << dir << "/runs.jsonl\n";
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b,
                const std::string& label_a, const std::string& label_b) {
  areon::Aggregate a, b;
  int rc = load_aggregate(dir_a, a);
  if (rc != kExitOk) return rc;
  rc = load_aggregate(dir_b, b);
  if (rc != kExitOk) return rc;
  std::cout << areon::render_compare(label_a, a, label_b, b);
  return kExitOk;
}

int cmd_oracle(const std::string& dump_path, const std::string& op,
               std::int32_t t, std::int32_t w, const std::string& a_hex,
               const std::string& b_hex, const std::string& tie_s) {
  std::string text;
  if (!read_file(dump_path, text)) {
    std::cerr << "error: cannot read dump " << dump_path << "\n";
    return kExitConfig;
  }
  auto parsed = areon::parse_dag(text);
  if (!parsed) {
    std::cerr << "error: line " << parsed.error().line << ": "
              << parsed.error().message << "\n";
    return kExitConfig;
  }
  const areon::DagStore& store = *parsed.value().store;
  const areon::DagView& view = parsed.value().view;
  areon::TieBreak tie =
      tie_s == "smaller" ? areon::TieBreak::smaller : areon::TieBreak::larger;

  auto need = [&](const std::string& hex, areon::BlockIdx& idx) {
    areon::BlockId id;
    if (!parse_hex_id(hex, id)) {
      std::cerr << "error: bad block id '" << hex << "'\n";
      return false;
    }
    auto found = store.find(id);
    if (!found) {
      std::cerr << "error: block " << hex << " not in dump\n";
      return false;
    }
    idx = *found;
    return true;
  };
  auto print_ids = [&](const std::vector<areon::BlockIdx>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) std::cout << ' ';
      std::cout << hex_id(store.block(xs[i]).id);
    }
    std::cout << '\n';
  };

  if (op == "tips") {
    print_ids(areon::oracle::tips(store, view, t, w));
  } else if (op == "frontier") {
    print_ids(areon::oracle::preferred_frontier(store, view, t, w, tie));
  } else if (op == "max-antichain") {
    print_ids(areon::oracle::max_antichain(store, view, t, w));
  } else if (op == "chain-cover") {
    std::cout << areon::oracle::min_chain_cover(store, view, t, w) << '\n';
  } else if (op == "linearize") {
    auto frontier = areon::oracle::preferred_frontier(store, view, t, w, tie);
    print_ids(areon::oracle::linearize(store, view, frontier));
  } else if (op == "wref") {
    areon::BlockIdx a;
    if (!need(a_hex, a)) return kExitConfig;
    std::cout << areon::oracle::wref(store, a, w) << '\n';
  } else if (op == "cca") {
    areon::BlockIdx a, b;
    if (!need(a_hex, a) || !need(b_hex, b)) return kExitConfig;
    auto c = areon::oracle::cca(store, view, a, b);
    std::cout << (c ? hex_id(store.block(*c).id) : std::string("-")) << '\n';
  } else if (op == "subdag-weight") {
    areon::BlockIdx a, b;
    if (!need(a_hex, a) || !need(b_hex, b)) return kExitConfig;
    std::cout << areon::oracle::subdag_weight(store, view, a, b, w) << '\n';
  } else if (op == "gap") {
    areon::BlockIdx a, b;
    if (!need(a_hex, a) || !need(b_hex, b)) return kExitConfig;
    std::cout << areon::oracle::windowed_gap(store, view, a, b, w) << '\n';
  } else if (op == "ctr") {
    areon::BlockIdx a, b;
    if (!need(a_hex, a) || !need(b_hex, b)) return kExitConfig;
    std::cout << hex_id(
                     store.block(areon::oracle::ctr(store, view, a, b, w, tie))
                         .id)
              << '\n';
  } else {
    std::cerr << "error: unknown op '" << op << "'\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic multi-proposer DAG consensus simulator"};
  app.require_subcommand(1);

  std::string run_config, run_out = "out";
  std::uint32_t run_seeds = 1;
  std::vector<std::string> run_sets;
  CLI::App* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("--config", run_config, "config file, key = value lines");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--seeds", run_seeds, "number of consecutive seeds")
      ->check(CLI::PositiveNumber);
  run->add_option("--set", run_sets, "override a config key, key=value");

  std::string sweep_spec, sweep_out = "sweep-out";
  CLI::App* sweep = app.add_subcommand("sweep", "run a config grid");
  sweep->add_option("--spec", sweep_spec, "sweep spec file")->required();
  sweep->add_option("--out", sweep_out, "output directory");

  std::string cmp_a, cmp_b, lbl_a = "a", lbl_b = "b";
  CLI::App* cmp =
      app.add_subcommand("compare", "tail comparison of two run outputs");
  cmp->add_option("--a", cmp_a, "first output directory")->required();
  cmp->add_option("--b", cmp_b, "second output directory")->required();
  cmp->add_option("--label-a", lbl_a, "name for the first column");
  cmp->add_option("--label-b", lbl_b, "name for the second column");

  std::string o_dump, o_op, o_a, o_b, o_tie = "larger";
  std::int32_t o_t = 0, o_w = 30;
  CLI::App* orc = app.add_subcommand(
      "oracle", "reference computations on a DAG dump file");
  orc->add_option("--dump", o_dump, "dump file")->required();
  orc->add_option("--op", o_op,
                  "tips|frontier|max-antichain|chain-cover|linearize|wref|"
                  "cca|subdag-weight|gap|ctr")
      ->required();
  orc->add_option("--t", o_t, "evaluation slot")->required();
  orc->add_option("--w", o_w, "window width");
  orc->add_option("--block-a", o_a, "first block id, hex");
  orc->add_option("--block-b", o_b, "second block id, hex");
  orc->add_option("--tie", o_tie, "larger|smaller");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) return cmd_run(run_config, run_sets, run_out, run_seeds);
  if (sweep->parsed()) return cmd_sweep(sweep_spec, sweep_out);
  if (cmp->parsed()) return cmd_compare(cmp_a, cmp_b, lbl_a, lbl_b);
  if (orc->parsed()) return cmd_oracle(o_dump, o_op, o_t, o_w, o_a, o_b, o_tie);
  return kExitConfig;
}
