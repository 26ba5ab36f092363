// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndg/ndg.h"

namespace {

struct ScenarioHandle {
  ndg_scenario* ptr = nullptr;
  ~ScenarioHandle() { ndg_scenario_free(ptr); }
};

int report(ndg_status st) {
  if (st != NDG_OK) std::fprintf(stderr, "ndg: %s\n", ndg_last_error());
  return static_cast<int>(st);
}

std::optional<std::vector<double>> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') return std::nullopt;
    out.push_back(v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

struct Grid {
  double lo = 0.0, hi = 1.0, step = 0.05;
};

std::optional<Grid> parse_grid(const std::string& text) {
  std::string t = text;
  for (auto& c : t)
    if (c == ':') c = ',';
  const auto v = parse_list(t);
  if (!v || v->size() != 3) return std::nullopt;
  return Grid{(*v)[0], (*v)[1], (*v)[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage network design game solver"};
  app.require_subcommand(1);

  unsigned threads = 1;
  std::string out_dir = ".";
  std::string log_level = "warn";
  bool timing = false;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "Directory for reports");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");
  app.add_flag("--timing", timing, "Record wall-clock time in manifest.json");

  std::string scenario;
  std::string network, demand, state;
  std::string betas_text;
  auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--scenario,--file", scenario, "Scenario file")->required();
    sub->add_option("--out", out_dir, "Directory for reports (same as --out-dir)");
  };

  auto* validate = app.add_subcommand("validate", "Check inputs and the convexity condition");
  validate->add_option("--scenario,--file", scenario, "Scenario file");
  validate->add_option("--network", network, "Network file");
  validate->add_option("--demand", demand, "Demand file");

  auto* solve_ne = app.add_subcommand("solve-ne", "Stage-1 Nash equilibrium");
  add_scenario(solve_ne);
  solve_ne->add_option("--beta", betas_text, "Comma-separated co-investment ratios");

  auto* co_invest = app.add_subcommand("co-invest", "Stage-1 NE followed by co-investment");
  add_scenario(co_invest);
  co_invest->add_option("--beta", betas_text, "Comma-separated co-investment ratios");

  std::string weights;
  std::string epsilon_text;
  auto* share = app.add_subcommand("share-payoff", "Full year with payoff sharing");
  add_scenario(share);
  share->add_option("--beta", betas_text, "Comma-separated co-investment ratios");
  share->add_option("--weights", weights, "Bargaining weights")
      ->check(CLI::IsMember({"symmetric", "contribution"}));
  share->add_option("--epsilon", epsilon_text, "Comma-separated sharing flags (0/1)");

  std::string grid_text = "0:1:0.05";
  std::string vary;
  double mgr_threshold = 0.0;
  auto* sweep = app.add_subcommand("sweep-cir", "Sweep the co-investment ratio");
  add_scenario(sweep);
  sweep->add_option("--grid", grid_text, "lo:hi:step");
  sweep->add_option("--vary", vary, "Vary only this operator's ratio");
  sweep->add_option("--mgr-threshold", mgr_threshold, "Ratio above which MGR is taken");

  auto* run = app.add_subcommand("run-scenario", "Multi-year scenario with baselines");
  add_scenario(run);

  double gap_tol = 1e-4;
  std::size_t max_iters = 20000;
  auto* ue = app.add_subcommand("ue-assign", "Multimodal user-equilibrium assignment");
  ue->add_option("--network", network, "Network file")->required();
  ue->add_option("--demand", demand, "Demand file")->required();
  ue->add_option("--state", state, "Network state file");
  ue->add_option("--out", out_dir, "Directory for reports (same as --out-dir)");
  ue->add_option("--gap", gap_tol, "Relative gap tolerance")->check(CLI::PositiveNumber);
  ue->add_option("--max-iters", max_iters, "Iteration limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(NDG_INPUT_ERROR);
  }

  if (int rc = report(ndg_set_log_level(log_level.c_str()))) return rc;
  if (int rc = report(ndg_set_threads(threads))) return rc;
  ndg_set_timing(timing ? 1 : 0);

  if (*validate) {
    if (scenario.empty() && network.empty()) {
      std::fprintf(stderr, "ndg: validate needs --scenario or --network\n");
      return NDG_INPUT_ERROR;
    }
    size_t errors = 0, warnings = 0;
    char* text = nullptr;
    const auto st = ndg_validate(scenario.empty() ? nullptr : scenario.c_str(),
                                 network.empty() ? nullptr : network.c_str(),
                                 demand.empty() ? nullptr : demand.c_str(), &errors, &warnings,
                                 &text);
    if (st != NDG_OK) return report(st);
    std::fputs(text, stdout);
    std::printf("%zu error(s), %zu warning(s)\n", errors, warnings);
    ndg_string_free(text);
    return errors == 0 ? 0 : NDG_INPUT_ERROR;
  }

  if (*ue) {
    return report(ndg_ue_assign(network.c_str(), demand.c_str(),
                                state.empty() ? nullptr : state.c_str(), gap_tol, max_iters,
                                out_dir.c_str()));
  }

  ScenarioHandle h;
  if (int rc = report(ndg_scenario_load(scenario.c_str(), &h.ptr))) return rc;
  size_t n_ops = 0;
  ndg_scenario_operator_count(h.ptr, &n_ops);

  std::optional<std::vector<double>> betas;
  if (!betas_text.empty()) {
    betas = parse_list(betas_text);
    if (!betas || betas->size() != n_ops) {
      std::fprintf(stderr, "ndg: --beta needs %zu comma-separated numbers\n", n_ops);
      return NDG_INPUT_ERROR;
    }
  }
  const double* bp = betas ? betas->data() : nullptr;
  const size_t bn = betas ? betas->size() : 0;

  if (*solve_ne) return report(ndg_solve_ne(h.ptr, bp, bn, out_dir.c_str()));
  if (*co_invest) return report(ndg_co_invest(h.ptr, bp, bn, out_dir.c_str()));
  if (*share) {
    std::vector<int> eps;
    if (!epsilon_text.empty()) {
      const auto e = parse_list(epsilon_text);
      if (!e || e->size() != n_ops) {
        std::fprintf(stderr, "ndg: --epsilon needs %zu comma-separated flags\n", n_ops);
        return NDG_INPUT_ERROR;
      }
      for (double v : *e) eps.push_back(static_cast<int>(v));
      for (std::size_t i = 0; i < eps.size(); ++i)
        if (static_cast<double>(eps[i]) != (*e)[i]) eps[i] = -1;  // rejected by the library
    }
    return report(ndg_share_payoff(h.ptr, bp, bn, weights.empty() ? nullptr : weights.c_str(),
                                   eps.empty() ? nullptr : eps.data(), out_dir.c_str()));
  }
  if (*sweep) {
    const auto g = parse_grid(grid_text);
    if (!g) {
      std::fprintf(stderr, "ndg: --grid must be lo:hi:step\n");
      return NDG_INPUT_ERROR;
    }
    return report(ndg_sweep_cir(h.ptr, g->lo, g->hi, g->step, vary.empty() ? nullptr : vary.c_str(),
                                mgr_threshold, out_dir.c_str()));
  }
  if (*run) return report(ndg_run_scenario(h.ptr, out_dir.c_str()));
  return NDG_INTERNAL_ERROR;
}
