#include "ndg/ndg.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <string>

#include <spdlog/spdlog.h>

#include "ndg/cooperation.hpp"
#include "ndg/errors.hpp"
#include "ndg/io.hpp"
#include "ndg/scenario.hpp"
#include "ndg/ue.hpp"

struct ndg_scenario {
  ndg::Scenario scenario;
};

namespace {

namespace fs = std::filesystem;
using namespace ndg;

thread_local std::string g_error;
std::atomic<unsigned> g_threads{1};
std::atomic<bool> g_timing{false};

template <class Fn>
ndg_status guarded(Fn&& fn) {
  g_error.clear();
  try {
    return fn();
  } catch (const InputError& e) {
    g_error = e.what();
    return NDG_INPUT_ERROR;
  } catch (const ConvergenceError& e) {
    g_error = e.what();
    return NDG_NONCONVERGENCE;
  } catch (const std::exception& e) {
    g_error = e.what();
    return NDG_INTERNAL_ERROR;
  } catch (...) {
    g_error = "unknown failure";
    return NDG_INTERNAL_ERROR;
  }
}

Scenario& scen(ndg_scenario* s) {
  if (!s) throw InputError("null scenario handle");
  s->scenario.solver.threads = g_threads.load();
  return s->scenario;
}

std::vector<double> betas_or_schedule(const Scenario& s, const double* betas, std::size_t n) {
  if (!betas) return s.betas(1);
  if (n != s.operators.size()) throw InputError("one beta per operator required");
  return {betas, betas + n};
}

fs::path out_path(const char* dir) {
  if (!dir || !*dir) throw InputError("output directory required");
  fs::create_directories(dir);
  return dir;
}

std::string json_str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string json_nums(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + io::fmt_num(v[i]);
  return out + "]";
}

std::vector<std::string> model_notes(const Scenario& s) {
  std::vector<std::string> notes;
  if (s.design.profit_cost_basis == ProfitCostBasis::Availability)
    notes.emplace_back(
        "profit charges the base cost on every available PT edge each year, while the Stage-1 "
        "budget charges only new construction");
  notes.emplace_back("the payoff pool adds Stage-1 construction cost back before sharing");
  return notes;
}

void write_manifest(const fs::path& dir, const std::string& command, const Scenario* s,
                    std::vector<std::pair<std::string, std::string>> summary,
                    std::chrono::steady_clock::time_point t0,
                    const std::vector<fs::path>& extra_inputs = {}) {
  io::ManifestInput m;
  m.command = command;
  if (s) {
    m.inputs = s->sources;
    m.scenario_echo = io::scenario_echo(*s);
    m.notes = model_notes(*s);
  }
  for (const auto& p : extra_inputs) m.inputs.push_back(p);
  m.summary = std::move(summary);
  if (g_timing.load())
    m.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_text(dir / "manifest.json", io::manifest_json(m));
}

std::string stats_json(const SolverStats& st) {
  return "{\"nodes_explored\":" + std::to_string(st.nodes_explored) +
         ",\"inner_iterations\":" + std::to_string(st.inner_iterations) +
         ",\"bound_gap\":" + io::fmt_num(st.bound_gap) + ",\"global_optimality_unknown\":" +
         (st.global_optimality_unknown ? "true" : "false") + "}";
}

std::string ne_summary(const EquilibriumResult& ne) {
  std::string stats = "[";
  for (std::size_t i = 0; i < ne.stats.size(); ++i) stats += (i ? "," : "") + stats_json(ne.stats[i]);
  stats += "]";
  return "{\"converged\":" + std::string(ne.converged ? "true" : "false") +
         ",\"rounds\":" + std::to_string(ne.rounds) +
         ",\"certificate_passes\":" + (ne.certificate.passes ? "true" : "false") +
         ",\"max_gain\":" + io::fmt_num(ne.certificate.max_gain) + ",\"solver_stats\":" + stats +
         "}";
}

}  // namespace

extern "C" {

const char* ndg_version(void) { return "1.0.0"; }

const char* ndg_last_error(void) { return g_error.c_str(); }

ndg_status ndg_set_threads(unsigned threads) {
  return guarded([&] {
    if (threads == 0) throw InputError("thread count must be positive");
    g_threads = threads;
    return NDG_OK;
  });
}

ndg_status ndg_set_log_level(const char* level) {
  return guarded([&] {
    if (!level) throw InputError("null log level");
    const auto lvl = spdlog::level::from_str(level);
    if (lvl == spdlog::level::off && std::strcmp(level, "off") != 0)
      throw InputError(std::string("unknown log level '") + level + "'");
    spdlog::set_level(lvl);
    return NDG_OK;
  });
}

ndg_status ndg_set_timing(int enabled) {
  g_timing = enabled != 0;
  return NDG_OK;
}

ndg_status ndg_scenario_load(const char* path, ndg_scenario** out) {
  return guarded([&] {
    if (!path || !out) throw InputError("null argument");
    *out = nullptr;
    auto h = std::make_unique<ndg_scenario>();
    h->scenario = io::load_scenario(path);
    *out = h.release();
    return NDG_OK;
  });
}

void ndg_scenario_free(ndg_scenario* s) { delete s; }

ndg_status ndg_scenario_operator_count(const ndg_scenario* s, size_t* out) {
  return guarded([&] {
    if (!s || !out) throw InputError("null argument");
    *out = s->scenario.operators.size();
    return NDG_OK;
  });
}

ndg_status ndg_validate(const char* scenario_path, const char* network_path,
                        const char* demand_path, size_t* errors, size_t* warnings,
                        char** report) {
  return guarded([&] {
    auto opt = [](const char* p) -> std::optional<fs::path> {
      if (!p) return std::nullopt;
      return fs::path(p);
    };
    const auto diags = io::validate(opt(scenario_path), opt(network_path), opt(demand_path));
    std::string text;
    std::size_t ne = 0;
    std::size_t nw = 0;
    for (const auto& d : diags) {
      const bool err = d.severity == io::Diagnostic::Severity::Error;
      (err ? ne : nw)++;
      text += std::string(err ? "error " : "warning ") + d.code + ": " + d.message + "\n";
    }
    if (errors) *errors = ne;
    if (warnings) *warnings = nw;
    if (report) {
      *report = static_cast<char*>(std::malloc(text.size() + 1));
      if (!*report) throw std::bad_alloc();
      std::memcpy(*report, text.c_str(), text.size() + 1);
    }
    return NDG_OK;
  });
}

void ndg_string_free(char* s) { std::free(s); }

ndg_status ndg_solve_ne(ndg_scenario* h, const double* betas, size_t n, const char* out_dir) {
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto& s = scen(h);
    const auto dir = out_path(out_dir);
    const auto b = betas_or_schedule(s, betas, n);
    const auto routes = build_routes(*s.network, s.demand);
    const auto ctx = make_context(s, routes, 1);
    const auto start = NetworkState::from_network(*s.network);
    const auto ne = solve_ne(ctx, start, stage1_budgets(ctx, b), s.solver);

    auto eq = io::equilibrium_header();
    io::append_equilibrium(eq, s, 1, "stage1", ne);
    auto st = io::strategies_header();
    io::append_strategies(st, *s.network, 1, "stage1", s.operators, ne);
    io::write_text(dir / "equilibrium.csv", eq);
    io::write_text(dir / "strategies.csv", st);
    io::write_text(dir / "state.json", io::state_to_json(*s.network, ne.state));
    write_manifest(dir, "solve-ne", &s,
                   {{"betas", json_nums(b)}, {"stage1", ne_summary(ne)}}, t0);
    if (!ne.converged) {
      g_error = ne.cycle_detected ? "best-response iteration cycled" : "max_rounds reached";
      return NDG_NONCONVERGENCE;
    }
    return NDG_OK;
  });
}

ndg_status ndg_co_invest(ndg_scenario* h, const double* betas, size_t n, const char* out_dir) {
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto& s = scen(h);
    const auto dir = out_path(out_dir);
    const auto b = betas_or_schedule(s, betas, n);
    const auto routes = build_routes(*s.network, s.demand);
    const auto ctx = make_context(s, routes, 1);
    const auto start = NetworkState::from_network(*s.network);
    const auto ne = solve_ne(ctx, start, stage1_budgets(ctx, b), s.solver);
    const auto co = co_invest(ctx, ne.state, b, s.solver.search);

    auto eq = io::equilibrium_header();
    io::append_equilibrium(eq, s, 1, "stage1", ne);
    auto st = io::strategies_header();
    io::append_strategies(st, *s.network, 1, "stage1", s.operators, ne);
    io::append_coinvest_strategy(st, *s.network, 1, "stage2", co);
    auto ci = io::coinvest_header();
    io::append_coinvest(ci, 1, "stage2", co);
    io::write_text(dir / "equilibrium.csv", eq);
    io::write_text(dir / "strategies.csv", st);
    io::write_text(dir / "coinvest.csv", ci);
    io::write_text(dir / "state.json", io::state_to_json(*s.network, co.state));
    write_manifest(dir, "co-invest", &s,
                   {{"betas", json_nums(b)},
                    {"stage1", ne_summary(ne)},
                    {"stage2", stats_json(co.stats)},
                    {"f_co", io::fmt_num(co.total_payoff)},
                    {"cir", io::fmt_num(co.cir)}},
                   t0);
    return ne.converged ? NDG_OK : NDG_NONCONVERGENCE;
  });
}

ndg_status ndg_share_payoff(ndg_scenario* h, const double* betas, size_t n,
                            const char* weights_mode, const int* epsilon, const char* out_dir) {
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s = scen(h);
    const auto dir = out_path(out_dir);
    const auto b = betas_or_schedule(s, betas, n);
    if (weights_mode) {
      const std::string m = weights_mode;
      if (m == "symmetric")
        s.weights_mode = WeightsMode::Symmetric;
      else if (m == "contribution")
        s.weights_mode = WeightsMode::Contribution;
      else
        throw InputError("weights must be symmetric or contribution");
    }
    if (epsilon) {
      s.epsilon.clear();
      for (std::size_t i = 0; i < s.operators.size(); ++i) {
        if (epsilon[i] != 0 && epsilon[i] != 1) throw InputError("epsilon flags must be 0 or 1");
        s.epsilon.push_back(epsilon[i] == 1);
      }
    }
    const auto routes = build_routes(*s.network, s.demand);
    const auto ctx = make_context(s, routes, 1);
    const auto start = NetworkState::from_network(*s.network);
    const auto y = run_year(s, ctx, 1, start, b);

    auto eq = io::equilibrium_header();
    io::append_equilibrium(eq, s, 1, "stage1", y.stage1);
    io::append_equilibrium(eq, s, 1, "disagreement", y.disagreement);
    auto st = io::strategies_header();
    io::append_strategies(st, *s.network, 1, "stage1", s.operators, y.stage1);
    io::append_coinvest_strategy(st, *s.network, 1, "stage2", y.coinvest);
    auto ci = io::coinvest_header();
    io::append_coinvest(ci, 1, "stage2", y.coinvest);
    auto sh = io::sharing_header();
    io::append_sharing(sh, s, 1, "sharing", y.sharing);
    io::write_text(dir / "equilibrium.csv", eq);
    io::write_text(dir / "strategies.csv", st);
    io::write_text(dir / "coinvest.csv", ci);
    io::write_text(dir / "sharing.csv", sh);
    write_manifest(dir, "share-payoff", &s,
                   {{"betas", json_nums(b)},
                    {"feasible", y.sharing.feasible ? "true" : "false"},
                    {"final_payoff", json_nums(y.sharing.final_payoff)},
                    {"stage1", ne_summary(y.stage1)},
                    {"disagreement", ne_summary(y.disagreement)}},
                   t0);
    return y.stage1.converged && y.disagreement.converged ? NDG_OK : NDG_NONCONVERGENCE;
  });
}

ndg_status ndg_sweep_cir(ndg_scenario* h, double lo, double hi, double step,
                         const char* vary_operator, double mgr_threshold, const char* out_dir) {
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto& s = scen(h);
    const auto dir = out_path(out_dir);
    if (!(step > 0.0) || !(lo <= hi) || lo < 0.0 || hi > 1.0)
      throw InputError("grid must satisfy 0 <= lo <= hi <= 1 with a positive step");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k)
      grid.push_back(std::min(hi, lo + static_cast<double>(k) * step));
    std::optional<std::size_t> vary;
    if (vary_operator) {
      for (std::size_t i = 0; i < s.operators.size(); ++i)
        if (s.operators[i].id == vary_operator) vary = i;
      if (!vary) throw InputError(std::string("unknown operator '") + vary_operator + "'");
    }
    const auto sw = sweep_cir(s, grid, vary, mgr_threshold);
    auto out = io::sweep_header(s.operators.size());
    io::append_sweep(out, sw);
    io::write_text(dir / "sweep.csv", out);

    std::string mgr = "[";
    std::string set = "[";
    for (std::size_t i = 0; i < s.operators.size(); ++i) {
      mgr += (i ? "," : "") + (sw.mgr[i] ? io::fmt_num(*sw.mgr[i]) : std::string("null"));
      set += (i ? "," : "") + (sw.set[i] ? io::fmt_num(*sw.set[i]) : std::string("null"));
    }
    write_manifest(dir, "sweep-cir", &s,
                   {{"grid", json_nums(grid)},
                    {"vary", vary_operator ? json_str(vary_operator) : "null"},
                    {"mgr_threshold", io::fmt_num(mgr_threshold)},
                    {"mgr", mgr + "]"},
                    {"set", set + "]"}},
                   t0);
    return NDG_OK;
  });
}

ndg_status ndg_run_scenario(ndg_scenario* h, const char* out_dir) {
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto& s = scen(h);
    const auto dir = out_path(out_dir);
    const auto r = run_scenario(s);
    const auto rep = io::scenario_reports(s, r);
    io::write_text(dir / "equilibrium.csv", rep.equilibrium);
    io::write_text(dir / "strategies.csv", rep.strategies);
    io::write_text(dir / "coinvest.csv", rep.coinvest);
    io::write_text(dir / "sharing.csv", rep.sharing);
    io::write_text(dir / "improvement.csv", rep.improvement);
    io::write_text(dir / "state.json", rep.state);
    write_manifest(dir, "run-scenario", &s,
                   {{"years", std::to_string(s.years)},
                    {"roi", io::fmt_num(r.roi)},
                    {"total_coinvest", io::fmt_num(r.total_coinvest)},
                    {"all_converged", r.all_converged ? "true" : "false"}},
                   t0);
    if (!r.all_converged) {
      g_error = "a best-response iteration did not converge";
      return NDG_NONCONVERGENCE;
    }
    return NDG_OK;
  });
}

ndg_status ndg_ue_assign(const char* network_path, const char* demand_path,
                         const char* state_path, double gap_tol, size_t max_iters,
                         const char* out_dir) {
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    if (!network_path || !demand_path) throw InputError("network and demand paths required");
    const auto dir = out_path(out_dir);
    const auto net = io::load_network(network_path);
    const auto demand = io::load_demand(net, demand_path);
    auto state = NetworkState::from_network(net);
    std::vector<fs::path> inputs{network_path, demand_path};
    if (state_path) {
      state = io::parse_state(net, io::read_text(state_path));
      inputs.emplace_back(state_path);
    }
    UEConfig cfg;
    cfg.gap_tol = gap_tol;
    cfg.max_iters = max_iters;
    cfg.threads = g_threads.load();
    const auto r = solve_ue(net, demand, state, EconomicParams{}, cfg);
    io::write_text(dir / "ue_flows.csv", io::ue_flows_csv(net, r));
    write_manifest(dir, "ue-assign", nullptr,
                   {{"converged", r.converged ? "true" : "false"},
                    {"iterations", std::to_string(r.iterations)},
                    {"relative_gap", io::fmt_num(r.relative_gap)},
                    {"beckmann", io::fmt_num(r.beckmann.back())}},
                   t0, inputs);
    if (!r.converged) {
      g_error = "assignment stopped before reaching the gap tolerance";
      return NDG_NONCONVERGENCE;
    }
    return NDG_OK;
  });
}

double ndg_mode_share(double u_pt, double u_alt) { return mode_share(u_pt, u_alt); }

ndg_status ndg_nash_bargain(size_t n, const double* kept, double shareable,
                            const double* disagreement, const double* weights, double* q,
                            int* feasible) {
  return guarded([&] {
    if (n == 0 || !kept || !disagreement || !weights || !q || !feasible)
      throw InputError("null argument");
    const auto r = nash_bargain({kept, kept + n}, shareable, {disagreement, disagreement + n},
                                {weights, weights + n});
    *feasible = r ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) q[i] = r ? (*r)[i] : 0.0;
    return NDG_OK;
  });
}

}  // extern "C"
