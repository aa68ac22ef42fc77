#include "lqgame/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include "lqgame/adjoint.hpp"
#include "lqgame/csv.hpp"
#include "lqgame/errors.hpp"
#include "lqgame/matrix_core.hpp"
#include "lqgame/problem_io.hpp"
#include "lqgame/riccati.hpp"
#include "lqgame/simulate.hpp"
#include "lqgame/strategy.hpp"

namespace lqgame {

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json l2_to_json(const L2Verdict& v) {
  json out;
  out["square_integrable"] = v.square_integrable;
  out["location"] = v.location;
  out["growth"] = std::isfinite(v.growth) ? json(v.growth) : json("inf");
  out["integral"] = std::isfinite(v.integral) ? json(v.integral) : json("inf");
  return out;
}

json regularity_to_json(const RegularityReport& rep) {
  json out;
  out["regular"] = rep.regular;
  out["range_ok"] = rep.range_ok;
  out["theta_l2"] = l2_to_json(rep.theta_l2);
  out["sign_player1"] = rep.sign_player1;
  out["sign_player2"] = rep.sign_player2;
  out["eta_range_ok"] = rep.eta_range_ok;
  out["v_l2_ok"] = rep.v_l2_ok;
  out["adjoint_checked"] = rep.adjoint_checked;
  out["failed_conditions"] = rep.failed_conditions();
  out["notes"] = rep.notes;
  return out;
}

void add_verdict(json& report, const std::string& name, bool pass, const std::string& detail) {
  json v;
  v["name"] = name;
  v["pass"] = pass;
  v["detail"] = detail;
  report["verdicts"].push_back(std::move(v));
}

void write_outputs(const std::string& out_dir, const json& report) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "report.json");
  out << report.dump(2) << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Pipeline {
  std::optional<StackedProblem> sp;
  std::optional<RiccatiSolution> P;
  std::optional<AdjointSolution> adj;
  RegularityReport rep;
  std::optional<ClosedLoopStrategy> strategy;
  double residual = 0.0;
  double audit_tol = 0.0;
  bool audit_ok = false;
  int exit_code = kExitOk;
  std::string error;
};

json config_to_json(const CommonOptions& o) {
  json c;
  c["steps"] = o.steps;
  c["tol_range"] = o.tol_range;
  c["tol_sign"] = o.tol_sign;
  c["audit_tol"] = o.audit_tol;  // 0 = auto
  c["threads"] = o.threads;
  c["value_states"] = o.value_states;
  return c;
}

RegularityOptions regularity_options(const CommonOptions& o) {
  RegularityOptions r;
  r.range_tol = o.tol_range;
  r.sign_tol = o.tol_sign;
  return r;
}

// integrate -> residual audit -> adjoint -> regularity -> saddle-or-refuse
Pipeline run_solve_pipeline(const CommonOptions& opts) {
  Pipeline pl;
  GameProblem problem;
  try {
    problem = load_problem(opts.problem);
    pl.sp = assemble(std::move(problem));
  } catch (const std::exception& e) {
    pl.exit_code = kExitInvalidProblem;
    pl.error = e.what();
    return pl;
  }

  pl.P = integrate_riccati(*pl.sp, opts.steps);
  if (pl.P->blowup.has_value()) {
    pl.exit_code = kExitBlowup;
    pl.error = "Riccati integration blew up at s=" + fmt(*pl.P->blowup);
    return pl;
  }

  pl.residual = residual_verify(*pl.P, *pl.sp, pl.P->grid);
  const double h = (pl.sp->T() - pl.sp->t0()) / opts.steps;
  pl.audit_tol = opts.audit_tol > 0.0
                     ? opts.audit_tol
                     : std::max(1e-6, 100.0 * h * h * (1.0 + pl.P->max_norm()));
  pl.audit_ok = pl.residual <= pl.audit_tol;

  pl.adj = solve_eta(*pl.sp, *pl.P);
  pl.rep = check_regularity(*pl.P, *pl.sp, &*pl.adj, regularity_options(opts));
  if (!pl.audit_ok) {
    pl.rep.notes.push_back(
        "integrated solution failed the equation residual audit (residual=" +
        fmt(pl.residual) + " > tol=" + fmt(pl.audit_tol) +
        "): trajectory untrusted, regularity not certified");
  }

  if (pl.audit_ok && pl.rep.regular) {
    pl.strategy = build_saddle(*pl.sp, *pl.P, *pl.adj, pl.rep);
    pl.exit_code = kExitOk;
  } else {
    pl.exit_code = kExitNotRegular;
  }
  return pl;
}

json riccati_to_json(const Pipeline& pl) {
  json r;
  const auto& P = *pl.P;
  r["source"] = P.source == RiccatiSolution::Source::kIntegrated ? "integrated" : "supplied";
  r["nodes"] = P.grid.size();
  r["max_norm"] = P.max_norm();
  r["max_asymmetry"] = P.max_asymmetry();
  r["blowup"] = P.blowup.has_value() ? json(*P.blowup) : json(nullptr);
  r["P_t0"] = matrix_to_json(P.values.front());
  r["residual"] = pl.residual;
  r["residual_tol"] = pl.audit_tol;
  r["residual_ok"] = pl.audit_ok;
  return r;
}

json strategy_to_json(const StackedProblem& sp, const ClosedLoopStrategy& st) {
  json s;
  s["theta_t0"] = matrix_to_json(st.theta.front());
  s["v_t0"] = vector_to_json(st.v.front());
  double theta_max = 0.0, v_max = 0.0;
  for (const auto& t : st.theta) theta_max = std::max(theta_max, max_abs(t));
  for (const auto& v : st.v) v_max = std::max(v_max, max_abs(v));
  s["theta_max_norm"] = theta_max;
  s["v_max_norm"] = v_max;
  s["m1"] = sp.m1();
  s["m2"] = sp.m2();
  return s;
}

json value_samples(const Pipeline& pl, const std::vector<double>& states) {
  json out = json::array();
  for (double x : states) {
    const Eigen::VectorXd xv = Eigen::VectorXd::Constant(pl.sp->n(), x);
    json entry;
    entry["x"] = x;
    entry["V"] = value_at(*pl.sp, *pl.P, *pl.adj, pl.sp->t0(), xv);
    out.push_back(std::move(entry));
  }
  return out;
}

void write_solution_csvs(const std::string& out_dir, const Pipeline& pl) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  if (pl.P) export_riccati_csv(*pl.P, (dir / "riccati.csv").string());
  if (pl.adj) export_eta_csv(*pl.adj, (dir / "eta.csv").string());
  if (pl.strategy) export_strategy_csv(*pl.strategy, (dir / "strategy.csv").string());
}

std::vector<double> uniform_grid(double t0, double T, int steps) {
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  const double h = (T - t0) / steps;
  for (int k = 0; k <= steps; ++k) g[static_cast<std::size_t>(k)] = t0 + k * h;
  g.back() = T;
  return g;
}

ClosedLoopStrategy zero_strategy(const StackedProblem& sp, const std::vector<double>& grid) {
  ClosedLoopStrategy st;
  st.grid = grid;
  st.m1 = sp.m1();
  st.m2 = sp.m2();
  st.theta.assign(grid.size(), Eigen::MatrixXd::Zero(sp.m(), sp.n()));
  st.v.assign(grid.size(), Eigen::VectorXd::Zero(sp.m()));
  return st;
}

}  // namespace

int cmd_solve(const SolveOptions& opts, json* report_out) {
  json report;
  report["schema"] = "lqgame-report-v1";
  report["command"] = "solve";
  report["problem"] = opts.problem;
  report["config"] = config_to_json(opts);
  report["verdicts"] = json::array();

  Pipeline pl = run_solve_pipeline(opts);
  report["riccati"] = pl.P ? riccati_to_json(pl) : json(nullptr);
  report["regularity"] = pl.adj ? regularity_to_json(pl.rep) : json(nullptr);
  report["strategy"] =
      pl.strategy ? strategy_to_json(*pl.sp, *pl.strategy) : json(nullptr);
  report["value"] = pl.exit_code == kExitOk ? value_samples(pl, opts.value_states)
                                            : json(nullptr);
  report["simulation"] = json(nullptr);
  if (!pl.error.empty()) report["error"] = pl.error;

  if (pl.P) {
    add_verdict(report, "residual-audit", pl.audit_ok,
                "residual=" + fmt(pl.residual) + " tol=" + fmt(pl.audit_tol));
  }
  if (pl.adj) {
    add_verdict(report, "regular", pl.rep.regular, pl.rep.failed_conditions());
  }
  report["exit_code"] = pl.exit_code;

  write_solution_csvs(opts.out_dir, pl);
  write_outputs(opts.out_dir, report);
  if (report_out) *report_out = std::move(report);
  return pl.exit_code;
}

int cmd_verify(const VerifyOptions& opts, json* report_out) {
  json report;
  report["schema"] = "lqgame-report-v1";
  report["command"] = "verify";
  report["problem"] = opts.problem;
  report["config"] = config_to_json(opts);
  report["config"]["candidate"] = opts.candidate;
  report["verdicts"] = json::array();

  Pipeline pl;
  MatrixFunction candidate;
  try {
    GameProblem problem = load_problem(opts.problem);
    pl.sp = assemble(std::move(problem));
    candidate = parse_candidate_spec(opts.candidate, pl.sp->n());
  } catch (const std::exception& e) {
    report["riccati"] = json(nullptr);
    report["regularity"] = json(nullptr);
    report["strategy"] = json(nullptr);
    report["value"] = json(nullptr);
    report["simulation"] = json(nullptr);
    report["error"] = e.what();
    report["exit_code"] = kExitInvalidProblem;
    write_outputs(opts.out_dir, report);
    if (report_out) *report_out = std::move(report);
    return kExitInvalidProblem;
  }

  pl.P = supplied_solution(candidate, *pl.sp, opts.steps);

  // residual on cell midpoints: terminal-time singularities of R + D'PD
  // belong to the a.e. statement, not the max-residual audit
  std::vector<double> midgrid(static_cast<std::size_t>(opts.steps));
  const double h = (pl.sp->T() - pl.sp->t0()) / opts.steps;
  for (int k = 0; k < opts.steps; ++k) midgrid[static_cast<std::size_t>(k)] =
      pl.sp->t0() + (k + 0.5) * h;
  pl.residual = residual_verify(candidate, *pl.sp, midgrid);
  pl.audit_tol = opts.audit_tol > 0.0 ? opts.audit_tol : 1e-8;
  pl.audit_ok = pl.residual <= pl.audit_tol;

  pl.adj = solve_eta(*pl.sp, *pl.P);
  pl.rep = check_regularity(*pl.P, *pl.sp, &*pl.adj, regularity_options(opts));
  if (pl.audit_ok && pl.rep.regular) {
    pl.strategy = build_saddle(*pl.sp, *pl.P, *pl.adj, pl.rep);
    pl.exit_code = kExitOk;
  } else {
    pl.exit_code = kExitNotRegular;
  }

  report["riccati"] = riccati_to_json(pl);
  report["regularity"] = regularity_to_json(pl.rep);
  report["strategy"] = pl.strategy ? strategy_to_json(*pl.sp, *pl.strategy) : json(nullptr);
  report["value"] =
      pl.exit_code == kExitOk ? value_samples(pl, opts.value_states) : json(nullptr);
  report["simulation"] = json(nullptr);
  add_verdict(report, "residual", pl.audit_ok,
              "residual=" + fmt(pl.residual) + " tol=" + fmt(pl.audit_tol));
  add_verdict(report, "regular", pl.rep.regular, pl.rep.failed_conditions());
  report["exit_code"] = pl.exit_code;

  write_solution_csvs(opts.out_dir, pl);
  write_outputs(opts.out_dir, report);
  if (report_out) *report_out = std::move(report);
  return pl.exit_code;
}

namespace {

json mc_to_json(const MCEstimate& e) {
  json out;
  out["mean"] = e.mean;
  out["stderr"] = e.stderr_;
  out["n_paths"] = e.n_paths;
  return out;
}

void export_simulation_paths(const std::string& out_dir, const StackedProblem& sp,
                             const std::vector<StatePath>& paths) {
  if (out_dir.empty() || paths.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::vector<long> idx;
  std::vector<Eigen::VectorXd> terminals;
  std::vector<double> payoffs = per_path_payoffs(sp, paths);
  for (const auto& p : paths) {
    idx.push_back(p.path_index);
    terminals.emplace_back(p.X_at(p.grid.size() - 1));
  }
  export_paths_csv(idx, terminals, payoffs,
                   (std::filesystem::path(out_dir) / "paths.csv").string());
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts, json* report_out) {
  json report;
  report["schema"] = "lqgame-report-v1";
  report["command"] = "simulate";
  report["problem"] = opts.problem;
  report["config"] = config_to_json(opts);
  report["config"]["mode"] = opts.mode;
  report["config"]["seed"] = opts.seed;
  report["config"]["n_paths"] = opts.n_paths;
  report["config"]["x0"] = opts.x0;
  report["config"]["lambdas"] = opts.lambdas;
  report["config"]["player"] = opts.player;
  report["config"]["delta"] = opts.delta;
  report["verdicts"] = json::array();
  report["riccati"] = json(nullptr);
  report["regularity"] = json(nullptr);
  report["strategy"] = json(nullptr);
  report["value"] = json(nullptr);
  report["simulation"] = json(nullptr);

  auto finish = [&](int code) {
    report["exit_code"] = code;
    write_outputs(opts.out_dir, report);
    if (report_out) *report_out = std::move(report);
    return code;
  };

  const bool needs_solve = opts.mode == "saddle-test" || opts.mode == "stationarity";

  Pipeline pl;
  if (needs_solve) {
    pl = run_solve_pipeline(opts);
    if (pl.P) report["riccati"] = riccati_to_json(pl);
    if (pl.adj) report["regularity"] = regularity_to_json(pl.rep);
    if (pl.strategy) report["strategy"] = strategy_to_json(*pl.sp, *pl.strategy);
    if (!pl.error.empty()) report["error"] = pl.error;
    if (pl.exit_code != kExitOk) {
      add_verdict(report, "prerequisite-solve", false,
                  pl.error.empty() ? pl.rep.failed_conditions() : pl.error);
      return finish(pl.exit_code);
    }
  } else {
    try {
      pl.sp = assemble(load_problem(opts.problem));
    } catch (const std::exception& e) {
      report["error"] = e.what();
      return finish(kExitInvalidProblem);
    }
  }

  const StackedProblem& sp = *pl.sp;
  BrownianBatch batch;
  batch.master_seed = opts.seed;
  batch.n_paths = opts.n_paths;
  batch.grid = uniform_grid(sp.t0(), sp.T(), opts.steps);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(sp.n(), opts.x0);

  json sim;
  sim["mode"] = opts.mode;
  int exit_code = kExitOk;

  try {
    if (opts.mode == "saddle-test") {
      std::vector<Perturbation> perts;
      const double d = opts.delta;
      perts.push_back({1,
                       [&sp, d](double) { return Eigen::VectorXd::Constant(sp.m1(), d).eval(); },
                       "player-1 constant delta"});
      if (sp.m2() > 0) {
        perts.push_back(
            {2, [&sp, d](double) { return Eigen::VectorXd::Constant(sp.m2(), d).eval(); },
             "player-2 constant delta"});
        const double t0 = sp.t0(), span = sp.T() - sp.t0();
        perts.push_back({2,
                         [&sp, d, t0, span](double s) {
                           const double w = 1.0 - 2.0 * (s - t0) / span;
                           return Eigen::VectorXd::Constant(sp.m2(), d * w).eval();
                         },
                         "player-2 ramp"});
      }
      const SaddleTestReport st =
          saddle_test(sp, *pl.P, *pl.adj, *pl.strategy, pl.rep, perts, x0, batch, opts.threads);
      sim["baseline"] = mc_to_json(st.baseline);
      sim["gaps"] = json::array();
      for (const auto& g : st.gaps) {
        json jg;
        jg["label"] = g.label;
        jg["player"] = g.player;
        jg["gap"] = g.gap;
        jg["stderr"] = g.stderr_;
        jg["predicted"] = g.predicted;
        jg["sign_ok"] = g.sign_ok;
        jg["matches_prediction"] = g.matches_prediction;
        sim["gaps"].push_back(std::move(jg));
        add_verdict(report, "saddle-gap: " + g.label, g.sign_ok && g.matches_prediction,
                    "gap=" + fmt(g.gap) + " predicted=" + fmt(g.predicted) +
                        " se=" + fmt(g.stderr_));
      }
      exit_code = st.all_pass ? kExitOk : kExitInconclusive;

      BrownianBatch csv_batch = batch;
      csv_batch.n_paths = std::min<long>(batch.n_paths, 10000);
      export_simulation_paths(opts.out_dir, sp,
                              simulate_closed_loop(sp, *pl.strategy, x0, csv_batch, opts.threads));
    } else if (opts.mode == "stationarity") {
      const ClosedLoopStrategy zero = zero_strategy(sp, batch.grid);
      std::vector<double> saddle_sums, zero_sums;
      const long chunk = 1024;
      for (long start = 0; start < opts.n_paths; start += chunk) {
        BrownianBatch part = batch;
        part.n_paths = std::min(chunk, opts.n_paths - start);
        part.path_offset = start;
        std::vector<StatePath> paths =
            simulate_closed_loop(sp, *pl.strategy, x0, part, opts.threads);
        const auto s1 = stationarity_node_norms(sp, *pl.P, *pl.adj, *pl.strategy, paths);
        std::vector<StatePath> zpaths = simulate_closed_loop(sp, zero, x0, part, opts.threads);
        const auto s2 = stationarity_node_norms(sp, *pl.P, *pl.adj, zero, zpaths);
        if (saddle_sums.empty()) {
          saddle_sums = s1;
          zero_sums = s2;
        } else {
          for (std::size_t i = 0; i < s1.size(); ++i) {
            saddle_sums[i] += s1[i];
            zero_sums[i] += s2[i];
          }
        }
        if (start == 0) export_simulation_paths(opts.out_dir, sp, paths);
      }
      double r_saddle = 0.0, r_zero = 0.0;
      for (double v : saddle_sums) r_saddle = std::max(r_saddle, v / opts.n_paths);
      for (double v : zero_sums) r_zero = std::max(r_zero, v / opts.n_paths);
      const double tol = 1e-2 * (1.0 + std::abs(opts.x0));
      sim["saddle_residual"] = r_saddle;
      sim["zero_strategy_residual"] = r_zero;
      sim["tolerance"] = tol;
      add_verdict(report, "stationarity-at-saddle", r_saddle <= tol,
                  "residual=" + fmt(r_saddle) + " tol=" + fmt(tol));
      add_verdict(report, "zero-strategy-residual-larger", r_zero >= 10.0 * std::max(r_saddle, 1e-300),
                  "saddle=" + fmt(r_saddle) + " zero=" + fmt(r_zero));
      exit_code = r_saddle <= tol ? kExitOk : kExitInconclusive;
    } else if (opts.mode == "convexity") {
      const int mi = opts.player == 1 ? sp.m1() : sp.m2();
      if (mi == 0) throw std::invalid_argument("convexity: probed player has no controls");
      std::vector<std::pair<std::string, std::function<Eigen::VectorXd(double)>>> controls;
      controls.emplace_back("constant one",
                            [mi](double) { return Eigen::VectorXd::Ones(mi).eval(); });
      const double t0 = sp.t0(), span = sp.T() - sp.t0();
      controls.emplace_back("ramp", [mi, t0, span](double s) {
        return Eigen::VectorXd::Constant(mi, 1.0 - 2.0 * (s - t0) / span).eval();
      });
      const auto results = convexity_probe(sp, opts.player, controls, batch, opts.threads);
      sim["probes"] = json::array();
      bool any_conclusive = false;
      for (const auto& r : results) {
        json jr;
        jr["label"] = r.label;
        jr["estimate"] = r.estimate;
        jr["stderr"] = r.stderr_;
        jr["violated"] = r.violated;
        sim["probes"].push_back(std::move(jr));
        const bool conclusive = r.violated || std::abs(r.estimate) > 3.0 * r.stderr_ ||
                                r.stderr_ == 0.0;
        any_conclusive = any_conclusive || conclusive;
        add_verdict(report, "convexity-probe: " + r.label, !r.violated,
                    "estimate=" + fmt(r.estimate) + " se=" + fmt(r.stderr_));
      }
      exit_code = any_conclusive ? kExitOk : kExitInconclusive;
    } else if (opts.mode == "divergence") {
      if (sp.m2() == 0) throw std::invalid_argument("divergence: problem has no player 2");
      ControlFamily family = [&sp](double lam) -> ControlFunction {
        return [&sp, lam](double) {
          Eigen::VectorXd u = Eigen::VectorXd::Zero(sp.m());
          u.tail(sp.m2()).setConstant(-lam);
          return u;
        };
      };
      const DivergenceFit fit =
          divergence_probe(sp, family, opts.lambdas, x0, batch, opts.threads);
      sim["fit"] = {{"a", fit.a}, {"b", fit.b}, {"c", fit.c}, {"a_stderr", fit.a_stderr}};
      sim["j_estimates"] = json::array();
      for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
        json je = mc_to_json(fit.j_estimates[i]);
        je["lambda"] = fit.lambdas[i];
        sim["j_estimates"].push_back(std::move(je));
      }
      add_verdict(report, "open-loop-divergence", fit.diverges,
                  "a=" + fmt(fit.a) + " se=" + fmt(fit.a_stderr));
      const bool inconclusive = std::abs(fit.a) <= 3.0 * fit.a_stderr;
      exit_code = inconclusive ? kExitInconclusive : kExitOk;

      BrownianBatch csv_batch = batch;
      csv_batch.n_paths = std::min<long>(batch.n_paths, 10000);
      export_simulation_paths(
          opts.out_dir, sp,
          simulate_open_loop(sp, family(opts.lambdas.back()), x0, csv_batch, opts.threads));
    } else {
      report["error"] = "unknown mode '" + opts.mode + "'";
      return finish(kExitInvalidProblem);
    }
  } catch (const std::invalid_argument& e) {
    report["error"] = e.what();
    return finish(kExitInvalidProblem);
  } catch (const NumericOverflowError& e) {
    report["error"] = e.what();
    return finish(kExitBlowup);
  }

  report["simulation"] = std::move(sim);
  return finish(exit_code);
}

}  // namespace lqgame
