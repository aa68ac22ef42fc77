#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqgame/commands.hpp"

namespace {

void add_common_flags(CLI::App* cmd, lqgame::CommonOptions& opts) {
  cmd->add_option("problem", opts.problem,
                  "builtin name (example-6.1 / example-6.2 / example-6.3) or problem file")
      ->required();
  cmd->add_option("--steps", opts.steps, "integration / simulation grid steps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out_dir, "output directory for report.json and CSV files");
  cmd->add_option("--tol-range", opts.tol_range, "range-inclusion tolerance");
  cmd->add_option("--tol-sign", opts.tol_sign, "sign-condition tolerance");
  cmd->add_option("--audit-tol", opts.audit_tol,
                  "Riccati residual audit tolerance (0 = automatic)");
  cmd->add_option("--threads", opts.threads, "Monte Carlo worker threads (1 = bit-reproducible)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--x", opts.value_states, "states x for value samples V(t0, x*ones)")
      ->delimiter(',');
}

void print_summary(const nlohmann::ordered_json& report) {
  if (report.contains("error")) {
    std::fprintf(stderr, "error: %s\n", report["error"].get<std::string>().c_str());
  }
  if (report.contains("verdicts")) {
    for (const auto& v : report["verdicts"]) {
      std::printf("[%s] %s: %s\n", v["pass"].get<bool>() ? "pass" : "FAIL",
                  v["name"].get<std::string>().c_str(),
                  v["detail"].get<std::string>().c_str());
    }
  }
  std::printf("exit code: %d\n", report["exit_code"].get<int>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lqgame: linear-quadratic zero-sum stochastic differential games\n"
               "solve and audit the game Riccati equation, build closed-loop saddle\n"
               "strategies, and verify saddle properties by Monte Carlo"};
  app.require_subcommand(1);

  lqgame::SolveOptions solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "integrate, audit, and build the saddle");
  add_common_flags(solve, solve_opts);

  lqgame::VerifyOptions verify_opts;
  CLI::App* verify = app.add_subcommand("verify", "audit a supplied closed-form solution");
  add_common_flags(verify, verify_opts);
  verify->add_option("--p", verify_opts.candidate,
                     "candidate P: const:<v> | poly:[c0,c1,...] | rational:[n]/[d] | file:<path>")
      ->required();

  lqgame::SimulateOptions sim_opts;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo saddle/stationarity probes");
  add_common_flags(simulate, sim_opts);
  simulate->add_option("mode", sim_opts.mode, "saddle-test | stationarity | convexity | divergence")
      ->required()
      ->check(CLI::IsMember({"saddle-test", "stationarity", "convexity", "divergence"}));
  simulate->add_option("--seed", sim_opts.seed, "master seed")->envname("LQGAME_SEED");
  simulate->add_option("--paths", sim_opts.n_paths, "Monte Carlo paths")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--x0", sim_opts.x0, "initial state (x0 * ones)");
  simulate->add_option("--lambdas", sim_opts.lambdas, "family parameters for divergence mode")
      ->delimiter(',');
  simulate->add_option("--player", sim_opts.player, "probed player for convexity mode")
      ->check(CLI::IsMember({1, 2}));
  simulate->add_option("--delta", sim_opts.delta, "perturbation size for saddle-test");

  CLI11_PARSE(app, argc, argv);

  nlohmann::ordered_json report;
  int code = 0;
  if (solve->parsed()) {
    code = lqgame::cmd_solve(solve_opts, &report);
  } else if (verify->parsed()) {
    code = lqgame::cmd_verify(verify_opts, &report);
  } else {
    code = lqgame::cmd_simulate(sim_opts, &report);
  }
  print_summary(report);
  return code;
}
