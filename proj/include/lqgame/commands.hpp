#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace lqgame {

// Exit-code contract shared by all commands:
//   0  success
//   1  invalid problem (parse or validation failure)
//   2  no certified regular solution (regularity failed, or the integrated
//      solution failed its own residual audit)
//   3  numeric blow-up during integration
//   4  statistically inconclusive simulation verdict
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidProblem = 1;
inline constexpr int kExitNotRegular = 2;
inline constexpr int kExitBlowup = 3;
inline constexpr int kExitInconclusive = 4;

struct CommonOptions {
  std::string problem;   // builtin name or problem-file path
  int steps = 1000;
  std::string out_dir;   // empty: write no files
  double tol_range = 1e-9;
  double tol_sign = 1e-8;
  double audit_tol = 0.0;  // 0: auto = max(1e-6, 100 h^2 (1 + max||P||))
  int threads = 1;
  std::vector<double> value_states{1.0};  // x samples for V(t0, x * ones)
};

struct SolveOptions : CommonOptions {};

struct VerifyOptions : CommonOptions {
  std::string candidate;  // const:<v> | poly:[...] | rational:[..]/[..] | file:<path>
};

struct SimulateOptions : CommonOptions {
  std::string mode;  // saddle-test | stationarity | convexity | divergence
  std::uint64_t seed = 42;
  long n_paths = 10000;
  double x0 = 1.0;                       // initial state = x0 * ones(n)
  std::vector<double> lambdas{0.0, 1.0, 2.0, 4.0};
  int player = 2;
  double delta = 0.5;  // perturbation magnitude for saddle-test
};

/// integrate -> residual audit -> regularity -> adjoint -> saddle (or
/// refusal); writes report.json + riccati.csv/eta.csv/strategy.csv.
int cmd_solve(const SolveOptions& opts, nlohmann::ordered_json* report_out = nullptr);

/// residual_verify + regularity audit of a supplied closed-form candidate.
int cmd_verify(const VerifyOptions& opts, nlohmann::ordered_json* report_out = nullptr);

/// Monte Carlo probes (saddle-test, stationarity, convexity, divergence);
/// writes report.json + paths.csv.
int cmd_simulate(const SimulateOptions& opts, nlohmann::ordered_json* report_out = nullptr);

}  // namespace lqgame
