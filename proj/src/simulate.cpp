#include "lqgame/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "lqgame/errors.hpp"
#include "lqgame/matrix_core.hpp"

namespace lqgame {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Box-Muller on 53-bit uniforms from mt19937_64; fully deterministic for a
// given engine state (no implementation-defined distributions).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

void run_over_paths(long n_paths, int threads, const std::function<void(long)>& body) {
  if (threads <= 1 || n_paths < 2) {
    for (long p = 0; p < n_paths; ++p) body(p);
    return;
  }
  const int t = std::min<long>(threads, n_paths);
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int i = 0; i < t; ++i) {
    pool.emplace_back([&, i] {
      try {
        for (long p = i; p < n_paths; p += t) body(p);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Per-node coefficients of a linear-affine SDE plus the running cost as a
// quadratic in X, flattened row-major so the path loop touches raw doubles.
struct SimKernel {
  int n = 0;
  int m = 0;
  std::vector<double> grid;
  std::vector<double> F, fd;    // drift: F X + fd   (K+1 nodes; node K unused)
  std::vector<double> Gd, gd;   // diffusion: Gd X + gd
  std::vector<double> Qt, wt, ct;  // running cost: <Qt X, X> + 2<wt, X> + ct
  std::vector<double> Gterm, gterm;
  std::vector<double> theta, vctrl;  // realized control u = theta X + vctrl
  long steps() const { return static_cast<long>(grid.size()) - 1; }

  // payoff = (1/2)[ terminal + trapezoid(running) ]; returns terminal state.
  double payoff(const double* dW, const double* x0, double* x_out, long path_index) const;
  void materialize(const double* dW, const double* x0, long path_index, StatePath& out) const;

 private:
  void step(long k, const double* x, double dw, double* xn) const;
  double running_cost(long k, const double* x) const;
};

void SimKernel::step(long k, const double* x, double dw, double* xn) const {
  const double h = grid[k + 1] - grid[k];
  const double* Fk = &F[k * n * n];
  const double* Gk = &Gd[k * n * n];
  const double* fk = &fd[k * n];
  const double* gk = &gd[k * n];
  for (int i = 0; i < n; ++i) {
    double dr = fk[i];
    double di = gk[i];
    const double* Fi = &Fk[i * n];
    const double* Gi = &Gk[i * n];
    for (int j = 0; j < n; ++j) {
      dr += Fi[j] * x[j];
      di += Gi[j] * x[j];
    }
    xn[i] = x[i] + h * dr + dw * di;
  }
}

double SimKernel::running_cost(long k, const double* x) const {
  const double* Qk = &Qt[k * n * n];
  const double* wk = &wt[k * n];
  double acc = ct[k];
  for (int i = 0; i < n; ++i) {
    double qx = 0.0;
    const double* Qi = &Qk[i * n];
    for (int j = 0; j < n; ++j) qx += Qi[j] * x[j];
    acc += x[i] * qx + 2.0 * wk[i] * x[i];
  }
  return acc;
}

double SimKernel::payoff(const double* dW, const double* x0, double* x_out,
                         long path_index) const {
  const long K = steps();
  std::vector<double> xa(x0, x0 + n), xb(n);
  double* x = xa.data();
  double* xn = xb.data();

  double integral = 0.0;
  double prev_l = running_cost(0, x);
  for (long k = 0; k < K; ++k) {
    step(k, x, dW[k], xn);
    std::swap(x, xn);
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(x[i])) {
        throw NumericOverflowError("simulate: non-finite state", grid[k + 1], path_index);
      }
    }
    const double cur_l = running_cost(k + 1, x);
    integral += 0.5 * (grid[k + 1] - grid[k]) * (prev_l + cur_l);
    prev_l = cur_l;
  }

  double terminal = 0.0;
  for (int i = 0; i < n; ++i) {
    double gx = 0.0;
    for (int j = 0; j < n; ++j) gx += Gterm[i * n + j] * x[j];
    terminal += x[i] * gx + 2.0 * gterm[i] * x[i];
  }
  if (x_out != nullptr) {
    for (int i = 0; i < n; ++i) x_out[i] = x[i];
  }
  return 0.5 * (terminal + integral);
}

void SimKernel::materialize(const double* dW, const double* x0, long path_index,
                            StatePath& out) const {
  const long K = steps();
  out.grid = grid;
  out.path_index = path_index;
  out.n = n;
  out.m = m;
  out.X.assign((K + 1) * n, 0.0);
  out.u.assign((K + 1) * m, 0.0);
  std::vector<double> xa(x0, x0 + n), xb(n);
  double* x = xa.data();
  double* xn = xb.data();

  auto record = [&](long k, const double* xs) {
    for (int i = 0; i < n; ++i) out.X[k * n + i] = xs[i];
    const double* Tk = &theta[k * m * n];
    const double* vk = &vctrl[k * m];
    for (int i = 0; i < m; ++i) {
      double ui = vk[i];
      for (int j = 0; j < n; ++j) ui += Tk[i * n + j] * xs[j];
      out.u[k * m + i] = ui;
    }
  };

  record(0, x);
  for (long k = 0; k < K; ++k) {
    step(k, x, dW[k], xn);
    std::swap(x, xn);
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(x[i])) {
        throw NumericOverflowError("simulate: non-finite state", grid[k + 1], path_index);
      }
    }
    record(k + 1, x);
  }
}

void flatten(const Eigen::MatrixXd& mat, double* out) {
  for (Eigen::Index i = 0; i < mat.rows(); ++i)
    for (Eigen::Index j = 0; j < mat.cols(); ++j) out[i * mat.cols() + j] = mat(i, j);
}

SimKernel make_kernel(const StackedProblem& sp, const std::vector<double>& grid,
                      const std::function<Eigen::MatrixXd(long, double)>& theta_at,
                      const std::function<Eigen::VectorXd(long, double)>& v_at) {
  SimKernel kr;
  kr.n = sp.n();
  kr.m = sp.m();
  kr.grid = grid;
  const long nodes = static_cast<long>(grid.size());
  const int n = kr.n, m = kr.m;
  kr.F.resize(nodes * n * n);
  kr.fd.resize(nodes * n);
  kr.Gd.resize(nodes * n * n);
  kr.gd.resize(nodes * n);
  kr.Qt.resize(nodes * n * n);
  kr.wt.resize(nodes * n);
  kr.ct.resize(nodes);
  kr.theta.resize(nodes * m * n);
  kr.vctrl.resize(nodes * m);
  kr.Gterm.resize(n * n);
  kr.gterm.resize(n);
  flatten(sp.G(), kr.Gterm.data());
  flatten(sp.g(), kr.gterm.data());

  for (long k = 0; k < nodes; ++k) {
    const double s = grid[k];
    const Eigen::MatrixXd A = sp.A(s), B = sp.B(s), C = sp.C(s), D = sp.D(s);
    const Eigen::MatrixXd Q = sp.Q(s), S = sp.S(s), R = sp.R(s);
    const Eigen::VectorXd b = sp.b(s), sg = sp.sigma(s), q = sp.q(s), rho = sp.rho(s);
    const Eigen::MatrixXd Th = theta_at(k, s);
    const Eigen::VectorXd v = v_at(k, s);

    flatten(A + B * Th, &kr.F[k * n * n]);
    flatten(Eigen::VectorXd(B * v + b), &kr.fd[k * n]);
    flatten(C + D * Th, &kr.Gd[k * n * n]);
    flatten(Eigen::VectorXd(D * v + sg), &kr.gd[k * n]);
    flatten(Th, &kr.theta[k * m * n]);
    flatten(v, &kr.vctrl[k * m]);

    // running cost with u = Th X + v substituted, as a quadratic in X
    const Eigen::MatrixXd Qx =
        Q + Th.transpose() * S + S.transpose() * Th + Th.transpose() * R * Th;
    const Eigen::VectorXd wx =
        S.transpose() * v + Th.transpose() * R * v + q + Th.transpose() * rho;
    flatten(symmetrized(Qx), &kr.Qt[k * n * n]);
    flatten(wx, &kr.wt[k * n]);
    kr.ct[k] = v.dot(R * v) + 2.0 * rho.dot(v);
  }
  return kr;
}

SimKernel make_closed_loop_kernel(const StackedProblem& sp, const ClosedLoopStrategy& strategy) {
  // node-aligned: use the strategy's own node values, not interpolation
  auto theta_at = [&](long k, double) { return strategy.theta[static_cast<std::size_t>(k)]; };
  auto v_at = [&](long k, double) { return strategy.v[static_cast<std::size_t>(k)]; };
  return make_kernel(sp, strategy.grid, theta_at, v_at);
}

SimKernel make_open_loop_kernel(const StackedProblem& sp, const std::vector<double>& grid,
                                const ControlFunction& u) {
  auto theta_at = [&sp](long, double) { return Eigen::MatrixXd::Zero(sp.m(), sp.n()).eval(); };
  auto v_at = [&u](long, double s) { return u(s); };
  return make_kernel(sp, grid, theta_at, v_at);
}

void check_batch(const BrownianBatch& batch) {
  if (batch.n_paths <= 0) throw std::invalid_argument("BrownianBatch: n_paths must be positive");
  if (batch.grid.size() < 2) throw std::invalid_argument("BrownianBatch: grid too small");
}

void check_grids_match(const std::vector<double>& a, const std::vector<double>& b,
                       const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": grids must match");
}

std::vector<std::vector<double>> payoffs_for_kernels(const std::vector<const SimKernel*>& kernels,
                                                     const Eigen::VectorXd& x0,
                                                     const BrownianBatch& batch, int threads) {
  check_batch(batch);
  const long K = static_cast<long>(batch.grid.size()) - 1;
  std::vector<std::vector<double>> out(kernels.size(),
                                       std::vector<double>(batch.n_paths, 0.0));
  run_over_paths(batch.n_paths, threads, [&](long p) {
    std::vector<double> dw(K);
    batch.fill_increments(p, dw.data());
    for (std::size_t ki = 0; ki < kernels.size(); ++ki) {
      out[ki][p] = kernels[ki]->payoff(dw.data(), x0.data(), nullptr, p);
    }
  });
  return out;
}

}  // namespace

std::vector<double> BrownianBatch::increments_for(long path) const {
  std::vector<double> out(grid.size() - 1);
  fill_increments(path, out.data());
  return out;
}

void BrownianBatch::fill_increments(long path, double* out) const {
  std::uint64_t s = master_seed;
  (void)splitmix64(s);  // decorrelate trivial master seeds
  s ^= 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(path + path_offset + 1);
  std::uint64_t mix = s;
  GaussianStream gauss(splitmix64(mix));
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    out[k] = std::sqrt(grid[k + 1] - grid[k]) * gauss.next();
  }
}

MCEstimate mc_estimate(const std::vector<double>& samples) {
  MCEstimate e;
  e.n_paths = static_cast<long>(samples.size());
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double x : samples) sum += x;
  e.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    const double sd = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    e.stderr_ = sd / std::sqrt(static_cast<double>(samples.size()));
  }
  return e;
}

std::vector<StatePath> simulate_closed_loop(const StackedProblem& sp,
                                            const ClosedLoopStrategy& strategy,
                                            const Eigen::VectorXd& x0,
                                            const BrownianBatch& batch, int threads) {
  check_batch(batch);
  check_grids_match(strategy.grid, batch.grid, "simulate_closed_loop");
  if (x0.size() != sp.n()) throw std::invalid_argument("simulate_closed_loop: bad x0 size");
  const SimKernel kr = make_closed_loop_kernel(sp, strategy);
  std::vector<StatePath> paths(batch.n_paths);
  const long K = static_cast<long>(batch.grid.size()) - 1;
  run_over_paths(batch.n_paths, threads, [&](long p) {
    std::vector<double> dw(K);
    batch.fill_increments(p, dw.data());
    kr.materialize(dw.data(), x0.data(), p + batch.path_offset, paths[p]);
  });
  return paths;
}

std::vector<StatePath> simulate_open_loop(const StackedProblem& sp, const ControlFunction& u,
                                          const Eigen::VectorXd& x0, const BrownianBatch& batch,
                                          int threads) {
  check_batch(batch);
  if (x0.size() != sp.n()) throw std::invalid_argument("simulate_open_loop: bad x0 size");
  const SimKernel kr = make_open_loop_kernel(sp, batch.grid, u);
  std::vector<StatePath> paths(batch.n_paths);
  const long K = static_cast<long>(batch.grid.size()) - 1;
  run_over_paths(batch.n_paths, threads, [&](long p) {
    std::vector<double> dw(K);
    batch.fill_increments(p, dw.data());
    kr.materialize(dw.data(), x0.data(), p + batch.path_offset, paths[p]);
  });
  return paths;
}

MCEstimate estimate_J(const StackedProblem& sp, const std::vector<StatePath>& paths) {
  return mc_estimate(per_path_payoffs(sp, paths));
}

std::vector<double> per_path_payoffs(const StackedProblem& sp,
                                     const std::vector<StatePath>& paths) {
  if (paths.empty()) return {};
  const auto& grid = paths.front().grid;

  // coefficient cache shared by all paths (they share one grid)
  struct Node {
    Eigen::MatrixXd Q, S, R;
    Eigen::VectorXd q, rho;
  };
  std::vector<Node> nodes(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = grid[k];
    nodes[k] = {sp.Q(s), sp.S(s), sp.R(s), sp.q(s), sp.rho(s)};
  }

  std::vector<double> payoffs(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const StatePath& path = paths[p];
    if (path.grid != grid) throw std::invalid_argument("estimate_J: paths on different grids");
    double integral = 0.0;
    double prev_l = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& nd = nodes[k];
      const auto X = path.X_at(k);
      const auto u = path.u_at(k);
      const double l = (nd.Q * X).dot(X) + 2.0 * (nd.S * X).dot(u) + (nd.R * u).dot(u) +
                       2.0 * nd.q.dot(X) + 2.0 * nd.rho.dot(u);
      if (k > 0) integral += 0.5 * (grid[k] - grid[k - 1]) * (prev_l + l);
      prev_l = l;
    }
    const auto XT = path.X_at(grid.size() - 1);
    payoffs[p] = 0.5 * ((sp.G() * XT).dot(XT) + 2.0 * sp.g().dot(XT) + integral);
  }
  return payoffs;
}

std::vector<double> closed_loop_payoffs(const StackedProblem& sp,
                                        const ClosedLoopStrategy& strategy,
                                        const Eigen::VectorXd& x0, const BrownianBatch& batch,
                                        int threads) {
  check_batch(batch);
  check_grids_match(strategy.grid, batch.grid, "closed_loop_payoffs");
  const SimKernel kr = make_closed_loop_kernel(sp, strategy);
  return payoffs_for_kernels({&kr}, x0, batch, threads)[0];
}

std::vector<double> open_loop_payoffs(const StackedProblem& sp, const ControlFunction& u,
                                      const Eigen::VectorXd& x0, const BrownianBatch& batch,
                                      int threads) {
  check_batch(batch);
  const SimKernel kr = make_open_loop_kernel(sp, batch.grid, u);
  return payoffs_for_kernels({&kr}, x0, batch, threads)[0];
}

SaddleTestReport saddle_test(const StackedProblem& sp, const RiccatiSolution& P,
                             const AdjointSolution& /*adj*/, const ClosedLoopStrategy& strategy,
                             const RegularityReport& report,
                             const std::vector<Perturbation>& perturbations,
                             const Eigen::VectorXd& x0, const BrownianBatch& batch,
                             int threads) {
  if (!report.regular) {
    throw RegularityError("saddle_test: inputs are not regular; failed: " +
                          report.failed_conditions());
  }
  check_batch(batch);
  check_grids_match(strategy.grid, batch.grid, "saddle_test");

  const SimKernel base = make_closed_loop_kernel(sp, strategy);
  std::vector<SimKernel> perturbed;
  perturbed.reserve(perturbations.size());
  for (const auto& pert : perturbations) {
    if (pert.player != 1 && pert.player != 2) {
      throw std::invalid_argument("saddle_test: player must be 1 or 2");
    }
    ClosedLoopStrategy st = strategy;
    for (std::size_t k = 0; k < st.grid.size(); ++k) {
      const Eigen::VectorXd d = pert.delta_v(st.grid[k]);
      const int mi = pert.player == 1 ? st.m1 : st.m2;
      if (d.size() != mi) {
        throw std::invalid_argument("saddle_test: perturbation has wrong control size");
      }
      if (pert.player == 1) {
        st.v[k].head(st.m1) += d;
      } else {
        st.v[k].tail(st.m2) += d;
      }
    }
    perturbed.push_back(make_closed_loop_kernel(sp, st));
  }

  std::vector<const SimKernel*> kernels{&base};
  for (const auto& kr : perturbed) kernels.push_back(&kr);
  const auto payoffs = payoffs_for_kernels(kernels, x0, batch, threads);

  SaddleTestReport out;
  out.baseline = mc_estimate(payoffs[0]);
  out.all_pass = true;
  for (std::size_t i = 0; i < perturbations.size(); ++i) {
    const auto& pert = perturbations[i];
    std::vector<double> diffs(payoffs[0].size());
    for (std::size_t p = 0; p < diffs.size(); ++p) diffs[p] = payoffs[i + 1][p] - payoffs[0][p];
    const MCEstimate gap = mc_estimate(diffs);

    // completion-of-squares prediction:
    //   +- (1/2) ∫ <(R_ii + D_i' P D_i) delta, delta> ds
    double predicted = 0.0;
    {
      double prev = 0.0;
      for (std::size_t k = 0; k < strategy.grid.size(); ++k) {
        const double s = strategy.grid[k];
        const Eigen::VectorXd d = pert.delta_v(s);
        const Eigen::MatrixXd Ps = P.at(s);
        const Eigen::MatrixXd Di =
            pert.player == 1 ? sp.problem().D1(s) : sp.problem().D2(s);
        const Eigen::MatrixXd Rii =
            pert.player == 1 ? sp.problem().R11(s) : sp.problem().R22(s);
        const double integrand = ((Rii + Di.transpose() * Ps * Di) * d).dot(d);
        if (k > 0) predicted += 0.25 * (strategy.grid[k] - strategy.grid[k - 1]) *
                                (prev + integrand);  // (1/2) * trapezoid
        prev = integrand;
      }
    }

    SaddleGap sg;
    sg.label = pert.label.empty() ? ("player-" + std::to_string(pert.player)) : pert.label;
    sg.player = pert.player;
    sg.gap = gap.mean;
    sg.stderr_ = gap.stderr_;
    sg.predicted = predicted;
    const double slack = 3.0 * gap.stderr_;
    sg.sign_ok = pert.player == 1 ? gap.mean >= -slack : gap.mean <= slack;
    sg.matches_prediction = std::abs(gap.mean - predicted) <= slack;
    out.all_pass = out.all_pass && sg.sign_ok && sg.matches_prediction;
    out.gaps.push_back(std::move(sg));
  }
  return out;
}

std::vector<double> stationarity_node_norms(const StackedProblem& sp, const RiccatiSolution& P,
                                            const AdjointSolution& adj,
                                            const ClosedLoopStrategy& strategy,
                                            const std::vector<StatePath>& paths) {
  if (paths.empty()) throw std::invalid_argument("stationarity_node_norms: no paths");
  const auto& grid = paths.front().grid;

  struct Node {
    Eigen::MatrixXd Bt, Dt, S, R;
    Eigen::VectorXd rho;
  };
  std::vector<Node> nodes(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = grid[k];
    nodes[k] = {sp.B(s).transpose(), sp.D(s).transpose(), sp.S(s), sp.R(s), sp.rho(s)};
  }

  std::vector<double> norm_sum(grid.size(), 0.0);
  for (const auto& path : paths) {
    const AdjointPath ap = adjoint_along_path(sp, P, adj, path, strategy);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& nd = nodes[k];
      const Eigen::VectorXd resid = nd.Bt * ap.Y[k] + nd.Dt * ap.Z[k] + nd.S * path.X_at(k) +
                                    nd.R * path.u_at(k) + nd.rho;
      norm_sum[k] += resid.norm();
    }
  }
  return norm_sum;
}

double stationarity_residual(const StackedProblem& sp, const RiccatiSolution& P,
                             const AdjointSolution& adj, const ClosedLoopStrategy& strategy,
                             const std::vector<StatePath>& paths) {
  const std::vector<double> sums = stationarity_node_norms(sp, P, adj, strategy, paths);
  double worst = 0.0;
  for (double v : sums) worst = std::max(worst, v / static_cast<double>(paths.size()));
  return worst;
}

std::vector<ConvexityProbeResult> convexity_probe(
    const StackedProblem& sp, int player,
    const std::vector<std::pair<std::string, std::function<Eigen::VectorXd(double)>>>& controls,
    const BrownianBatch& batch, int threads) {
  if (player != 1 && player != 2) {
    throw std::invalid_argument("convexity_probe: player must be 1 or 2");
  }
  if (player == 2 && sp.m2() == 0) {
    throw std::invalid_argument("convexity_probe: problem has no player 2");
  }
  check_batch(batch);

  // homogeneous variational dynamics: zero initial state and zero
  // inhomogeneous/linear terms, opposing player's control frozen at zero
  GameProblem hp = sp.problem();
  hp.b = MatrixFunction::zero(sp.n(), 1);
  hp.sigma = MatrixFunction::zero(sp.n(), 1);
  hp.q = MatrixFunction::zero(sp.n(), 1);
  hp.rho1 = MatrixFunction::zero(sp.m1(), 1);
  hp.rho2 = MatrixFunction::zero(sp.m2(), 1);
  hp.g = Eigen::VectorXd::Zero(sp.n());
  const StackedProblem hsp(std::move(hp));
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sp.n());
  const double sign = player == 1 ? 1.0 : -1.0;

  std::vector<ConvexityProbeResult> out;
  out.reserve(controls.size());
  for (const auto& [label, ui] : controls) {
    auto stacked = [&](double s) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(sp.m());
      const Eigen::VectorXd v = ui(s);
      if (player == 1) {
        if (v.size() != sp.m1()) throw std::invalid_argument("convexity_probe: bad control size");
        u.head(sp.m1()) = v;
      } else {
        if (v.size() != sp.m2()) throw std::invalid_argument("convexity_probe: bad control size");
        u.tail(sp.m2()) = v;
      }
      return u;
    };
    std::vector<double> payoffs = open_loop_payoffs(hsp, stacked, x0, batch, threads);
    for (double& v : payoffs) v *= sign;
    const MCEstimate e = mc_estimate(payoffs);
    ConvexityProbeResult r;
    r.label = label;
    r.estimate = e.mean;
    r.stderr_ = e.stderr_;
    r.violated = e.mean < -3.0 * e.stderr_;
    out.push_back(std::move(r));
  }
  return out;
}

DivergenceFit divergence_probe(const StackedProblem& sp, const ControlFamily& family,
                               const std::vector<double>& lambdas, const Eigen::VectorXd& x0,
                               const BrownianBatch& batch, int threads) {
  std::vector<double> distinct = lambdas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw std::invalid_argument("divergence_probe: need >= 3 distinct lambda values");
  }
  check_batch(batch);

  const std::size_t L = lambdas.size();
  std::vector<SimKernel> kernels;
  kernels.reserve(L);
  for (double lam : lambdas) {
    kernels.push_back(make_open_loop_kernel(sp, batch.grid, family(lam)));
  }
  std::vector<const SimKernel*> kptr;
  for (const auto& kr : kernels) kptr.push_back(&kr);
  const auto payoffs = payoffs_for_kernels(kptr, x0, batch, threads);

  // least-squares quadratic fit; the fit is linear in the data, so the
  // per-path fits average to the fit of the means and give the stderr
  Eigen::MatrixXd X(L, 3);
  for (std::size_t i = 0; i < L; ++i) {
    X(i, 0) = lambdas[i] * lambdas[i];
    X(i, 1) = lambdas[i];
    X(i, 2) = 1.0;
  }
  const Eigen::MatrixXd Xp = pseudo_inverse(X).pinv;  // 3 x L

  DivergenceFit fit;
  fit.lambdas = lambdas;
  std::vector<double> a_samples(payoffs[0].size(), 0.0);
  Eigen::Vector3d coef_mean = Eigen::Vector3d::Zero();
  Eigen::VectorXd j_means(L);
  for (std::size_t i = 0; i < L; ++i) {
    fit.j_estimates.push_back(mc_estimate(payoffs[i]));
    j_means(i) = fit.j_estimates.back().mean;
  }
  coef_mean = Xp * j_means;
  for (std::size_t p = 0; p < a_samples.size(); ++p) {
    double a = 0.0;
    for (std::size_t i = 0; i < L; ++i) a += Xp(0, i) * payoffs[i][p];
    a_samples[p] = a;
  }
  const MCEstimate a_est = mc_estimate(a_samples);
  fit.a = coef_mean(0);
  fit.b = coef_mean(1);
  fit.c = coef_mean(2);
  fit.a_stderr = a_est.stderr_;
  fit.diverges = fit.a > 3.0 * fit.a_stderr;
  return fit;
}

}  // namespace lqgame
