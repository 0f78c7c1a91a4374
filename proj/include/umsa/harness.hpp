#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "umsa/elliptic.hpp"
#include "umsa/estimator.hpp"

namespace umsa {

/// Maximizer of a unimodal function on [lo, hi] by golden-section search in
/// log coordinates, after a coarse log-spaced scan to bracket the peak.
struct ArgmaxResult {
  double argmax = 0.0;
  double value = 0.0;
  bool at_boundary = false;
};
ArgmaxResult golden_section_argmax(const std::function<double(double)>& f, double lo, double hi,
                                   double rel_tol = 1e-10);

/// log N(y; 0, theta^{-1} I + prior_var G G^T).
double elliptic_log_marginal(double theta, const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double prior_var);

/// argmax over theta in [lo, hi] of the Gaussian marginal likelihood of y under forward matrix G.
ArgmaxResult oracle_theta_star(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double prior_var, double lo,
                               double hi);

/// theta^{l,*} for the model's data at `level`.
ArgmaxResult oracle_theta_star_elliptic(const EllipticModel& model, int level);
/// theta^* with the analytic forward map.
ArgmaxResult oracle_theta_star_elliptic_exact(const EllipticModel& model);

/// Coordinatewise mean squared deviation of the estimates from `reference`.
Theta mse(std::span<const Theta> estimates, const Theta& reference);

struct ConvergenceRow {
  int level = 0;
  double diff_sq = 0.0;
};

/// Discrete L2 distance squared, on the coarser grid, between the
/// finite-difference solutions at levels l and l-1 for forcing
/// probe(0) sin(2t) + probe(1) sin(t).
std::vector<ConvergenceRow> forward_convergence_table(std::span<const int> levels,
                                                      const Eigen::Vector2d& probe = Eigen::Vector2d(1.0, 1.0));

/// Least-squares slope of log(ys) against log(xs).
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// Observed convergence order in Delta_l = 2 pi 2^{-l}: half the log-log
/// slope of diff_sq against Delta_l.
double convergence_order(std::span<const ConvergenceRow> rows);

struct ExperimentPlan {
  UmsaConfig config;
  std::vector<std::int64_t> m_grid;
  int repetitions = 50;
  std::uint64_t master_seed = 0;
  Theta reference;
  int threads = 1;
};

struct SweepRow {
  std::int64_t m = 0;
  Theta mse;
  double cost = 0.0;          // mean over repetitions of the total cost of one averaged estimate
  double seconds_mean = 0.0;  // mean wall time of one averaged estimate
};

std::vector<SweepRow> run_sweep(const Model& model, const ExperimentPlan& plan);

/// Reference parameter from one long fixed-level MSA run (mean of the second half).
Theta msa_reference(const Model& model, const MsaConfig& config, std::uint64_t seed);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

}  // namespace umsa
