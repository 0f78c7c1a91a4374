#include "umsa/harness.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <ostream>

#include "umsa/errors.hpp"

namespace umsa {

ArgmaxResult golden_section_argmax(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("golden section: need 0 < lo < hi");
  const double a0 = std::log(lo);
  const double b0 = std::log(hi);
  const auto g = [&](double s) { return f(std::exp(s)); };

  constexpr int kScan = 200;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double v = g(a0 + (b0 - a0) * i / kScan);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = a0 + (b0 - a0) * std::max(best - 1, 0) / kScan;
  double b = a0 + (b0 - a0) * std::min(best + 1, kScan) / kScan;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = g(c);
  double fd = g(d);
  while (b - a > rel_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = g(d);
    }
  }
  ArgmaxResult out;
  const double s = 0.5 * (a + b);
  out.argmax = std::exp(s);
  out.value = g(s);
  // Compare against the endpoints too; the scan bracket can touch them.
  for (double edge : {a0, b0}) {
    const double v = g(edge);
    if (v > out.value) {
      out.value = v;
      out.argmax = std::exp(edge);
    }
  }
  out.at_boundary = std::abs(std::log(out.argmax) - a0) < 10 * rel_tol || std::abs(std::log(out.argmax) - b0) < 10 * rel_tol;
  return out;
}

namespace {

// Covariance theta^{-1} I + v G G^T has eigenvalues theta^{-1} + v s_k^2 on
// the left singular vectors of G and theta^{-1} on their complement.
struct MarginalSpectrum {
  Eigen::VectorXd lift;  // v s_k^2
  Eigen::VectorXd proj;  // U^T y
  double residual_sq = 0.0;
  double complement_dim = 0.0;
  double j = 0.0;

  MarginalSpectrum(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double prior_var) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU);
    lift = prior_var * svd.singularValues().array().square().matrix();
    proj = svd.matrixU().transpose() * y;
    residual_sq = std::max(0.0, y.squaredNorm() - proj.squaredNorm());
    j = static_cast<double>(y.size());
    complement_dim = j - static_cast<double>(lift.size());
  }

  [[nodiscard]] double log_density(double theta) const {
    const double inv_theta = 1.0 / theta;
    double log_det = complement_dim * std::log(inv_theta);
    double quad = residual_sq * theta;
    for (Eigen::Index k = 0; k < lift.size(); ++k) {
      const double lam = inv_theta + lift(k);
      log_det += std::log(lam);
      quad += proj(k) * proj(k) / lam;
    }
    return -0.5 * (log_det + quad + j * std::log(2.0 * std::numbers::pi));
  }

  /// d/d(log theta) of log_density.
  [[nodiscard]] double log_derivative(double theta) const {
    const double inv_theta = 1.0 / theta;
    double acc = complement_dim * theta - residual_sq * theta * theta;
    for (Eigen::Index k = 0; k < lift.size(); ++k) {
      const double lam = inv_theta + lift(k);
      acc += 1.0 / lam - proj(k) * proj(k) / (lam * lam);
    }
    return 0.5 * acc / theta;
  }
};

}  // namespace

double elliptic_log_marginal(double theta, const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double prior_var) {
  return MarginalSpectrum(g, y, prior_var).log_density(theta);
}

ArgmaxResult oracle_theta_star(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double prior_var, double lo,
                               double hi) {
  const MarginalSpectrum spectrum(g, y, prior_var);
  ArgmaxResult r = golden_section_argmax([&](double th) { return spectrum.log_density(th); }, lo, hi);
  if (r.at_boundary) return r;
  // Comparing values stalls near sqrt(machine eps); polish on the sign of the derivative.
  double a = std::max(std::log(lo), std::log(r.argmax) - 1e-4);
  double b = std::min(std::log(hi), std::log(r.argmax) + 1e-4);
  if (!(spectrum.log_derivative(std::exp(a)) > 0.0 && spectrum.log_derivative(std::exp(b)) < 0.0)) return r;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    (spectrum.log_derivative(std::exp(m)) > 0.0 ? a : b) = m;
  }
  r.argmax = std::exp(0.5 * (a + b));
  r.value = spectrum.log_density(r.argmax);
  return r;
}

ArgmaxResult oracle_theta_star_elliptic(const EllipticModel& model, int level) {
  const auto& opt = model.options();
  return oracle_theta_star(model.forward_matrix(level), model.data(), opt.prior_variance, opt.theta_lo, opt.theta_hi);
}

ArgmaxResult oracle_theta_star_elliptic_exact(const EllipticModel& model) {
  const auto& opt = model.options();
  return oracle_theta_star(analytic_forward_matrix_elliptic(model.observation_times()), model.data(),
                           opt.prior_variance, opt.theta_lo, opt.theta_hi);
}

Theta mse(std::span<const Theta> estimates, const Theta& reference) {
  if (estimates.empty()) throw ConfigError("mse: no estimates");
  Theta acc = Theta::Zero(reference.size());
  for (const Theta& e : estimates) acc += (e - reference).array().square().matrix();
  return acc / static_cast<double>(estimates.size());
}

std::vector<ConvergenceRow> forward_convergence_table(std::span<const int> levels, const Eigen::Vector2d& probe) {
  const auto solve = [&](int level) {
    const Eigen::Index cells = Eigen::Index{1} << level;
    const double h = 2.0 * std::numbers::pi / static_cast<double>(cells);
    Eigen::VectorXd f(cells + 1);
    for (Eigen::Index i = 0; i <= cells; ++i) {
      const double t = h * static_cast<double>(i);
      f(i) = probe(0) * std::sin(2.0 * t) + probe(1) * std::sin(t);
    }
    return solve_dirichlet_poisson(f);
  };
  std::vector<ConvergenceRow> rows;
  for (int l : levels) {
    if (l < 2) throw DomainError("forward convergence: levels must be at least 2");
    const Eigen::VectorXd fine = solve(l);
    const Eigen::VectorXd coarse = solve(l - 1);
    const double h_coarse = 2.0 * std::numbers::pi * std::ldexp(1.0, -(l - 1));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < coarse.size(); ++i) {
      const double d = fine(2 * i) - coarse(i);
      acc += d * d;
    }
    rows.push_back({l, h_coarse * acc});
  }
  return rows;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ConfigError("loglog slope: need at least two paired points");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double convergence_order(std::span<const ConvergenceRow> rows) {
  std::vector<double> mesh;
  std::vector<double> diff;
  for (const auto& r : rows) {
    mesh.push_back(2.0 * std::numbers::pi * std::ldexp(1.0, -r.level));
    diff.push_back(r.diff_sq);
  }
  return 0.5 * loglog_slope(mesh, diff);
}

std::vector<SweepRow> run_sweep(const Model& model, const ExperimentPlan& plan) {
  if (plan.m_grid.empty()) throw ConfigError("sweep: empty M grid");
  for (std::size_t i = 1; i < plan.m_grid.size(); ++i) {
    if (plan.m_grid[i] <= plan.m_grid[i - 1]) throw ConfigError("sweep: M grid must be strictly increasing");
  }
  if (plan.repetitions < 2) throw ConfigError("sweep: need at least two repetitions");
  if (plan.reference.size() != model.theta_dim()) throw ConfigError("sweep: reference has the wrong dimension");

  const SeedPlan seeds{plan.master_seed};
  std::vector<SweepRow> rows;
  for (std::int64_t m : plan.m_grid) {
    std::vector<Theta> means;
    SweepRow row;
    row.m = m;
    for (int r = 0; r < plan.repetitions; ++r) {
      const auto seed = seeds.child_seed(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(r));
      AveragedEstimate est = averaged_estimate(model, plan.config, m, seed, plan.threads);
      means.push_back(std::move(est.mean));
      row.cost += est.total_cost;
      row.seconds_mean += est.seconds;
    }
    row.cost /= plan.repetitions;
    row.seconds_mean /= plan.repetitions;
    row.mse = mse(means, plan.reference);
    rows.push_back(std::move(row));
  }
  return rows;
}

Theta msa_reference(const Model& model, const MsaConfig& config, std::uint64_t seed) {
  Rng rng{seed};
  return run_msa(model, config, rng).tail_mean;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  const auto dim = rows.empty() ? 0 : rows.front().mse.size();
  out << "M,cost,seconds_mean";
  for (Eigen::Index k = 1; k <= dim; ++k) out << ",mse_" << k;
  out << '\n';
  out.precision(17);
  for (const auto& r : rows) {
    out << r.m << ',' << r.cost << ',' << r.seconds_mean;
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << r.mse(k);
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
  out << "l,diff_sq\n";
  out.precision(17);
  for (const auto& r : rows) out << r.level << ',' << r.diff_sq << '\n';
}

}  // namespace umsa
