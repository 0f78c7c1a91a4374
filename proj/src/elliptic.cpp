#include "umsa/elliptic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "umsa/errors.hpp"

namespace umsa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

Eigen::VectorXd solve_dirichlet_poisson(const Eigen::VectorXd& forcing) {
  const Eigen::Index nodes = forcing.size();
  if (nodes < 3) throw DomainError("poisson solve: need at least one interior node");
  const Eigen::Index cells = nodes - 1;
  const Eigen::Index m = cells - 1;  // interior unknowns
  const double h = kTwoPi / static_cast<double>(cells);

  // Thomas algorithm for tridiag(-1, 2, -1) h = dx^2 f.
  Eigen::VectorXd c(m);
  Eigen::VectorXd d(m);
  double denom = 2.0;
  c(0) = -1.0 / denom;
  d(0) = h * h * forcing(1) / denom;
  for (Eigen::Index i = 1; i < m; ++i) {
    denom = 2.0 + c(i - 1);
    if (denom == 0.0) throw RunError("poisson solve: singular tridiagonal system");
    c(i) = -1.0 / denom;
    d(i) = (h * h * forcing(i + 1) + d(i - 1)) / denom;
  }
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(nodes);
  sol(m) = d(m - 1);
  for (Eigen::Index i = m - 2; i >= 0; --i) sol(i + 1) = d(i) - c(i) * sol(i + 2);
  return sol;
}

double interpolate_uniform(const Eigen::VectorXd& nodal, double t) {
  const Eigen::Index cells = nodal.size() - 1;
  const double h = kTwoPi / static_cast<double>(cells);
  const double s = t / h;
  auto k = static_cast<Eigen::Index>(std::floor(s));
  if (k < 0) k = 0;
  if (k >= cells) k = cells - 1;
  const double w = s - static_cast<double>(k);
  return (1.0 - w) * nodal(k) + w * nodal(k + 1);
}

Eigen::VectorXd elliptic_observation_times(int observations) {
  Eigen::VectorXd t(observations);
  for (int j = 1; j <= observations; ++j) t(j - 1) = kTwoPi * (2.0 * j - 1.0) / (2.0 * observations);
  return t;
}

Eigen::MatrixXd build_forward_matrix_elliptic(int level, const Eigen::VectorXd& times) {
  if (level < 1 || level > 30) throw DomainError("elliptic forward matrix: level must lie in [1, 30]");
  const Eigen::Index cells = Eigen::Index{1} << level;
  const double h = kTwoPi / static_cast<double>(cells);
  Eigen::VectorXd f1(cells + 1);
  Eigen::VectorXd f2(cells + 1);
  for (Eigen::Index i = 0; i <= cells; ++i) {
    const double t = h * static_cast<double>(i);
    f1(i) = std::sin(2.0 * t);
    f2(i) = std::sin(t);
  }
  const Eigen::VectorXd h1 = solve_dirichlet_poisson(f1);
  const Eigen::VectorXd h2 = solve_dirichlet_poisson(f2);
  Eigen::MatrixXd g(times.size(), 2);
  for (Eigen::Index j = 0; j < times.size(); ++j) {
    g(j, 0) = interpolate_uniform(h1, times(j));
    g(j, 1) = interpolate_uniform(h2, times(j));
  }
  return g;
}

Eigen::MatrixXd analytic_forward_matrix_elliptic(const Eigen::VectorXd& times) {
  Eigen::MatrixXd g(times.size(), 2);
  g.col(0) = 0.25 * (2.0 * times.array()).sin();
  g.col(1) = times.array().sin();
  return g;
}

EllipticModel::EllipticModel(Eigen::VectorXd data, EllipticOptions options)
    : data_{std::move(data)}, options_{options}, times_{elliptic_observation_times(options.observations)} {
  if (options_.observations < 1) throw ConfigError("elliptic model: need at least one observation");
  if (data_.size() != options_.observations) {
    throw ConfigError("elliptic model: data has " + std::to_string(data_.size()) + " entries, expected " +
                      std::to_string(options_.observations));
  }
  if (!(options_.prior_variance > 0.0)) throw ConfigError("elliptic model: prior variance must be positive");
  if (options_.max_level < 1 || options_.max_level > 24) throw ConfigError("elliptic model: max_level must lie in [1, 24]");
  if (!(options_.theta_lo > 0.0 && options_.theta_hi > options_.theta_lo)) {
    throw ConfigError("elliptic model: theta box must satisfy 0 < lo < hi");
  }
  matrices_.resize(static_cast<std::size_t>(options_.max_level) + 1);
  for (int l = 1; l <= options_.max_level; ++l) {
    matrices_[static_cast<std::size_t>(l)] = build_forward_matrix_elliptic(l, times_);
  }
}

ThetaBox EllipticModel::theta_box() const {
  return {Theta::Constant(1, options_.theta_lo), Theta::Constant(1, options_.theta_hi)};
}

double EllipticModel::mesh(int level) const { return kTwoPi * std::ldexp(1.0, -level); }

const Eigen::MatrixXd& EllipticModel::forward_matrix(int level) const {
  if (level < 1 || level > options_.max_level) {
    throw DomainError("elliptic model: level " + std::to_string(level) + " outside [1, " +
                      std::to_string(options_.max_level) + "]");
  }
  return matrices_[static_cast<std::size_t>(level)];
}

ForwardResult EllipticModel::forward(const Latent& u, int level) const {
  const Eigen::MatrixXd& g = forward_matrix(level);
  ForwardResult out;
  out.values.resize(2);
  out.values(0) = (data_ - g * u).squaredNorm();
  out.values(1) = u.squaredNorm();
  return out;
}

double EllipticModel::log_gamma(const Theta& theta, const ForwardResult& fwd) const {
  const double th = theta(0);
  if (!(th > 0.0)) throw DomainError("elliptic model: theta must be positive");
  const double j = static_cast<double>(options_.observations);
  return 0.5 * j * std::log(th) - 0.5 * th * fwd.values(0) - 0.5 * fwd.values(1) / options_.prior_variance;
}

Theta EllipticModel::grad_theta(const Theta& theta, const ForwardResult& fwd) const {
  const double th = theta(0);
  if (!(th > 0.0)) throw DomainError("elliptic model: theta must be positive");
  const double j = static_cast<double>(options_.observations);
  return Theta::Constant(1, 0.5 * j / th - 0.5 * fwd.values(0));
}

Latent EllipticModel::sample_prior(Rng& rng) const {
  const double sd = std::sqrt(options_.prior_variance);
  Latent u(2);
  u(0) = sd * rng.normal();
  u(1) = sd * rng.normal();
  return u;
}

EllipticModel::Posterior EllipticModel::posterior(double theta, int level) const {
  const Eigen::MatrixXd& g = forward_matrix(level);
  const Eigen::Matrix2d precision =
      theta * (g.transpose() * g) + Eigen::Matrix2d::Identity() / options_.prior_variance;
  Posterior post;
  post.covariance = precision.inverse();
  post.mean = theta * post.covariance * (g.transpose() * data_);
  return post;
}

EllipticData generate_elliptic_data(double theta_true, int l_data, Rng& rng, EllipticOptions options) {
  if (!(theta_true > 0.0)) throw DomainError("elliptic data: theta_true must be positive");
  const Eigen::VectorXd times = elliptic_observation_times(options.observations);
  const Eigen::MatrixXd g = build_forward_matrix_elliptic(l_data, times);
  EllipticData out;
  const double sd = std::sqrt(options.prior_variance);
  out.x_true(0) = sd * rng.normal();
  out.x_true(1) = sd * rng.normal();
  out.y = g * out.x_true;
  const double noise_sd = std::isfinite(theta_true) ? 1.0 / std::sqrt(theta_true) : 0.0;
  for (Eigen::Index j = 0; j < out.y.size(); ++j) {
    const double eps = rng.normal();
    out.y(j) += noise_sd * eps;
  }
  return out;
}

}  // namespace umsa
