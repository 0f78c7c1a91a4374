#pragma once

#include <Eigen/Core>
#include <vector>

#include "umsa/model.hpp"

namespace umsa {

/// Second-order finite-difference solution of -h'' = f on [0, 2 pi] with
/// h(0) = h(2 pi) = 0 on 2^level uniform cells. Returns the nodal values,
/// boundaries included.
Eigen::VectorXd solve_dirichlet_poisson(const Eigen::VectorXd& forcing_at_nodes);

/// Linear interpolation of nodal values on a uniform grid over [0, 2 pi].
double interpolate_uniform(const Eigen::VectorXd& nodal, double t);

struct EllipticOptions {
  int observations = 50;
  double prior_variance = 16.0;
  int max_level = 14;
  double theta_lo = 1.0;
  double theta_hi = 1.0e4;
};

/// One-dimensional elliptic inverse problem: -h'' = X1 sin(2t) + X2 sin(t),
/// observed at J equidistant points with noise precision theta.
///
/// Latent u = (X1, X2) with prior N(0, 16 I); parameter theta is the scalar
/// noise precision. log gamma drops the -J/2 log(2 pi) and prior normalizing
/// constants at every level.
class EllipticModel final : public Model {
 public:
  explicit EllipticModel(Eigen::VectorXd data, EllipticOptions options = {});

  [[nodiscard]] std::string name() const override { return "elliptic"; }
  [[nodiscard]] int theta_dim() const override { return 1; }
  [[nodiscard]] int latent_dim() const override { return 2; }
  [[nodiscard]] ThetaBox theta_box() const override;
  [[nodiscard]] double mesh(int level) const override;

  /// values = (||y - G^l u||^2, ||u||^2).
  [[nodiscard]] ForwardResult forward(const Latent& u, int level) const override;
  [[nodiscard]] double log_gamma(const Theta& theta, const ForwardResult& fwd) const override;
  [[nodiscard]] Theta grad_theta(const Theta& theta, const ForwardResult& fwd) const override;
  [[nodiscard]] Latent sample_prior(Rng& rng) const override;
  using Model::grad_theta;
  using Model::log_gamma;

  [[nodiscard]] const Eigen::MatrixXd& forward_matrix(int level) const;
  [[nodiscard]] const Eigen::VectorXd& data() const { return data_; }
  [[nodiscard]] const Eigen::VectorXd& observation_times() const { return times_; }
  [[nodiscard]] const EllipticOptions& options() const { return options_; }
  [[nodiscard]] int max_level() const { return options_.max_level; }

  /// Closed-form posterior of u at fixed theta, using G^level.
  struct Posterior {
    Eigen::Vector2d mean;
    Eigen::Matrix2d covariance;
  };
  [[nodiscard]] Posterior posterior(double theta, int level) const;

 private:
  Eigen::VectorXd data_;
  EllipticOptions options_;
  Eigen::VectorXd times_;
  std::vector<Eigen::MatrixXd> matrices_;  // index = level
};

/// Observation times t_j = 2 pi (2j - 1) / (2J), j = 1..J.
Eigen::VectorXd elliptic_observation_times(int observations);

/// J x 2 forward matrix at level l (l >= 1) from the finite-difference solver.
Eigen::MatrixXd build_forward_matrix_elliptic(int level, const Eigen::VectorXd& times);

/// Limit matrix G_{j,1} = sin(2 t_j) / 4, G_{j,2} = sin(t_j).
Eigen::MatrixXd analytic_forward_matrix_elliptic(const Eigen::VectorXd& times);

struct EllipticData {
  Eigen::VectorXd y;
  Eigen::Vector2d x_true;
};

/// y = G^{l_data} X_true + theta_true^{-1/2} eps, X_true from the prior.
/// A non-finite theta_true gives noiseless data.
EllipticData generate_elliptic_data(double theta_true, int l_data, Rng& rng, EllipticOptions options = {});

}  // namespace umsa
