#pragma once

#include <Eigen/Core>
#include <vector>

#include "umsa/model.hpp"

namespace umsa {

struct SirOptions {
  double transmission = 0.6;  // a
  double recovery = 0.1;      // b
  double population = 66'650'000.0;
  int observation_offset = 19;  // days from t = 0 to the first observed day
  int observations = 40;        // P
  Eigen::Vector3d prior_lo{0.001, 0.2, 5.0};
  Eigen::Vector3d prior_hi{0.003, 0.4, 25.0};
  double theta_lo = 0.05;
  double theta_hi = 50.0;
};

/// (S, I, R, Xi, h) where h is the running integral of a S I.
using SirState = Eigen::Matrix<double, 5, 1>;

/// Full RK4 solution on the level grid, for inspection and plotting.
struct Trajectory {
  std::vector<double> times;
  std::vector<SirState> states;
  Eigen::VectorXd infections;  // G_i, i = 1..P
  double step = 0.0;           // Delta_l
};

/// Compartmental model with quarantine; x = (x1, x2, x3) with x3 the seeding
/// lead time, observed through daily new infections with gamma-distributed
/// log under-reporting of shape theta1 and scale theta2.
class SirModel final : public Model {
 public:
  explicit SirModel(Eigen::VectorXd data, SirOptions options = {});

  [[nodiscard]] std::string name() const override { return "sir"; }
  [[nodiscard]] int theta_dim() const override { return 2; }
  [[nodiscard]] int latent_dim() const override { return 3; }
  [[nodiscard]] ThetaBox theta_box() const override;
  [[nodiscard]] double mesh(int level) const override;

  /// values = G^l(x); not admissible when x leaves the prior box or some
  /// G_i <= y_i.
  [[nodiscard]] ForwardResult forward(const Latent& x, int level) const override;
  [[nodiscard]] double log_gamma(const Theta& theta, const ForwardResult& fwd) const override;
  [[nodiscard]] Theta grad_theta(const Theta& theta, const ForwardResult& fwd) const override;
  [[nodiscard]] Latent sample_prior(Rng& rng) const override;
  using Model::grad_theta;
  using Model::log_gamma;

  [[nodiscard]] const Eigen::VectorXd& data() const { return data_; }
  [[nodiscard]] const SirOptions& options() const { return options_; }
  [[nodiscard]] bool in_prior_box(const Latent& x) const;

 private:
  Eigen::VectorXd data_;
  SirOptions options_;
};

/// Number of grid steps per day at level l (Delta_l = 0.1 * 2^{-l}).
long sir_steps_per_day(int level);

/// Integrates from t = -x3 to the end of the observation window; the first
/// step is shortened so that all later nodes fall on multiples of Delta_l.
Trajectory rk4_integrate(const Latent& x, int level, const SirOptions& options, double horizon = -1.0);

/// G_i^l(x) without storing the trajectory.
Eigen::VectorXd sir_infections(const Latent& x, int level, const SirOptions& options);

/// y_i = G_i^{l_data}(x_true) exp(-Gamma_i), Gamma_i ~ Gamma(shape theta1, scale theta2).
struct SirData {
  Eigen::VectorXd y;
  Eigen::Vector3d x_true;
};
SirData generate_sir_data(const Theta& theta_true, int l_data, Rng& rng, const SirOptions& options = {});

}  // namespace umsa
