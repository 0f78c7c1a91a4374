#pragma once

#include <Eigen/Core>
#include <string>

#include "umsa/rng.hpp"

namespace umsa {

using Theta = Eigen::VectorXd;
using Latent = Eigen::VectorXd;

/// Admissible parameter box [lo, hi] per coordinate.
struct ThetaBox {
  Theta lo;
  Theta hi;

  [[nodiscard]] bool contains(const Theta& theta) const {
    return (theta.array() >= lo.array()).all() && (theta.array() <= hi.array()).all();
  }
  [[nodiscard]] Theta clamp(const Theta& theta) const { return theta.cwiseMax(lo).cwiseMin(hi); }
};

/// theta-independent summary of one forward solve at (u, l).
///
/// Both models factor as log gamma_theta^l(u) = f(theta, forward(u, l)), so a
/// chain can re-evaluate its density after a parameter update without solving
/// the forward problem again.
struct ForwardResult {
  Eigen::VectorXd values;
  bool admissible = true;
};

/// Discretized target gamma_theta^l(u) = p_theta(y | u) p_theta(u) at level l.
class Model {
 public:
  virtual ~Model() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual int theta_dim() const = 0;
  [[nodiscard]] virtual int latent_dim() const = 0;
  [[nodiscard]] virtual ThetaBox theta_box() const = 0;

  /// Mesh width Delta_l.
  [[nodiscard]] virtual double mesh(int level) const = 0;

  [[nodiscard]] virtual ForwardResult forward(const Latent& u, int level) const = 0;
  [[nodiscard]] virtual double log_gamma(const Theta& theta, const ForwardResult& fwd) const = 0;
  [[nodiscard]] virtual Theta grad_theta(const Theta& theta, const ForwardResult& fwd) const = 0;

  [[nodiscard]] virtual Latent sample_prior(Rng& rng) const = 0;

  [[nodiscard]] double log_gamma(const Theta& theta, const Latent& u, int level) const {
    return log_gamma(theta, forward(u, level));
  }
  [[nodiscard]] Theta grad_theta(const Theta& theta, const Latent& u, int level) const {
    return grad_theta(theta, forward(u, level));
  }

  /// Cost of one MH step at this level, Delta_l^{-omega}.
  [[nodiscard]] double step_cost(int level, double omega) const;
};

}  // namespace umsa
