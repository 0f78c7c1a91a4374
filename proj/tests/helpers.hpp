#pragma once

#include <cmath>

#include "umsa/elliptic.hpp"
#include "umsa/kernels.hpp"
#include "umsa/model.hpp"

namespace umsa::testing {

/// Elliptic model on data simulated at theta = 100, level 12.
inline EllipticModel elliptic_fixture(std::uint64_t seed = 3) {
  Rng rng{seed};
  return EllipticModel(generate_elliptic_data(100.0, 12, rng).y);
}

/// Delegates to another model with the level pinned, so (l, l - 1) share one target.
class PinnedLevel final : public Model {
 public:
  PinnedLevel(const Model& inner, int level) : inner_{inner}, level_{level} {}
  std::string name() const override { return inner_.name(); }
  int theta_dim() const override { return inner_.theta_dim(); }
  int latent_dim() const override { return inner_.latent_dim(); }
  ThetaBox theta_box() const override { return inner_.theta_box(); }
  double mesh(int) const override { return inner_.mesh(level_); }
  ForwardResult forward(const Latent& u, int) const override { return inner_.forward(u, level_); }
  double log_gamma(const Theta& t, const ForwardResult& f) const override { return inner_.log_gamma(t, f); }
  Theta grad_theta(const Theta& t, const ForwardResult& f) const override { return inner_.grad_theta(t, f); }
  Latent sample_prior(Rng& rng) const override { return inner_.sample_prior(rng); }

 private:
  const Model& inner_;
  int level_;
};

/// Prior-only target N(0, 16 I) on R^2 with a constant theta-gradient.
class ConstantGradientModel final : public Model {
 public:
  explicit ConstantGradientModel(double gradient = 2.0, double lo = -1e9, double hi = 1e9)
      : gradient_{gradient}, lo_{lo}, hi_{hi} {}
  std::string name() const override { return "constant"; }
  int theta_dim() const override { return 1; }
  int latent_dim() const override { return 2; }
  ThetaBox theta_box() const override { return {Theta::Constant(1, lo_), Theta::Constant(1, hi_)}; }
  double mesh(int level) const override { return std::ldexp(1.0, -level); }
  ForwardResult forward(const Latent& u, int) const override { return {u, true}; }
  double log_gamma(const Theta&, const ForwardResult& f) const override { return -f.values.squaredNorm() / 32.0; }
  Theta grad_theta(const Theta&, const ForwardResult&) const override { return Theta::Constant(1, gradient_); }
  Latent sample_prior(Rng& rng) const override { return 4.0 * standard_normal(2, rng); }

 private:
  double gradient_;
  double lo_;
  double hi_;
};

}  // namespace umsa::testing
