#include "umsa/sir.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "umsa/errors.hpp"
#include "umsa/rk4.hpp"

namespace umsa {

namespace {

SirState rhs(const SirState& s, const Latent& x, const SirOptions& opt) {
  const double a = opt.transmission;
  const double b = opt.recovery;
  const double si = s(0) * s(1);
  SirState d;
  d(0) = -a * si - x(0) * s(0);
  d(1) = a * si - (b + x(0) + x(1)) * s(1);
  d(2) = b * s(1) + x(0) * s(0);
  d(3) = (x(0) + x(1)) * s(1);
  d(4) = a * si;
  return d;
}

// Walks the level grid from -x3 to `horizon`, calling observe(k, t, state) at
// the start and at every grid node k (time k / steps_per_day). Day boundaries
// are the nodes with k % steps_per_day == 0.
template <class Observer>
void integrate(const Latent& x, int level, const SirOptions& opt, double horizon, Observer&& observe) {
  const long spd = sir_steps_per_day(level);
  const double dt = 1.0 / static_cast<double>(spd);
  const double t0 = -x(2);
  const auto f = [&](double, const SirState& s) { return rhs(s, x, opt); };

  SirState state;
  state << 1.0 - 1.0 / opt.population, 1.0 / opt.population, 0.0, 0.0, 0.0;

  long k = static_cast<long>(std::ceil(t0 * static_cast<double>(spd)));
  const double first = static_cast<double>(k) / static_cast<double>(spd) - t0;
  if (first > 0.0) {
    observe(k - 1, t0, state);
    state = rk4_step(f, t0, state, first);
  }
  observe(k, static_cast<double>(k) / static_cast<double>(spd), state);
  const long k_end = static_cast<long>(std::llround(horizon * static_cast<double>(spd)));
  for (; k < k_end; ++k) {
    state = rk4_step(f, static_cast<double>(k) * dt, state, dt);
    if (!state.allFinite()) throw RunError("sir integration: non-finite state");
    observe(k + 1, static_cast<double>(k + 1) / static_cast<double>(spd), state);
  }
}

double default_horizon(const SirOptions& opt) { return static_cast<double>(opt.observation_offset + opt.observations); }

Eigen::VectorXd infections_from(const std::vector<double>& cumulative_at_days) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(cumulative_at_days.size()) - 1);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g(i) = cumulative_at_days[static_cast<std::size_t>(i) + 1] - cumulative_at_days[static_cast<std::size_t>(i)];
  }
  return g;
}

}  // namespace

long sir_steps_per_day(int level) {
  if (level < 0 || level > 20) throw DomainError("sir: level must lie in [0, 20]");
  return 10L << level;
}

Eigen::VectorXd sir_infections(const Latent& x, int level, const SirOptions& opt) {
  const long spd = sir_steps_per_day(level);
  const long first_day = opt.observation_offset;
  std::vector<double> cumulative;
  cumulative.reserve(static_cast<std::size_t>(opt.observations) + 1);
  integrate(x, level, opt, default_horizon(opt), [&](long k, double, const SirState& s) {
    if (k >= first_day * spd && k % spd == 0) cumulative.push_back(s(4));
  });
  return infections_from(cumulative);
}

Trajectory rk4_integrate(const Latent& x, int level, const SirOptions& opt, double horizon) {
  if (horizon < 0.0) horizon = default_horizon(opt);
  if (horizon < default_horizon(opt)) throw DomainError("rk4_integrate: horizon shorter than the observation window");
  if (x.size() != 3) throw DomainError("rk4_integrate: latent state must have 3 coordinates");
  if (-x(2) >= static_cast<double>(opt.observation_offset)) {
    throw DomainError("rk4_integrate: seeding time must precede the observation window");
  }
  const long spd = sir_steps_per_day(level);
  const long first_day = opt.observation_offset;
  const long last_day = opt.observation_offset + opt.observations;
  Trajectory traj;
  traj.step = 1.0 / static_cast<double>(spd);
  std::vector<double> cumulative;
  integrate(x, level, opt, horizon, [&](long k, double t, const SirState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    if (k >= first_day * spd && k <= last_day * spd && k % spd == 0) cumulative.push_back(s(4));
  });
  traj.infections = infections_from(cumulative);
  return traj;
}

SirModel::SirModel(Eigen::VectorXd data, SirOptions options) : data_{std::move(data)}, options_{options} {
  if (data_.size() != options_.observations) {
    throw ConfigError("sir model: data has " + std::to_string(data_.size()) + " entries, expected " +
                      std::to_string(options_.observations));
  }
  if (!(data_.array() > 0.0).all()) throw ConfigError("sir model: observations must be positive");
  if (!(options_.population > 1.0)) throw ConfigError("sir model: population must exceed 1");
  if (options_.observation_offset < 0 || options_.observations < 1) throw ConfigError("sir model: bad observation window");
  if (!(options_.prior_lo.array() < options_.prior_hi.array()).all()) throw ConfigError("sir model: empty prior box");
  if (!(options_.prior_hi(2) < 0.0 || -options_.prior_hi(2) < options_.observation_offset)) {
    throw ConfigError("sir model: seeding must precede the observation window");
  }
  if (!(options_.theta_lo > 0.0 && options_.theta_hi > options_.theta_lo)) {
    throw ConfigError("sir model: theta box must satisfy 0 < lo < hi");
  }
}

ThetaBox SirModel::theta_box() const {
  return {Theta::Constant(2, options_.theta_lo), Theta::Constant(2, options_.theta_hi)};
}

double SirModel::mesh(int level) const { return 0.1 * std::ldexp(1.0, -level); }

bool SirModel::in_prior_box(const Latent& x) const {
  return (x.array() >= options_.prior_lo.array()).all() && (x.array() <= options_.prior_hi.array()).all();
}

ForwardResult SirModel::forward(const Latent& x, int level) const {
  ForwardResult out;
  if (!in_prior_box(x)) {
    out.admissible = false;
    return out;
  }
  out.values = sir_infections(x, level, options_);
  out.admissible = (out.values.array() > data_.array()).all();
  return out;
}

double SirModel::log_gamma(const Theta& theta, const ForwardResult& fwd) const {
  const double shape = theta(0);
  const double scale = theta(1);
  if (!(shape > 0.0 && scale > 0.0)) throw DomainError("sir model: theta must lie in the positive quadrant");
  if (!fwd.admissible) return -std::numeric_limits<double>::infinity();
  const double norm = -std::lgamma(shape) - shape * std::log(scale);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    const double z = std::log(fwd.values(i) / data_(i));
    if (!(z > 0.0)) return -std::numeric_limits<double>::infinity();
    total += norm + (shape - 1.0) * std::log(z) - z / scale;
  }
  return total;
}

Theta SirModel::grad_theta(const Theta& theta, const ForwardResult& fwd) const {
  const double shape = theta(0);
  const double scale = theta(1);
  if (!(shape > 0.0 && scale > 0.0)) throw DomainError("sir model: theta must lie in the positive quadrant");
  if (!fwd.admissible) throw UndefinedGradientError("sir model: gradient requested at an inadmissible state");
  const double psi = boost::math::digamma(shape);
  const double log_scale = std::log(scale);
  Theta g = Theta::Zero(2);
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    const double z = std::log(fwd.values(i) / data_(i));
    if (!(z > 0.0)) throw UndefinedGradientError("sir model: gradient requested at an inadmissible state");
    g(0) += -psi - log_scale + std::log(z);
    g(1) += -shape / scale + z / (scale * scale);
  }
  return g;
}

Latent SirModel::sample_prior(Rng& rng) const {
  Latent x(3);
  for (int k = 0; k < 3; ++k) x(k) = options_.prior_lo(k) + (options_.prior_hi(k) - options_.prior_lo(k)) * rng.uniform();
  return x;
}

SirData generate_sir_data(const Theta& theta_true, int l_data, Rng& rng, const SirOptions& options) {
  if (theta_true.size() != 2 || !(theta_true.array() > 0.0).all()) {
    throw DomainError("sir data: theta_true must be a positive 2-vector");
  }
  SirData out;
  for (int k = 0; k < 3; ++k) {
    out.x_true(k) = options.prior_lo(k) + (options.prior_hi(k) - options.prior_lo(k)) * rng.uniform();
  }
  const Eigen::VectorXd g = sir_infections(out.x_true, l_data, options);
  std::gamma_distribution<double> gamma(theta_true(0), theta_true(1));
  out.y.resize(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) out.y(i) = g(i) * std::exp(-gamma(rng.engine()));
  return out;
}

}  // namespace umsa
