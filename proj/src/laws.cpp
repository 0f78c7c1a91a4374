#include "umsa/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "umsa/errors.hpp"

namespace umsa {

StepSchedule::StepSchedule(double phi0, double n0, double exponent)
    : phi0_{phi0}, n0_{n0}, exponent_{exponent} {
  if (!(phi0 > 0.0)) throw ConfigError("step schedule: phi0 must be positive");
  if (!(n0 >= 0.0)) throw ConfigError("step schedule: n0 must be nonnegative");
  if (!(exponent > 0.5 && exponent <= 1.0)) throw ConfigError("step schedule: exponent must lie in (0.5, 1]");
}

double StepSchedule::operator()(std::int64_t n) const {
  if (phi0_ == 0.0) return 0.0;
  const double base = static_cast<double>(n) + n0_;
  return exponent_ == 1.0 ? phi0_ / base : phi0_ / std::pow(base, exponent_);
}

namespace {

void check_pmf(std::span<const double> pmf) {
  if (pmf.empty()) throw ConfigError("categorical law: empty support");
  double total = 0.0;
  for (double w : pmf) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("categorical law: negative or non-finite mass");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("categorical law: masses sum to " + std::to_string(total));
}

}  // namespace

DiscreteLaw::DiscreteLaw(int offset, std::vector<double> weights) : offset_{offset}, pmf_{std::move(weights)} {
  if (pmf_.empty()) throw ConfigError("discrete law: empty support");
  const double total = std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) throw ConfigError("discrete law: weights must have positive finite sum");
  for (double& w : pmf_) {
    if (!(w > 0.0)) throw ConfigError("discrete law: weights must be positive on the support");
    w /= total;
  }
  cdf_.resize(pmf_.size());
  std::partial_sum(pmf_.begin(), pmf_.end(), cdf_.begin());
  cdf_.back() = 1.0;
}

double DiscreteLaw::pmf(int k) const {
  if (k < min() || k > max()) return 0.0;
  return pmf_[static_cast<std::size_t>(k - offset_)];
}

int DiscreteLaw::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
  return offset_ + static_cast<int>(idx);
}

namespace {

std::vector<double> level_weights(int l_min, int l_max, double rho_zeta, double delta0) {
  if (l_min < 0 || l_max < l_min) throw ConfigError("level law: need 0 <= l_min <= l_max");
  if (!(rho_zeta > 0.0 && rho_zeta <= 1.0)) throw ConfigError("level law: rho_zeta must lie in (0, 1]");
  if (!(delta0 > 0.0)) throw ConfigError("level law: delta0 must be positive");
  std::vector<double> w;
  for (int l = l_min; l <= l_max; ++l) w.push_back(std::pow(delta0 * std::ldexp(1.0, -l), rho_zeta));
  return w;
}

std::vector<double> p_weights(int p_max) {
  if (p_max < 0 || p_max > PLaw::kMaxSupported) {
    throw ConfigError("p law: p_max must lie in [0, " + std::to_string(PLaw::kMaxSupported) + "]");
  }
  std::vector<double> w;
  for (int p = 0; p <= p_max; ++p) w.push_back(PLaw::unnormalized_weight(p));
  return w;
}

}  // namespace

LevelLaw::LevelLaw(int l_min, int l_max, double rho_zeta, double delta0)
    : l_min_{l_min},
      l_max_{l_max},
      rho_zeta_{rho_zeta},
      law_{l_min, level_weights(l_min, l_max, rho_zeta, delta0)} {}

PLaw::PLaw(int p_max) : p_max_{p_max}, law_{0, p_weights(p_max)} {}

double PLaw::unnormalized_weight(int p) {
  const double lg = std::log2(static_cast<double>(p) + 2.0);
  return std::ldexp(1.0, -p) * (p + 1.0) * lg * lg;
}

std::int64_t iterations(int p) {
  if (p < 0 || p > 62) throw ConfigError("iterations: p out of range");
  return std::int64_t{1} << p;
}

int sample_categorical(std::span<const double> pmf, Rng& rng, int offset) {
  check_pmf(pmf);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < pmf.size(); ++k) {
    acc += pmf[k];
    if (u < acc) return offset + static_cast<int>(k);
  }
  return offset + static_cast<int>(pmf.size()) - 1;
}

void CostLedger::add(double units) {
  if (!(units >= 0.0)) throw RunError("cost ledger: negative cost increment");
  units_ += units;
}

}  // namespace umsa
