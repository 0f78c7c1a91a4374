#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "umsa/rng.hpp"

namespace umsa {

/// Robbins-Monro gain phi_n = phi0 / (n + n0)^exponent.
class StepSchedule {
 public:
  StepSchedule(double phi0, double n0, double exponent);

  [[nodiscard]] double operator()(std::int64_t n) const;

  [[nodiscard]] double phi0() const { return phi0_; }
  [[nodiscard]] double n0() const { return n0_; }
  [[nodiscard]] double exponent() const { return exponent_; }

  /// phi_n = 0 for every n; only meaningful for tests and degenerate runs.
  static StepSchedule zero() { return StepSchedule{}; }

 private:
  StepSchedule() = default;
  double phi0_ = 0.0;
  double n0_ = 0.0;
  double exponent_ = 1.0;
};

inline double step_size(const StepSchedule& schedule, std::int64_t n) { return schedule(n); }

/// Finite-support distribution on consecutive integers {offset, ..., offset+size-1}.
class DiscreteLaw {
 public:
  DiscreteLaw(int offset, std::vector<double> weights);

  [[nodiscard]] double pmf(int k) const;
  [[nodiscard]] int sample(Rng& rng) const;
  [[nodiscard]] int min() const { return offset_; }
  [[nodiscard]] int max() const { return offset_ + static_cast<int>(pmf_.size()) - 1; }
  [[nodiscard]] std::span<const double> probabilities() const { return pmf_; }

 private:
  int offset_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// Level law P_L(l) proportional to Delta_l^{rho_zeta} on {l_min, ..., l_max},
/// with Delta_l = delta0 * 2^{-l}.
class LevelLaw {
 public:
  LevelLaw(int l_min, int l_max, double rho_zeta, double delta0 = 1.0);

  [[nodiscard]] double pmf(int l) const { return law_.pmf(l); }
  [[nodiscard]] int sample(Rng& rng) const { return law_.sample(rng); }
  [[nodiscard]] int l_min() const { return l_min_; }
  [[nodiscard]] int l_max() const { return l_max_; }
  [[nodiscard]] double rho_zeta() const { return rho_zeta_; }
  [[nodiscard]] const DiscreteLaw& law() const { return law_; }

 private:
  int l_min_;
  int l_max_;
  double rho_zeta_;
  DiscreteLaw law_;
};

/// Iteration-index law P_P(p) proportional to 2^{-p} (p+1) log2(p+2)^2 on {0, ..., p_max}.
class PLaw {
 public:
  explicit PLaw(int p_max);

  [[nodiscard]] double pmf(int p) const { return law_.pmf(p); }
  [[nodiscard]] int sample(Rng& rng) const { return law_.sample(rng); }
  [[nodiscard]] int p_max() const { return p_max_; }
  [[nodiscard]] const DiscreteLaw& law() const { return law_; }

  static double unnormalized_weight(int p);

  /// Largest p for which iterations(p) fits comfortably in the iteration counter.
  static constexpr int kMaxSupported = 40;

 private:
  int p_max_;
  DiscreteLaw law_;
};

/// N_p = 2^p.
std::int64_t iterations(int p);

/// Inverse-CDF draw from a pmf over {offset, ..., offset + pmf.size() - 1}.
int sample_categorical(std::span<const double> pmf, Rng& rng, int offset = 0);

/// Accumulated computational cost; one MH step at level l adds Delta_l^{-omega}.
class CostLedger {
 public:
  void add(double units);
  void add(const CostLedger& other) { add(other.units_); }
  [[nodiscard]] double units() const { return units_; }

 private:
  double units_ = 0.0;
};

}  // namespace umsa
