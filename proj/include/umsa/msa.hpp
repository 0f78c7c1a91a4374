#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>

#include "umsa/kernels.hpp"
#include "umsa/laws.hpp"
#include "umsa/model.hpp"

namespace umsa {

/// Reprojection stabilization: the iterate is reset to theta0 whenever a
/// move is at least eps_n long or leaves Theta_{n+1}.
///
/// Theta_n is the box centred at theta0 with half-width
/// radius0 (1 + n)^radius_exponent, intersected with the admissible box, and
/// eps_n = eps0 n^{-eps_exponent}.
struct ReprojectionSettings {
  bool enabled = false;
  double radius0 = 1.0;
  double radius_exponent = 0.1;
  double eps0 = 1.0;
  double eps_exponent = 0.2;

  [[nodiscard]] double radius(std::int64_t n) const;
  [[nodiscard]] double eps(std::int64_t n) const;
};

Theta reproject(const Theta& proposal, const Theta& previous, const Theta& theta0, std::int64_t n,
                const ReprojectionSettings& settings, const ThetaBox& box);

struct MsaConfig {
  int level = 0;
  std::int64_t iterations = 1;
  std::int64_t checkpoint = 0;  // 0: no checkpoint
  StepSchedule schedule = StepSchedule::zero();
  Theta theta0;
  PcnParams pcn = PcnParams::isotropic(0.95, 1.0, 1);
  double omega = 1.0;
  std::optional<ThetaBox> box;  // defaults to the model's admissible box
  ReprojectionSettings reprojection;
  int max_init_retries = 1000;
  /// MH steps at theta0 applied to the prior draw before the first SA update;
  /// the initial law nu is then the prior pushed through this many kernel steps.
  std::int64_t burn_in = 0;
  std::ostream* trace = nullptr;  // CSV n,theta_1..,accepted
};

struct MsaRun {
  Theta theta;             // theta_N
  Theta theta_checkpoint;  // theta_{N'} (theta0 when no checkpoint was requested)
  Theta tail_mean;         // mean of theta_n over n in (N/2, N]
  std::int64_t iterations = 0;
  double cost = 0.0;  // (burn_in + iterations) steps at Delta_l^{-omega} each
  double acceptance_rate = 0.0;
  std::int64_t resets = 0;  // reprojection resets
};

/// Single-level Markovian stochastic approximation: one MH step at theta_{n-1}
/// followed by theta_n = theta_{n-1} + phi_n H^l(theta_{n-1}, U_n).
MsaRun run_msa(const Model& model, const MsaConfig& config, Rng& rng);

/// Two-level MSA at (l, l-1) driven by coupled_mh_step. Both chains start at
/// theta0 from one shared prior draw; the reflection coupling takes its meet
/// uniforms from a stream split off `rng`.
std::pair<MsaRun, MsaRun> run_coupled_msa(const Model& model, const MsaConfig& config, CouplingKind kind, Rng& rng);

}  // namespace umsa
