#include "umsa/msa.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "umsa/errors.hpp"

namespace umsa {

double ReprojectionSettings::radius(std::int64_t n) const {
  return radius0 * std::pow(1.0 + static_cast<double>(n), radius_exponent);
}

double ReprojectionSettings::eps(std::int64_t n) const {
  return eps0 * std::pow(static_cast<double>(std::max<std::int64_t>(n, 1)), -eps_exponent);
}

Theta reproject(const Theta& proposal, const Theta& previous, const Theta& theta0, std::int64_t n,
                const ReprojectionSettings& settings, const ThetaBox& box) {
  const bool small_move = (proposal - previous).norm() < settings.eps(n);
  const double r = settings.radius(n + 1);
  const bool inside = ((proposal - theta0).array().abs() <= r).all() && box.contains(proposal);
  return small_move && inside ? proposal : theta0;
}

namespace {

constexpr std::uint64_t kCouplingStreamTag = 0xc0u;

void validate(const Model& model, const MsaConfig& config, const ThetaBox& box) {
  if (config.iterations < 1) throw ConfigError("msa: iteration budget must be positive");
  if (config.burn_in < 0) throw ConfigError("msa: burn-in must be nonnegative");
  if (config.checkpoint < 0 || config.checkpoint > config.iterations) {
    throw ConfigError("msa: checkpoint index must lie in [0, N]");
  }
  if (config.theta0.size() != model.theta_dim()) throw ConfigError("msa: theta0 has the wrong dimension");
  if (config.pcn.dim() != model.latent_dim()) throw ConfigError("msa: pCN dimension does not match the model");
  if (!box.contains(config.theta0)) throw ConfigError("msa: theta0 outside the admissible box");
  if (config.reprojection.enabled && !(config.reprojection.radius0 > 0.0 && config.reprojection.eps0 > 0.0)) {
    throw ConfigError("msa: reprojection radius0 and eps0 must be positive");
  }
}

// Applies the SA update for one component; returns true if theta moved.
bool sa_update(const Model& model, const MsaConfig& config, const ThetaBox& box, std::int64_t n, Theta& theta,
               ChainState& state, std::int64_t& resets) {
  const double phi = config.schedule(n);
  if (phi == 0.0) return false;
  const Theta step = phi * model.grad_theta(theta, state.fwd);
  Theta next = theta + step;
  if (config.reprojection.enabled) {
    next = reproject(next, theta, config.theta0, n, config.reprojection, box);
    if (next == config.theta0 && !(theta + step == config.theta0)) ++resets;
  } else {
    next = box.clamp(next);
  }
  if (next == theta) return false;
  theta = std::move(next);
  state.refresh(model, theta);
  return true;
}

// Mean of iterates over the second half of the run.
struct TailAverager {
  std::int64_t start;
  Theta sum;
  std::int64_t count = 0;

  TailAverager(std::int64_t iterations, int dim) : start{iterations / 2 + 1}, sum{Theta::Zero(dim)} {}

  void add(std::int64_t n, const Theta& theta) {
    if (n < start) return;
    sum += theta;
    ++count;
  }
  [[nodiscard]] Theta mean() const { return sum / static_cast<double>(count); }
};

void write_trace(std::ostream& out, std::int64_t n, const Theta& theta, bool accepted) {
  out << n;
  for (Eigen::Index k = 0; k < theta.size(); ++k) out << ',' << theta(k);
  out << ',' << (accepted ? 1 : 0) << '\n';
}

void write_trace_header(std::ostream& out, int dim) {
  out.precision(17);
  out << 'n';
  for (int k = 1; k <= dim; ++k) out << ",theta_" << k;
  out << ",accepted\n";
}

}  // namespace

MsaRun run_msa(const Model& model, const MsaConfig& config, Rng& rng) {
  const ThetaBox box = config.box.value_or(model.theta_box());
  validate(model, config, box);

  Theta theta = config.theta0;
  ChainState state;
  int attempt = 0;
  for (;; ++attempt) {
    if (attempt > config.max_init_retries) {
      throw ConfigError("msa: no admissible initial state after " + std::to_string(config.max_init_retries) +
                        " prior draws");
    }
    state = ChainState::make(model, theta, config.level, model.sample_prior(rng));
    if (state.log_gamma > -std::numeric_limits<double>::infinity()) break;
  }

  for (std::int64_t b = 0; b < config.burn_in; ++b) mh_step(model, theta, config.level, state, config.pcn, rng);

  if (config.trace != nullptr) write_trace_header(*config.trace, model.theta_dim());
  MsaRun run;
  run.theta_checkpoint = theta;
  TailAverager tail(config.iterations, model.theta_dim());
  std::int64_t accepted = 0;
  for (std::int64_t n = 1; n <= config.iterations; ++n) {
    const bool acc = mh_step(model, theta, config.level, state, config.pcn, rng).accepted;
    accepted += acc ? 1 : 0;
    sa_update(model, config, box, n, theta, state, run.resets);
    if (n == config.checkpoint) run.theta_checkpoint = theta;
    tail.add(n, theta);
    if (config.trace != nullptr) write_trace(*config.trace, n, theta, acc);
  }
  run.theta = theta;
  run.tail_mean = tail.mean();
  run.iterations = config.iterations;
  run.cost = static_cast<double>(config.iterations + config.burn_in) * model.step_cost(config.level, config.omega);
  run.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(config.iterations);
  return run;
}

std::pair<MsaRun, MsaRun> run_coupled_msa(const Model& model, const MsaConfig& config, CouplingKind kind, Rng& rng) {
  const ThetaBox box = config.box.value_or(model.theta_box());
  validate(model, config, box);
  if (config.level < 1) throw ConfigError("coupled msa: level must be at least 1");
  const int fine_level = config.level;
  const int coarse_level = config.level - 1;

  Theta theta_fine = config.theta0;
  Theta theta_coarse = config.theta0;
  CoupledState pair;
  int attempt = 0;
  for (;; ++attempt) {
    if (attempt > config.max_init_retries) {
      throw ConfigError("coupled msa: no admissible initial state after " + std::to_string(config.max_init_retries) +
                        " prior draws");
    }
    Latent u0 = model.sample_prior(rng);
    pair.fine = ChainState::make(model, theta_fine, fine_level, u0);
    pair.coarse = ChainState::make(model, theta_coarse, coarse_level, std::move(u0));
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (pair.fine.log_gamma > kNegInf && pair.coarse.log_gamma > kNegInf) break;
  }

  Rng aux = rng.split(kCouplingStreamTag);
  for (std::int64_t b = 0; b < config.burn_in; ++b) {
    coupled_mh_step(model, theta_fine, theta_coarse, fine_level, pair, config.pcn, config.pcn, kind, rng, aux);
  }
  MsaRun fine;
  MsaRun coarse;
  fine.theta_checkpoint = theta_fine;
  coarse.theta_checkpoint = theta_coarse;
  TailAverager tail_fine(config.iterations, model.theta_dim());
  TailAverager tail_coarse(config.iterations, model.theta_dim());
  std::int64_t acc_fine = 0;
  std::int64_t acc_coarse = 0;
  for (std::int64_t n = 1; n <= config.iterations; ++n) {
    const CoupledStepResult step =
        coupled_mh_step(model, theta_fine, theta_coarse, fine_level, pair, config.pcn, config.pcn, kind, rng, aux);
    acc_fine += step.fine_accepted ? 1 : 0;
    acc_coarse += step.coarse_accepted ? 1 : 0;
    sa_update(model, config, box, n, theta_fine, pair.fine, fine.resets);
    sa_update(model, config, box, n, theta_coarse, pair.coarse, coarse.resets);
    if (n == config.checkpoint) {
      fine.theta_checkpoint = theta_fine;
      coarse.theta_checkpoint = theta_coarse;
    }
    tail_fine.add(n, theta_fine);
    tail_coarse.add(n, theta_coarse);
  }
  const double n_total = static_cast<double>(config.iterations);
  const double steps = static_cast<double>(config.iterations + config.burn_in);
  fine.theta = theta_fine;
  coarse.theta = theta_coarse;
  fine.tail_mean = tail_fine.mean();
  coarse.tail_mean = tail_coarse.mean();
  fine.iterations = coarse.iterations = config.iterations;
  fine.cost = steps * model.step_cost(fine_level, config.omega);
  coarse.cost = steps * model.step_cost(coarse_level, config.omega);
  fine.acceptance_rate = static_cast<double>(acc_fine) / n_total;
  coarse.acceptance_rate = static_cast<double>(acc_coarse) / n_total;
  return {std::move(fine), std::move(coarse)};
}

}  // namespace umsa
