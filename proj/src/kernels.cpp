#include "umsa/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "umsa/errors.hpp"

namespace umsa {

PcnParams::PcnParams(double rho, Eigen::MatrixXd sigma) : rho_{rho}, sigma_{std::move(sigma)} {
  if (!(rho_ > -1.0 && rho_ < 1.0)) throw ConfigError("pcn: rho must lie in (-1, 1)");
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() == 0) throw ConfigError("pcn: sigma must be square");
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma_);
  if (!lu.isInvertible()) throw ConfigError("pcn: sigma must be invertible");
  factor_ = std::sqrt(1.0 - rho_ * rho_) * sigma_;
  factor_inv_ = factor_.inverse();
}

PcnParams PcnParams::isotropic(double rho, double scale, int dim) {
  return PcnParams{rho, scale * Eigen::MatrixXd::Identity(dim, dim)};
}

double PcnParams::log_density(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const {
  return -0.5 * (factor_inv_ * (to - rho_ * from)).squaredNorm();
}

Eigen::VectorXd pcn_propose(const Eigen::VectorXd& u, const PcnParams& params, const Eigen::VectorXd& z) {
  return params.rho() * u + params.scaled_factor() * z;
}

Eigen::VectorXd standard_normal(int dim, Rng& rng) {
  Eigen::VectorXd z(dim);
  for (int i = 0; i < dim; ++i) z(i) = rng.normal();
  return z;
}

ChainState ChainState::make(const Model& model, const Theta& theta, int level, Latent u) {
  ChainState s;
  s.fwd = model.forward(u, level);
  s.u = std::move(u);
  s.log_gamma = model.log_gamma(theta, s.fwd);
  return s;
}

void ChainState::refresh(const Model& model, const Theta& theta) { log_gamma = model.log_gamma(theta, fwd); }

double log_acceptance_ratio(double log_gamma_current, double log_gamma_proposal, const Eigen::VectorXd& current,
                            const Eigen::VectorXd& proposal, const PcnParams& params) {
  if (log_gamma_proposal == -std::numeric_limits<double>::infinity()) return log_gamma_proposal;
  return log_gamma_proposal - log_gamma_current + params.log_density(proposal, current) -
         params.log_density(current, proposal);
}

double acceptance_probability(double log_ratio) {
  if (std::isnan(log_ratio)) return 0.0;
  return std::exp(std::min(0.0, log_ratio));
}

namespace {

// Evaluates the proposal and applies the accept/reject decision against v.
bool accept_or_reject(const Model& model, const Theta& theta, int level, ChainState& state, const PcnParams& params,
                      Eigen::VectorXd proposal, double v) {
  ForwardResult fwd = model.forward(proposal, level);
  const double lg = model.log_gamma(theta, fwd);
  const double alpha = acceptance_probability(log_acceptance_ratio(state.log_gamma, lg, state.u, proposal, params));
  if (v < alpha) {
    state.u = std::move(proposal);
    state.fwd = std::move(fwd);
    state.log_gamma = lg;
    return true;
  }
  return false;
}

}  // namespace

StepResult mh_step(const Model& model, const Theta& theta, int level, ChainState& state, const PcnParams& params,
                   Rng& rng) {
  const Eigen::VectorXd z = standard_normal(params.dim(), rng);
  const double v = rng.uniform();
  return {accept_or_reject(model, theta, level, state, params, pcn_propose(state.u, params, z), v)};
}

const char* to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::synchronous:
      return "synchronous";
    case CouplingKind::reflection:
      return "reflection";
  }
  return "unknown";
}

CouplingKind parse_coupling(const std::string& name) {
  if (name == "synchronous") return CouplingKind::synchronous;
  if (name == "reflection") return CouplingKind::reflection;
  throw ConfigError("unknown coupling '" + name + "' (expected synchronous or reflection)");
}

ProposalPair couple_synchronous(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_coarse,
                                const PcnParams& params_fine, const PcnParams& params_coarse,
                                const Eigen::VectorXd& z) {
  ProposalPair out;
  out.fine = pcn_propose(u_fine, params_fine, z);
  out.coarse = pcn_propose(u_coarse, params_coarse, z);
  out.met = out.fine == out.coarse;
  return out;
}

ProposalPair couple_reflection_maximal(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_coarse,
                                       const PcnParams& params, const Eigen::VectorXd& z, Rng& meet_rng) {
  ProposalPair out;
  out.fine = pcn_propose(u_fine, params, z);
  const Eigen::VectorXd gap = params.scaled_factor_inverse() * (params.rho() * (u_fine - u_coarse));
  const double gap_norm = gap.norm();
  if (gap_norm == 0.0) {
    out.coarse = out.fine;
    out.met = true;
    return out;
  }
  const double log_ratio = -0.5 * ((z + gap).squaredNorm() - z.squaredNorm());
  if (std::log(meet_rng.uniform()) < log_ratio) {
    out.coarse = out.fine;
    out.met = true;
    return out;
  }
  const Eigen::VectorXd e = gap / gap_norm;
  const Eigen::VectorXd reflected = z - 2.0 * e.dot(z) * e;
  out.coarse = pcn_propose(u_coarse, params, reflected);
  return out;
}

CoupledStepResult coupled_mh_step(const Model& model, const Theta& theta_fine, const Theta& theta_coarse, int level,
                                  CoupledState& pair, const PcnParams& params_fine, const PcnParams& params_coarse,
                                  CouplingKind kind, Rng& rng, Rng& aux_rng) {
  const Eigen::VectorXd z = standard_normal(params_fine.dim(), rng);
  const double v = rng.uniform();
  ProposalPair proposals;
  if (kind == CouplingKind::synchronous) {
    proposals = couple_synchronous(pair.fine.u, pair.coarse.u, params_fine, params_coarse, z);
  } else {
    if (!(params_fine == params_coarse)) {
      throw ConfigError("reflection coupling requires identical pCN parameters at both levels");
    }
    proposals = couple_reflection_maximal(pair.fine.u, pair.coarse.u, params_fine, z, aux_rng);
  }
  CoupledStepResult out;
  out.met = proposals.met;
  out.fine_accepted = accept_or_reject(model, theta_fine, level, pair.fine, params_fine, std::move(proposals.fine), v);
  out.coarse_accepted =
      accept_or_reject(model, theta_coarse, level - 1, pair.coarse, params_coarse, std::move(proposals.coarse), v);
  return out;
}

}  // namespace umsa
