#pragma once

#include <Eigen/Core>
#include <utility>

#include "umsa/model.hpp"
#include "umsa/rng.hpp"

namespace umsa {

/// pCN proposal u' = rho u + sqrt(1 - rho^2) sigma z, i.e. N(rho u, (1 - rho^2) sigma sigma^T).
class PcnParams {
 public:
  PcnParams(double rho, Eigen::MatrixXd sigma);

  static PcnParams isotropic(double rho, double scale, int dim);

  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] const Eigen::MatrixXd& sigma() const { return sigma_; }
  [[nodiscard]] int dim() const { return static_cast<int>(sigma_.rows()); }

  /// sqrt(1 - rho^2) sigma.
  [[nodiscard]] const Eigen::MatrixXd& scaled_factor() const { return factor_; }
  /// (sqrt(1 - rho^2) sigma)^{-1}.
  [[nodiscard]] const Eigen::MatrixXd& scaled_factor_inverse() const { return factor_inv_; }

  /// log q(from, to) up to the normalizing constant shared by all pairs.
  [[nodiscard]] double log_density(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const;

  [[nodiscard]] bool operator==(const PcnParams& other) const {
    return rho_ == other.rho_ && sigma_ == other.sigma_;
  }

 private:
  double rho_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd factor_;
  Eigen::MatrixXd factor_inv_;
};

Eigen::VectorXd pcn_propose(const Eigen::VectorXd& u, const PcnParams& params, const Eigen::VectorXd& z);

/// Draws d standard normals in order.
Eigen::VectorXd standard_normal(int dim, Rng& rng);

/// Current chain position with its cached forward solve and log density.
struct ChainState {
  Latent u;
  ForwardResult fwd;
  double log_gamma = 0.0;

  static ChainState make(const Model& model, const Theta& theta, int level, Latent u);
  /// Recompute log_gamma after a parameter change; the forward cache is reused.
  void refresh(const Model& model, const Theta& theta);
};

struct CoupledState {
  ChainState fine;    // level l
  ChainState coarse;  // level l - 1
};

/// log of the MH ratio for a move current -> proposal, including the pCN
/// proposal correction q(u', u) / q(u, u').
double log_acceptance_ratio(double log_gamma_current, double log_gamma_proposal, const Eigen::VectorXd& current,
                            const Eigen::VectorXd& proposal, const PcnParams& params);

/// min(1, exp(log_ratio)), with -inf and NaN mapped to 0.
double acceptance_probability(double log_ratio);

struct StepResult {
  bool accepted = false;
};

/// One pCN Metropolis-Hastings step targeting gamma_theta^level.
///
/// Consumes exactly d normals followed by one uniform from `rng`.
StepResult mh_step(const Model& model, const Theta& theta, int level, ChainState& state, const PcnParams& params,
                   Rng& rng);

enum class CouplingKind { synchronous, reflection };

const char* to_string(CouplingKind kind);
CouplingKind parse_coupling(const std::string& name);

struct ProposalPair {
  Eigen::VectorXd fine;
  Eigen::VectorXd coarse;
  bool met = false;
};

/// Both proposals driven by the same innovation z.
ProposalPair couple_synchronous(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_coarse,
                                const PcnParams& params_fine, const PcnParams& params_coarse,
                                const Eigen::VectorXd& z);

/// Reflection-maximal coupling of N(rho u, C) and N(rho u', C), C = (1 - rho^2) sigma sigma^T.
///
/// In whitened coordinates w = C^{-1/2} x the two laws are N(m, I) and
/// N(m', I). With gap g = m - m' and e = g / |g|, the fine draw is m + z; the
/// coarse draw equals it with probability min(1, phi(z + g) / phi(z)),
/// otherwise it is m' + z - 2 (e . z) e. `z` supplies the d normals and the
/// meet decision takes one uniform from `meet_rng`.
ProposalPair couple_reflection_maximal(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_coarse,
                                       const PcnParams& params, const Eigen::VectorXd& z, Rng& meet_rng);

struct CoupledStepResult {
  bool fine_accepted = false;
  bool coarse_accepted = false;
  bool met = false;
};

/// Coupled MH step for (K_{theta, l}, K_{theta', l-1}) with a common accept uniform.
///
/// Consumes d normals then one uniform from `rng`, exactly as mh_step does,
/// so the fine component alone reproduces a single chain driven by the same
/// stream. The reflection coupling draws its meet uniform from `aux_rng`.
CoupledStepResult coupled_mh_step(const Model& model, const Theta& theta_fine, const Theta& theta_coarse, int level,
                                  CoupledState& pair, const PcnParams& params_fine, const PcnParams& params_coarse,
                                  CouplingKind kind, Rng& rng, Rng& aux_rng);

}  // namespace umsa
