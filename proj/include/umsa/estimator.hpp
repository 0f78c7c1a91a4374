#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "umsa/kernels.hpp"
#include "umsa/laws.hpp"
#include "umsa/model.hpp"
#include "umsa/msa.hpp"

namespace umsa {

struct UmsaConfig {
  LevelLaw level_law{2, 9, 0.5};
  PLaw p_law{12};
  StepSchedule schedule = StepSchedule::zero();
  Theta theta0;
  CouplingKind coupling = CouplingKind::synchronous;
  PcnParams pcn = PcnParams::isotropic(0.95, 4.0, 2);
  double omega = 1.0;
  std::optional<ThetaBox> box;
  ReprojectionSettings reprojection;
  int max_init_retries = 1000;
  std::int64_t burn_in = 0;

  /// MSA settings shared by every branch; level and budget are filled in per draw.
  [[nodiscard]] MsaConfig msa_config(int level, std::int64_t iterations, std::int64_t checkpoint) const;
};

struct EstimateRecord {
  Theta estimate;
  int level = 0;
  int p = 0;
  double cost = 0.0;
  double seconds = 0.0;
  std::uint64_t replicate = 0;
  std::uint64_t seed = 0;
};

/// Single-term estimate for a given (l, p): the weighted level/iteration
/// difference of one (possibly coupled) MSA trajectory.
EstimateRecord single_term_estimate_at(const Model& model, const UmsaConfig& config, int level, int p, Rng& rng);

/// l ~ P_L then p ~ P_P, one uniform each.
std::pair<int, int> sample_level_and_p(const UmsaConfig& config, Rng& rng);

/// Draws (l, p) with sample_level_and_p and evaluates the single-term estimate.
EstimateRecord single_term_estimate(const Model& model, const UmsaConfig& config, Rng& rng);

struct AveragedEstimate {
  Theta mean;
  std::vector<EstimateRecord> records;  // replicate-id order
  double total_cost = 0.0;
  double seconds = 0.0;  // wall time of the whole average
};

/// Mean of M independent single-term estimates; replicate i uses
/// SeedPlan{master_seed}.stream(i). The reduction is in replicate order so
/// the result does not depend on `threads`.
AveragedEstimate averaged_estimate(const Model& model, const UmsaConfig& config, std::int64_t replicates,
                                   std::uint64_t master_seed, int threads = 1);

/// records.csv: replicate,seed,l,p,cost,seconds,theta_1..theta_d.
void write_records_csv(std::ostream& out, const std::vector<EstimateRecord>& records);

}  // namespace umsa
