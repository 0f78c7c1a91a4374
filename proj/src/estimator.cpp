#include "umsa/estimator.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <ostream>
#include <string>
#include <thread>

#include "umsa/errors.hpp"

namespace umsa {

MsaConfig UmsaConfig::msa_config(int level, std::int64_t iterations, std::int64_t checkpoint) const {
  MsaConfig cfg;
  cfg.level = level;
  cfg.iterations = iterations;
  cfg.checkpoint = checkpoint;
  cfg.schedule = schedule;
  cfg.theta0 = theta0;
  cfg.pcn = pcn;
  cfg.omega = omega;
  cfg.box = box;
  cfg.reprojection = reprojection;
  cfg.max_init_retries = max_init_retries;
  cfg.burn_in = burn_in;
  return cfg;
}

EstimateRecord single_term_estimate_at(const Model& model, const UmsaConfig& config, int level, int p, Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  const double weight = config.level_law.pmf(level) * config.p_law.pmf(p);
  if (!(weight > 0.0)) throw ConfigError("umsa: (l, p) outside the support of P_L x P_P");
  const std::int64_t n_p = iterations(p);
  const std::int64_t n_prev = p > 0 ? iterations(p - 1) : 0;
  const MsaConfig msa = config.msa_config(level, n_p, n_prev);

  EstimateRecord rec;
  rec.level = level;
  rec.p = p;
  if (level == config.level_law.l_min()) {
    const MsaRun run = run_msa(model, msa, rng);
    rec.estimate = p == 0 ? Theta(run.theta) : Theta(run.theta - run.theta_checkpoint);
    rec.cost = run.cost;
  } else {
    const auto [fine, coarse] = run_coupled_msa(model, msa, config.coupling, rng);
    Theta diff = fine.theta - coarse.theta;
    if (p > 0) diff -= fine.theta_checkpoint - coarse.theta_checkpoint;
    rec.estimate = std::move(diff);
    rec.cost = fine.cost + coarse.cost;
  }
  rec.estimate /= weight;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::pair<int, int> sample_level_and_p(const UmsaConfig& config, Rng& rng) {
  const int level = config.level_law.sample(rng);
  const int p = config.p_law.sample(rng);
  return {level, p};
}

EstimateRecord single_term_estimate(const Model& model, const UmsaConfig& config, Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  const auto [level, p] = sample_level_and_p(config, rng);
  EstimateRecord rec = single_term_estimate_at(model, config, level, p, rng);
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

AveragedEstimate averaged_estimate(const Model& model, const UmsaConfig& config, std::int64_t replicates,
                                   std::uint64_t master_seed, int threads) {
  if (replicates < 1) throw ConfigError("averaged estimate: need at least one replicate");
  const auto start = std::chrono::steady_clock::now();
  const SeedPlan plan{master_seed};
  const auto count = static_cast<std::size_t>(replicates);
  std::vector<EstimateRecord> records(count);
  std::vector<std::exception_ptr> errors(count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        Rng rng = plan.stream(i);
        records[i] = single_term_estimate(model, config, rng);
        records[i].replicate = i;
        records[i].seed = master_seed;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int pool = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (int t = 0; t < pool; ++t) workers.emplace_back(worker);
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw RunError("averaged estimate: replicate " + std::to_string(i) + " (seed " + std::to_string(master_seed) +
                   ") failed: " + what);
  }

  AveragedEstimate out;
  out.mean = Theta::Zero(records.front().estimate.size());
  for (const auto& rec : records) {
    out.mean += rec.estimate;
    out.total_cost += rec.cost;
  }
  out.mean /= static_cast<double>(count);
  out.records = std::move(records);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<EstimateRecord>& records) {
  const auto dim = records.empty() ? 0 : records.front().estimate.size();
  out << "replicate,seed,l,p,cost,seconds";
  for (Eigen::Index k = 1; k <= dim; ++k) out << ",theta_" << k;
  out << '\n';
  out.precision(17);
  for (const auto& r : records) {
    out << r.replicate << ',' << r.seed << ',' << r.level << ',' << r.p << ',' << r.cost << ',' << r.seconds;
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << r.estimate(k);
    out << '\n';
  }
}

}  // namespace umsa
