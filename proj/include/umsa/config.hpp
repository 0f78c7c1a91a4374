#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "umsa/estimator.hpp"
#include "umsa/model.hpp"

namespace umsa {

/// `key = value` lines; `#` starts a comment. Lists are comma separated.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

  [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key) const;
  [[nodiscard]] std::vector<std::int64_t> get_ints(const std::string& key) const;

  /// Throws ConfigError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Keys accepted by build_experiment.
const std::vector<std::string>& known_config_keys();

/// Everything a CLI subcommand needs, resolved from a Config with
/// per-model defaults.
struct Experiment {
  std::string model_name;
  std::shared_ptr<const Model> model;
  UmsaConfig umsa;
  std::int64_t replicates = 64;          // M
  std::vector<std::int64_t> m_grid;      // sweep grid
  int repetitions = 50;
  int threads = 1;
  std::optional<Theta> theta_ref;        // sweep reference override
  int ref_level = 0;                     // long-run MSA reference (SIR) / msa subcommand level
  std::int64_t ref_iterations = 0;
  std::uint64_t data_seed = 0;
  Theta theta_true;
  int l_data = 0;
  Eigen::VectorXd data;
  Latent latent_true;                    // empty when data were read from a file
  bool data_generated = false;
};

/// Builds the model (reading `data` if given, otherwise generating it with
/// `data_seed`) and the estimator configuration.
Experiment build_experiment(const Config& config);

/// Sweep reference: theta_ref if set, else the elliptic oracle at l_max,
/// else a long fixed-level MSA run at (ref_level, ref_iterations).
Theta sweep_reference(const Experiment& ex);

}  // namespace umsa
