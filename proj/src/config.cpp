#include "umsa/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "umsa/elliptic.hpp"
#include "umsa/errors.hpp"
#include "umsa/harness.hpp"
#include "umsa/io.hpp"
#include "umsa/sir.hpp"

namespace umsa {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + s + "'");
  }
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  return parse(in);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_int(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key, ""))) out.push_back(parse_double(key, item));
  return out;
}

std::vector<std::int64_t> Config::get_ints(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(get(key, ""))) out.push_back(parse_int(key, item));
  return out;
}

void Config::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("config: unknown key '" + key + "'");
  }
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "model",       "l_min",        "l_max",       "rho_zeta",     "p_max",          "phi0",
      "n0",          "exponent",     "rho_pcn",     "sigma_scale",  "sigma_diag",     "omega",
      "coupling",    "M",            "M_grid",      "repetitions",  "theta0",         "theta_lo",
      "theta_hi",    "data",         "data_seed",   "theta_true",   "l_data",         "theta_ref",
      "ref_level",   "ref_iterations", "threads",   "burn_in",      "max_init_retries", "reprojection",
      "reproj_radius0", "reproj_eps0", "observations", "sir_a",     "sir_b",          "obs_offset",
      "population"};
  return keys;
}

namespace {

Theta theta_vector(const Config& cfg, const std::string& key, int dim, const Theta& fallback) {
  if (!cfg.has(key)) return fallback;
  const auto v = cfg.get_doubles(key);
  if (v.size() == 1) return Theta::Constant(dim, v.front());
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError("config: '" + key + "' needs 1 or " + std::to_string(dim) + " values");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

std::vector<std::int64_t> default_m_grid() {
  std::vector<std::int64_t> grid;
  for (int k = 2; k <= 11; ++k) grid.push_back(std::int64_t{1} << k);
  return grid;
}

struct ModelDefaults {
  int l_min;
  int l_max;
  double phi0;
  double n0;
  double sigma_scale;
  CouplingKind coupling;
  Theta theta0;
  Theta theta_true;
  int repetitions;
  std::int64_t burn_in;
};

}  // namespace

Experiment build_experiment(const Config& cfg) {
  cfg.require_known(known_config_keys());
  Experiment ex;
  ex.model_name = cfg.get("model", "elliptic");
  const bool elliptic = ex.model_name == "elliptic";
  if (!elliptic && ex.model_name != "sir") throw ConfigError("config: model must be elliptic or sir");

  const ModelDefaults defaults =
      elliptic ? ModelDefaults{2, 9, 2000.0, 1000.0, 4.0, CouplingKind::synchronous, Theta::Constant(1, 100.0),
                               Theta::Constant(1, 100.0), 50, 0}
               : ModelDefaults{3, 7, 0.5, 100.0, 1.0, CouplingKind::reflection, (Theta(2) << 1.0, 0.2).finished(),
                               (Theta(2) << 2.0, 0.1).finished(), 100, 0};
  const int d_theta = elliptic ? 1 : 2;

  const int l_min = static_cast<int>(cfg.get_int("l_min", defaults.l_min));
  const int l_max = static_cast<int>(cfg.get_int("l_max", defaults.l_max));
  ex.l_data = static_cast<int>(cfg.get_int("l_data", l_max + 2));
  if (ex.l_data < l_max + 2) throw ConfigError("config: l_data must be at least l_max + 2");
  ex.data_seed = static_cast<std::uint64_t>(cfg.get_int("data_seed", 20240601));
  ex.theta_true = theta_vector(cfg, "theta_true", d_theta, defaults.theta_true);

  Rng data_rng{ex.data_seed};
  if (elliptic) {
    EllipticOptions opt;
    opt.observations = static_cast<int>(cfg.get_int("observations", opt.observations));
    opt.theta_lo = cfg.get_double("theta_lo", opt.theta_lo);
    opt.theta_hi = cfg.get_double("theta_hi", opt.theta_hi);
    opt.max_level = std::max(opt.max_level, ex.l_data);
    if (cfg.has("data")) {
      ex.data = read_elliptic_data_csv(cfg.get("data", ""));
    } else {
      const EllipticData d = generate_elliptic_data(ex.theta_true(0), ex.l_data, data_rng, opt);
      ex.data = d.y;
      ex.latent_true = d.x_true;
      ex.data_generated = true;
    }
    ex.model = std::make_shared<EllipticModel>(ex.data, opt);
  } else {
    SirOptions opt;
    opt.transmission = cfg.get_double("sir_a", opt.transmission);
    opt.recovery = cfg.get_double("sir_b", opt.recovery);
    opt.population = cfg.get_double("population", opt.population);
    opt.observation_offset = static_cast<int>(cfg.get_int("obs_offset", opt.observation_offset));
    opt.observations = static_cast<int>(cfg.get_int("observations", opt.observations));
    opt.theta_lo = cfg.get_double("theta_lo", opt.theta_lo);
    opt.theta_hi = cfg.get_double("theta_hi", opt.theta_hi);
    if (cfg.has("data")) {
      ex.data = read_sir_data_csv(cfg.get("data", ""));
    } else {
      const SirData d = generate_sir_data(ex.theta_true, ex.l_data, data_rng, opt);
      ex.data = d.y;
      ex.latent_true = d.x_true;
      ex.data_generated = true;
    }
    ex.model = std::make_shared<SirModel>(ex.data, opt);
  }

  UmsaConfig& u = ex.umsa;
  u.level_law = LevelLaw(l_min, l_max, cfg.get_double("rho_zeta", 0.5), ex.model->mesh(0));
  u.p_law = PLaw(static_cast<int>(cfg.get_int("p_max", 12)));
  u.schedule = StepSchedule(cfg.get_double("phi0", defaults.phi0), cfg.get_double("n0", defaults.n0),
                            cfg.get_double("exponent", 1.0));
  u.theta0 = theta_vector(cfg, "theta0", d_theta, defaults.theta0);
  u.coupling = cfg.has("coupling") ? parse_coupling(cfg.get("coupling", "")) : defaults.coupling;
  const int d_u = ex.model->latent_dim();
  const double rho = cfg.get_double("rho_pcn", 0.95);
  if (cfg.has("sigma_diag")) {
    const auto diag = cfg.get_doubles("sigma_diag");
    if (static_cast<int>(diag.size()) != d_u) throw ConfigError("config: sigma_diag needs one entry per latent coordinate");
    u.pcn = PcnParams(rho, Eigen::Map<const Eigen::VectorXd>(diag.data(), d_u).asDiagonal().toDenseMatrix());
  } else {
    u.pcn = PcnParams::isotropic(rho, cfg.get_double("sigma_scale", defaults.sigma_scale), d_u);
  }
  u.omega = cfg.get_double("omega", 1.0);
  u.burn_in = cfg.get_int("burn_in", defaults.burn_in);
  u.max_init_retries = static_cast<int>(cfg.get_int("max_init_retries", 1000));
  u.reprojection.enabled = cfg.get_bool("reprojection", false);
  u.reprojection.radius0 = cfg.get_double("reproj_radius0", u.reprojection.radius0);
  u.reprojection.eps0 = cfg.get_double("reproj_eps0", u.reprojection.eps0);
  if (!ex.model->theta_box().contains(u.theta0)) throw ConfigError("config: theta0 outside the admissible box");

  ex.replicates = cfg.get_int("M", 64);
  if (ex.replicates < 1) throw ConfigError("config: M must be positive");
  ex.m_grid = cfg.has("M_grid") ? cfg.get_ints("M_grid") : default_m_grid();
  ex.repetitions = static_cast<int>(cfg.get_int("repetitions", defaults.repetitions));
  ex.threads = static_cast<int>(cfg.get_int("threads", 1));
  if (cfg.has("theta_ref")) ex.theta_ref = theta_vector(cfg, "theta_ref", d_theta, Theta{});
  ex.ref_level = static_cast<int>(cfg.get_int("ref_level", elliptic ? l_max : 5));
  ex.ref_iterations = cfg.get_int("ref_iterations", elliptic ? (1 << 18) : (1 << 14));
  return ex;
}

Theta sweep_reference(const Experiment& ex) {
  if (ex.theta_ref) return *ex.theta_ref;
  if (ex.model_name == "elliptic") {
    const auto& model = dynamic_cast<const EllipticModel&>(*ex.model);
    return Theta::Constant(1, oracle_theta_star_elliptic(model, ex.umsa.level_law.l_max()).argmax);
  }
  return msa_reference(*ex.model, ex.umsa.msa_config(ex.ref_level, ex.ref_iterations, 0), ex.data_seed);
}

}  // namespace umsa
