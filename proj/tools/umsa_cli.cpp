#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "umsa/config.hpp"
#include "umsa/elliptic.hpp"
#include "umsa/errors.hpp"
#include "umsa/harness.hpp"
#include "umsa/io.hpp"
#include "umsa/sir.hpp"

namespace fs = std::filesystem;
using namespace umsa;

namespace {

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--set", args.overrides, "override a configuration entry, key=value");
}

Config load_config(const CommonArgs& args) {
  Config cfg = args.config.empty() ? Config{} : Config::load(args.config);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (cfg.has("data") && !args.config.empty()) {
    const fs::path data = cfg.get("data", "");
    if (data.is_relative()) cfg.set("data", (fs::path(args.config).parent_path() / data).string());
  }
  return cfg;
}

std::ofstream open_output(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out);
  const fs::path path = fs::path(args.out) / name;
  std::ofstream out(path);
  if (!out) throw RunError("cannot write " + path.string());
  std::cerr << "writing " << path.string() << '\n';
  return out;
}

void write_theta_csv(std::ostream& out, const Theta& theta) {
  for (Eigen::Index k = 0; k < theta.size(); ++k) out << (k ? "," : "") << "theta_" << k + 1;
  out << '\n';
  out.precision(17);
  for (Eigen::Index k = 0; k < theta.size(); ++k) out << (k ? "," : "") << theta(k);
  out << '\n';
}

std::string format_theta(const Theta& theta) {
  std::ostringstream s;
  s.precision(10);
  for (Eigen::Index k = 0; k < theta.size(); ++k) s << (k ? " " : "") << theta(k);
  return s.str();
}

Theta resolve_reference(const Experiment& ex) {
  if (!ex.theta_ref && ex.model_name != "elliptic") {
    std::cerr << "computing MSA reference at level " << ex.ref_level << " with " << ex.ref_iterations
              << " iterations\n";
  }
  return sweep_reference(ex);
}

int cmd_generate(const CommonArgs& args) {
  Config cfg = load_config(args);
  cfg.set("data_seed", std::to_string(args.seed));
  if (cfg.has("data")) throw ConfigError("generate-data: remove the 'data' entry to generate a dataset");
  const Experiment ex = build_experiment(cfg);
  auto out = open_output(args, "data.csv");
  if (ex.model_name == "elliptic") {
    const auto& model = dynamic_cast<const EllipticModel&>(*ex.model);
    write_elliptic_data_csv(out, model.observation_times(), ex.data);
  } else {
    const auto& model = dynamic_cast<const SirModel&>(*ex.model);
    write_sir_data_csv(out, model.options().observation_offset + 1, ex.data);
  }
  auto truth = open_output(args, "truth.csv");
  truth << "name,value\n";
  truth.precision(17);
  for (Eigen::Index k = 0; k < ex.theta_true.size(); ++k) truth << "theta_" << k + 1 << ',' << ex.theta_true(k) << '\n';
  for (Eigen::Index k = 0; k < ex.latent_true.size(); ++k) truth << "u_" << k + 1 << ',' << ex.latent_true(k) << '\n';
  truth << "l_data," << ex.l_data << '\n';
  return 0;
}

int cmd_oracle(const CommonArgs& args) {
  const Experiment ex = build_experiment(load_config(args));
  if (ex.model_name == "elliptic") {
    const auto& model = dynamic_cast<const EllipticModel&>(*ex.model);
    auto out = open_output(args, "oracle.csv");
    out << "l,theta_star,log_marginal,at_boundary\n";
    out.precision(17);
    for (int l = ex.umsa.level_law.l_min(); l <= ex.umsa.level_law.l_max(); ++l) {
      const auto r = oracle_theta_star_elliptic(model, l);
      out << l << ',' << r.argmax << ',' << r.value << ',' << r.at_boundary << '\n';
      std::cout << "l=" << l << " theta*=" << r.argmax << (r.at_boundary ? " (boundary)" : "") << '\n';
    }
    const auto exact = oracle_theta_star_elliptic_exact(model);
    out << "exact," << exact.argmax << ',' << exact.value << ',' << exact.at_boundary << '\n';
    std::cout << "exact theta*=" << exact.argmax << '\n';
  } else {
    const Theta ref = resolve_reference(ex);
    auto out = open_output(args, "reference.csv");
    write_theta_csv(out, ref);
    std::cout << "reference theta=" << format_theta(ref) << '\n';
  }
  return 0;
}

int cmd_convergence(const CommonArgs& args) {
  const Experiment ex = build_experiment(load_config(args));
  if (ex.model_name != "elliptic") throw ConfigError("forward-convergence applies to the elliptic model");
  std::vector<int> levels;
  for (int l = std::max(3, ex.umsa.level_law.l_min()); l <= ex.umsa.level_law.l_max(); ++l) levels.push_back(l);
  const auto rows = forward_convergence_table(levels);
  auto out = open_output(args, "convergence.csv");
  write_convergence_csv(out, rows);
  std::cout << "order=" << convergence_order(rows) << '\n';
  return 0;
}

int cmd_estimate(const CommonArgs& args) {
  const Experiment ex = build_experiment(load_config(args));
  const auto avg = averaged_estimate(*ex.model, ex.umsa, ex.replicates, args.seed, ex.threads);
  auto out = open_output(args, "records.csv");
  write_records_csv(out, avg.records);
  std::cout << "theta_hat=" << format_theta(avg.mean) << " M=" << ex.replicates << " cost=" << avg.total_cost
            << " seconds=" << avg.seconds << '\n';
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const Experiment ex = build_experiment(load_config(args));
  ExperimentPlan plan;
  plan.config = ex.umsa;
  plan.m_grid = ex.m_grid;
  plan.repetitions = ex.repetitions;
  plan.master_seed = args.seed;
  plan.reference = resolve_reference(ex);
  plan.threads = ex.threads;
  const auto rows = run_sweep(*ex.model, plan);
  auto out = open_output(args, "sweep.csv");
  write_sweep_csv(out, rows);
  std::vector<double> ms, errs;
  for (const auto& r : rows) {
    ms.push_back(static_cast<double>(r.m));
    errs.push_back(r.mse.sum());
  }
  std::cout << "reference=" << format_theta(plan.reference);
  if (rows.size() >= 2) std::cout << " slope=" << loglog_slope(ms, errs);
  std::cout << '\n';
  return 0;
}

int cmd_msa(const CommonArgs& args) {
  const Experiment ex = build_experiment(load_config(args));
  auto trace = open_output(args, "trace.csv");
  MsaConfig mc = ex.umsa.msa_config(ex.ref_level, ex.ref_iterations, 0);
  mc.trace = &trace;
  Rng rng{args.seed};
  const MsaRun run = run_msa(*ex.model, mc, rng);
  std::cout << "theta_N=" << format_theta(run.theta) << " tail_mean=" << format_theta(run.tail_mean)
            << " acceptance=" << run.acceptance_rate << " resets=" << run.resets << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased marginal-likelihood estimation by randomized multilevel stochastic approximation"};
  app.require_subcommand(1);
  CommonArgs args;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const CommonArgs&);
  };
  const std::vector<Entry> entries{
      {"generate-data", "simulate a dataset (data.csv, truth.csv)", cmd_generate},
      {"oracle", "reference parameters (oracle.csv or reference.csv)", cmd_oracle},
      {"forward-convergence", "finite-difference level differences (convergence.csv)", cmd_convergence},
      {"estimate", "one averaged estimate over M replicates (records.csv)", cmd_estimate},
      {"sweep", "MSE against M over repetitions (sweep.csv)", cmd_sweep},
      {"msa", "single-level MSA run at ref_level with a trace (trace.csv)", cmd_msa},
  };
  std::vector<std::pair<CLI::App*, int (*)(const CommonArgs&)>> commands;
  for (const auto& e : entries) {
    auto* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, args);
    commands.emplace_back(cmd, e.run);
  }
  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& [cmd, run] : commands) {
      if (cmd->parsed()) return run(args);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
