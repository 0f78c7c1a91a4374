#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>

#include "umsa/config.hpp"
#include "umsa/elliptic.hpp"
#include "umsa/errors.hpp"
#include "umsa/harness.hpp"
#include "umsa/msa.hpp"

namespace py = pybind11;
using namespace umsa;

namespace {

std::string to_config_value(const py::handle& v) {
  if (py::isinstance<py::str>(v)) return v.cast<std::string>();
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
  if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
    std::string out;
    for (const auto& item : v) out += (out.empty() ? "" : ",") + to_config_value(item);
    return out;
  }
  return py::str(v).cast<std::string>();
}

Config make_config(const py::dict& settings) {
  Config cfg;
  for (const auto& [k, v] : settings) cfg.set(k.cast<std::string>(), to_config_value(v));
  return cfg;
}

class PyExperiment {
 public:
  explicit PyExperiment(const py::dict& settings) : ex_(build_experiment(make_config(settings))) {}

  [[nodiscard]] const Experiment& get() const { return ex_; }

  py::dict estimate(std::optional<std::int64_t> m, std::uint64_t seed, std::optional<int> threads) const {
    AveragedEstimate est;
    {
      py::gil_scoped_release release;
      est = averaged_estimate(*ex_.model, ex_.umsa, m.value_or(ex_.replicates), seed, threads.value_or(ex_.threads));
    }
    const auto n = static_cast<Eigen::Index>(est.records.size());
    Eigen::MatrixXd estimates(n, ex_.model->theta_dim());
    Eigen::VectorXi levels(n);
    Eigen::VectorXi ps(n);
    Eigen::VectorXd costs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = est.records[static_cast<std::size_t>(i)];
      estimates.row(i) = r.estimate.transpose();
      levels(i) = r.level;
      ps(i) = r.p;
      costs(i) = r.cost;
    }
    py::dict out;
    out["theta_hat"] = est.mean;
    out["estimates"] = estimates;
    out["levels"] = levels;
    out["p"] = ps;
    out["costs"] = costs;
    out["total_cost"] = est.total_cost;
    out["seconds"] = est.seconds;
    return out;
  }

  py::dict msa(std::optional<int> level, std::optional<std::int64_t> iterations, std::uint64_t seed) const {
    const MsaConfig mc = ex_.umsa.msa_config(level.value_or(ex_.ref_level), iterations.value_or(ex_.ref_iterations), 0);
    MsaRun run;
    {
      py::gil_scoped_release release;
      Rng rng{seed};
      run = run_msa(*ex_.model, mc, rng);
    }
    py::dict out;
    out["theta"] = run.theta;
    out["tail_mean"] = run.tail_mean;
    out["cost"] = run.cost;
    out["acceptance_rate"] = run.acceptance_rate;
    out["resets"] = run.resets;
    return out;
  }

  [[nodiscard]] double oracle(std::optional<int> level) const {
    const auto* model = dynamic_cast<const EllipticModel*>(ex_.model.get());
    if (model == nullptr) throw ConfigError("oracle: only the elliptic model has a closed-form marginal");
    return level ? oracle_theta_star_elliptic(*model, *level).argmax : oracle_theta_star_elliptic_exact(*model).argmax;
  }

  py::list sweep(std::optional<std::vector<std::int64_t>> m_grid, std::optional<int> repetitions, std::uint64_t seed,
                 std::optional<Theta> reference, std::optional<int> threads) const {
    ExperimentPlan plan;
    plan.config = ex_.umsa;
    plan.m_grid = m_grid.value_or(ex_.m_grid);
    plan.repetitions = repetitions.value_or(ex_.repetitions);
    plan.master_seed = seed;
    plan.threads = threads.value_or(ex_.threads);
    std::vector<SweepRow> rows;
    {
      py::gil_scoped_release release;
      plan.reference = reference ? *reference : sweep_reference(ex_);
      rows = run_sweep(*ex_.model, plan);
    }
    py::list out;
    for (const auto& r : rows) {
      py::dict row;
      row["M"] = r.m;
      row["mse"] = r.mse;
      row["cost"] = r.cost;
      row["seconds_mean"] = r.seconds_mean;
      out.append(row);
    }
    return out;
  }

 private:
  Experiment ex_;
};

}  // namespace

PYBIND11_MODULE(_umsa, m) {
  m.doc() = "Unbiased maximum marginal likelihood estimation by randomized multilevel stochastic approximation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<RunError>(m, "RunError", PyExc_RuntimeError);

  py::class_<PyExperiment>(m, "Experiment")
      .def(py::init<const py::dict&>(), py::arg("settings") = py::dict(),
           "Build a model and estimator from config keys, e.g. {'model': 'sir', 'l_max': 6}.")
      .def_property_readonly("model", [](const PyExperiment& e) { return e.get().model_name; })
      .def_property_readonly("data", [](const PyExperiment& e) { return e.get().data; })
      .def_property_readonly("theta0", [](const PyExperiment& e) { return e.get().umsa.theta0; })
      .def_property_readonly("theta_true", [](const PyExperiment& e) { return e.get().theta_true; })
      .def_property_readonly("l_min", [](const PyExperiment& e) { return e.get().umsa.level_law.l_min(); })
      .def_property_readonly("l_max", [](const PyExperiment& e) { return e.get().umsa.level_law.l_max(); })
      .def("estimate", &PyExperiment::estimate, py::arg("M") = py::none(), py::arg("seed") = 1,
           py::arg("threads") = py::none(), "Average of M independent single-term estimates.")
      .def("msa", &PyExperiment::msa, py::arg("level") = py::none(), py::arg("iterations") = py::none(),
           py::arg("seed") = 1, "Fixed-level Markovian stochastic approximation run.")
      .def("oracle", &PyExperiment::oracle, py::arg("level") = py::none(),
           "Elliptic marginal-likelihood maximizer at a level, or for the exact forward map when level is None.")
      .def("sweep", &PyExperiment::sweep, py::arg("m_grid") = py::none(), py::arg("repetitions") = py::none(),
           py::arg("seed") = 1, py::arg("reference") = py::none(), py::arg("threads") = py::none(),
           "MSE of the averaged estimator against a reference for each M.");

  m.def(
      "forward_convergence",
      [](const std::vector<int>& levels) {
        const auto rows = forward_convergence_table(levels);
        std::vector<std::pair<int, double>> out;
        for (const auto& r : rows) out.emplace_back(r.level, r.diff_sq);
        return py::make_tuple(out, convergence_order(rows));
      },
      py::arg("levels"), "Returns ([(l, diff_sq)], fitted order).");
  m.def(
      "loglog_slope", [](const std::vector<double>& x, const std::vector<double>& y) { return loglog_slope(x, y); },
      py::arg("x"), py::arg("y"));
}
