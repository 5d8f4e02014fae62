#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kinmech/datagen.hpp"
#include "kinmech/doe.hpp"
#include "kinmech/fit.hpp"
#include "kinmech/genmech.hpp"
#include "kinmech/integrate.hpp"
#include "kinmech/io.hpp"
#include "kinmech/select.hpp"
#include "kinmech/translate.hpp"

namespace py = pybind11;
using namespace kinmech;

namespace {

using Rows = std::vector<std::vector<int>>;

MechanismMatrix to_matrix(const Rows& rows) {
  if (rows.empty()) throw std::invalid_argument("matrix needs at least one row");
  const int cols = static_cast<int>(rows.front().size());
  std::vector<std::int8_t> entries;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols) throw std::invalid_argument("ragged matrix");
    for (int v : r) {
      if (v < MechanismMatrix::kMinEntry || v > MechanismMatrix::kMaxEntry)
        throw std::invalid_argument("matrix entry out of range");
      entries.push_back(static_cast<std::int8_t>(v));
    }
  }
  return MechanismMatrix(static_cast<int>(rows.size()), cols, std::move(entries));
}

Rows to_rows(const MechanismMatrix& m) {
  Rows out(m.rows(), std::vector<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

OverallReaction overall_of(const std::vector<std::string>& names, const std::vector<int>& stoich) {
  return {names, stoich};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mechanism enumeration, fitting and model selection for reaction kinetics";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NoCandidatesError>(m, "NoCandidatesError", PyExc_RuntimeError);

  py::class_<Experiment>(m, "Experiment")
      .def_readonly("c0_observed", &Experiment::c0_observed)
      .def_readonly("times", &Experiment::times)
      .def_readonly("y", &Experiment::y);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("observed_names", &Dataset::observed_names)
      .def_readonly("experiments", &Dataset::experiments)
      .def_readonly("seed", &Dataset::seed)
      .def_property_readonly("n_values", &Dataset::n_values);

  m.def("case_names", &case_names);
  m.def(
      "generate", [](const std::string& name, std::uint64_t seed) { return generate(case_study(name), seed); },
      py::arg("case"), py::arg("seed") = 0, "Noisy in-silico data for a named case study.");
  m.def("read_dataset", [](const std::filesystem::path& p) { return read_dataset(p); }, py::arg("path"));
  m.def("write_dataset", &write_dataset, py::arg("path"), py::arg("data"));

  m.def("search_space_size", &search_space_size, py::arg("rows"), py::arg("cols"));
  m.def(
      "enumerate",
      [](const std::vector<std::string>& names, const std::vector<int>& stoich, int n_steps, int n_species,
         int workers, double time_budget_s) {
        EnumerateOptions opt;
        opt.workers = workers;
        opt.time_budget_s = time_budget_s;
        const IterationPlan plan{1, n_steps, n_species, n_species - static_cast<int>(stoich.size())};
        EnumerationResult res;
        {
          py::gil_scoped_release release;
          res = enumerate(plan, overall_of(names, stoich), opt);
        }
        py::list out;
        for (const auto& mat : res.mechanisms) out.append(to_rows(mat));
        return py::make_tuple(out, res.complete);
      },
      py::arg("species"), py::arg("stoichiometry"), py::arg("n_steps"), py::arg("n_species"), py::arg("workers") = 1,
      py::arg("time_budget_s") = 0.0, "Feasible mechanism matrices and whether the search finished.");
  m.def(
      "is_feasible",
      [](const Rows& rows, const std::vector<std::string>& names, const std::vector<int>& stoich) {
        return static_cast<bool>(check_feasible(to_matrix(rows), overall_of(names, stoich)));
      },
      py::arg("matrix"), py::arg("species"), py::arg("stoichiometry"));
  m.def(
      "isomorphic", [](const Rows& a, const Rows& b, int n_observed) {
        return isomorphic(to_matrix(a), to_matrix(b), n_observed);
      },
      py::arg("a"), py::arg("b"), py::arg("n_observed"));

  m.def(
      "reactions",
      [](const Rows& rows, const std::vector<std::string>& observed) {
        const MechanismMatrix mat = to_matrix(rows);
        return to_reaction_strings(mat, column_names(observed, mat.cols()));
      },
      py::arg("matrix"), py::arg("observed"));
  m.def(
      "odes",
      [](const Rows& rows, const std::vector<std::string>& observed) {
        const MechanismMatrix mat = to_matrix(rows);
        return ode_strings(to_kinetic_model(mat), column_names(observed, mat.cols()));
      },
      py::arg("matrix"), py::arg("observed"));
  m.def(
      "simulate",
      [](const Rows& rows, const std::vector<double>& theta, const std::vector<double>& c0,
         const std::vector<double>& times) {
        const Trajectory t = simulate(to_kinetic_model(to_matrix(rows)), theta, c0, times);
        if (!t.ok()) throw std::runtime_error("integration failed: " + t.failure);
        return t.states;
      },
      py::arg("matrix"), py::arg("theta"), py::arg("c0"), py::arg("times"),
      "States on the grid, one row per time; intermediates included.");
  m.def(
      "fit",
      [](const Rows& rows, const Dataset& data, double lower, double upper, int n_starts, std::uint64_t seed,
         int workers) {
        FitOptions opt;
        opt.bounds = {lower, upper};
        opt.n_starts = n_starts;
        opt.seed = seed;
        opt.workers = workers;
        FitResult r;
        {
          py::gil_scoped_release release;
          r = estimate(to_kinetic_model(to_matrix(rows)), data, opt);
        }
        const double l = nll(r.sse, r.n_obs_total);
        py::dict out;
        out["theta"] = r.theta_star;
        out["sse"] = r.sse;
        out["nll"] = l;
        out["aic"] = aic(l, static_cast<int>(rows.size()));
        out["converged"] = r.converged;
        return out;
      },
      py::arg("matrix"), py::arg("data"), py::arg("lower") = 0.0, py::arg("upper") = 10.0, py::arg("n_starts") = 10,
      py::arg("seed") = 0, py::arg("workers") = 1);

  m.def(
      "discover",
      [](const std::filesystem::path& config, const Dataset& data, std::optional<std::uint64_t> seed,
         std::optional<int> workers) {
        const RunConfig cfg = read_config(config);
        DiscoveryOptions opt;
        opt.seed = seed.value_or(cfg.seed);
        opt.workers = workers.value_or(cfg.workers);
        RunReport run;
        {
          py::gil_scoped_release release;
          run = run_discovery(cfg.spec, data, opt);
        }
        return report_json(run, {data.observed_names, opt.seed, data.n_values()});
      },
      py::arg("config"), py::arg("data"), py::arg("seed") = py::none(), py::arg("workers") = py::none(),
      "Runs the discovery loop and returns the JSON report text.");

  m.def(
      "discrepancy",
      [](const Rows& a, const std::vector<double>& theta_a, const Rows& b, const std::vector<double>& theta_b,
         const std::vector<double>& x, const std::vector<double>& times) {
        KineticModel nu = to_kinetic_model(to_matrix(a));
        nu.theta = theta_a;
        KineticModel mu = to_kinetic_model(to_matrix(b));
        mu.theta = theta_b;
        return discrepancy(nu, mu, x, times);
      },
      py::arg("a"), py::arg("theta_a"), py::arg("b"), py::arg("theta_b"), py::arg("x"), py::arg("times"));
  m.def(
      "design",
      [](const Rows& a, const std::vector<double>& theta_a, const Rows& b, const std::vector<double>& theta_b,
         const std::vector<double>& lower, const std::vector<double>& upper, const std::vector<double>& times,
         int budget, std::uint64_t seed) {
        KineticModel nu = to_kinetic_model(to_matrix(a));
        nu.theta = theta_a;
        KineticModel mu = to_kinetic_model(to_matrix(b));
        mu.theta = theta_b;
        const DoEProposal p = design(nu, mu, {lower, upper, times}, budget, seed);
        return py::make_tuple(p.x_star, p.objective);
      },
      py::arg("a"), py::arg("theta_a"), py::arg("b"), py::arg("theta_b"), py::arg("lower"), py::arg("upper"),
      py::arg("times"), py::arg("budget") = 200, py::arg("seed") = 0);
}
