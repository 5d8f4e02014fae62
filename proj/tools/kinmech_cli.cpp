// Command-line front end: simulate | generate | fit | discover | doe.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "kinmech/datagen.hpp"
#include "kinmech/doe.hpp"
#include "kinmech/fit.hpp"
#include "kinmech/genmech.hpp"
#include "kinmech/integrate.hpp"
#include "kinmech/io.hpp"
#include "kinmech/select.hpp"
#include "kinmech/translate.hpp"

namespace fs = std::filesystem;
using namespace kinmech;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
  std::optional<double> time_budget;
  std::string case_name;
  int iteration = 1;
  std::string mechanism;
  std::string data;
  std::string report;
};

RunConfig load_config(const Args& a) {
  if (a.config.empty()) throw UsageError("--config is required");
  RunConfig cfg = read_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.workers) cfg.workers = *a.workers;
  if (a.time_budget) cfg.spec.gen_time_budget_s = *a.time_budget;
  if (!a.data.empty()) cfg.dataset_path = a.data;
  return cfg;
}

Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) throw UsageError("no dataset: set [io] dataset or pass --data");
  return read_dataset(cfg.dataset_path, cfg.spec.overall.species_names);
}

void print_matrix(std::ostream& out, const MechanismMatrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out << (j ? " " : "") << std::setw(2) << m(i, j);
    out << "\n";
  }
}

int cmd_simulate(const Args& a) {
  const CaseStudy cs = case_study(a.case_name);
  const Dataset data = generate(cs, a.seed.value_or(0));
  if (a.out.empty()) {
    write_dataset_csv(std::cout, data);
  } else {
    write_dataset(a.out, data);
    std::cerr << "wrote " << a.out << " and " << initial_state_path(a.out).string() << "\n";
  }
  return kExitOk;
}

int cmd_generate(const Args& a) {
  const RunConfig cfg = load_config(a);
  if (a.iteration < 1) throw UsageError("--iteration must be >= 1");
  ProblemSpec spec = cfg.spec;
  spec.max_iterations = std::max(spec.max_iterations, a.iteration);
  const IterationPlan plan = plan_iteration(spec, a.iteration);
  EnumerateOptions opt;
  opt.time_budget_s = spec.gen_time_budget_s;
  opt.workers = cfg.workers;
  const EnumerationResult en = enumerate(plan, spec.overall, opt);
  const auto names = column_names(spec.overall.species_names, plan.n_species);
  std::ostringstream out;
  out << "# " << plan.n_steps << " steps x " << plan.n_species << " species; columns:";
  for (const auto& n : names) out << ' ' << n;
  out << "\n";
  for (std::size_t k = 0; k < en.mechanisms.size(); ++k) {
    out << "\nmechanism " << (k + 1) << "\n";
    print_matrix(out, en.mechanisms[k]);
    for (const auto& r : to_reaction_strings(en.mechanisms[k], names)) out << "  " << r << "\n";
  }
  out << "\n" << en.mechanisms.size() << " mechanisms\n";
  out << "complete: " << (en.complete ? "yes" : "no (generation time budget expired)") << "\n";
  std::cout << out.str();
  return kExitOk;
}

/// Species named in the reactions that are not observed become
/// intermediates, in order of first appearance.
MechanismMatrix parse_mechanism(const std::string& text, const std::vector<std::string>& observed,
                                std::vector<std::string>& names) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.find_first_not_of(" \t") != std::string::npos) parts.push_back(part);
  }
  if (parts.empty()) throw UsageError("--mechanism needs at least one reaction");
  names = observed;
  std::set<std::string> known(observed.begin(), observed.end());
  for (const auto& p : parts) {
    std::string token;
    for (char ch : p + " ") {
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
        token += ch;
        continue;
      }
      const auto first = token.find_first_not_of("0123456789");
      if (first != std::string::npos) {
        const std::string name = token.substr(first);
        if (known.insert(name).second) names.push_back(name);
      }
      token.clear();
    }
  }
  MechanismMatrix m(static_cast<int>(parts.size()), static_cast<int>(names.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const ElementaryStep step = parse_reaction_string(parts[i], names);
    for (const auto& r : step.reactants) m.at(static_cast<int>(i), r.species) -= static_cast<std::int8_t>(r.multiplicity);
    for (const auto& p : step.products) m.at(static_cast<int>(i), p.species) += static_cast<std::int8_t>(p.multiplicity);
  }
  return m;
}

int cmd_fit(const Args& a) {
  const RunConfig cfg = load_config(a);
  if (a.mechanism.empty()) throw UsageError("--mechanism is required, e.g. \"2A -> D; D -> B\"");
  const Dataset data = load_dataset(cfg);
  std::vector<std::string> names;
  const MechanismMatrix m = parse_mechanism(a.mechanism, cfg.spec.overall.species_names, names);
  FitOptions opt;
  opt.bounds = cfg.spec.rate_bounds;
  opt.n_starts = cfg.spec.multistart_count;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  const FitResult fit = estimate(to_kinetic_model(m), data, opt);
  const double l = nll(fit.sse, fit.n_obs_total);
  std::cout << std::setprecision(10);
  const auto reactions = to_reaction_strings(m, names);
  for (std::size_t k = 0; k < reactions.size(); ++k)
    std::cout << "k" << (k + 1) << " = " << fit.theta_star[k] << "    " << reactions[k] << "\n";
  std::cout << "sse = " << fit.sse << "\nn = " << fit.n_obs_total << "\nnll = " << l << "\naic = " << aic(l, m.rows())
            << "\nconverged = " << (fit.converged ? "yes" : "no") << "\n";
  return kExitOk;
}

void write_trajectories(const fs::path& stem, const RunReport& run, const Dataset& data) {
  const MechanismMatrix& m = run.winner.matrix;
  const KineticModel model = to_kinetic_model(m);
  const auto names = column_names(data.observed_names, m.cols());
  for (std::size_t e = 0; e < data.experiments.size(); ++e) {
    const Experiment& ex = data.experiments[e];
    std::vector<double> c0(m.cols(), 0.0);
    std::copy(ex.c0_observed.begin(), ex.c0_observed.end(), c0.begin());
    const Trajectory traj = simulate(model, run.winner.fit.theta_star, c0, ex.times);
    fs::path path = stem;
    path += ".exp" + std::to_string(e + 1) + ".csv";
    if (!traj.ok()) {
      std::cerr << "warning: winner failed to integrate for experiment " << (e + 1) << ": " << traj.failure << "\n";
      continue;
    }
    std::ofstream out(path, std::ios::binary);
    out << "time";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t t = 0; t < ex.times.size(); ++t) {
      out << format_number(ex.times[t]);
      for (int j = 0; j < m.cols(); ++j) out << ',' << format_number(traj.states(static_cast<Eigen::Index>(t), j));
      out << '\n';
    }
  }
}

int cmd_discover(const Args& a) {
  const RunConfig cfg = load_config(a);
  const Dataset data = load_dataset(cfg);
  fs::path report_path = a.out.empty() ? cfg.report_path : fs::path(a.out);
  if (report_path.empty()) report_path = "report.json";

  DiscoveryOptions opt;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.on_iteration = [](const IterationReport& it) {
    std::cerr << "iteration " << it.plan.iteration_index << ": " << it.n_candidates << " candidates ("
              << it.n_fitted << " distinct), best AIC " << it.best().aic << "\n";
  };
  const RunReport run = run_discovery(cfg.spec, data, opt);

  ReportContext ctx{data.observed_names, cfg.seed, data.n_values()};
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + report_path.string());
    out << report_json(run, ctx);
  }
  fs::path stem = report_path;
  stem.replace_extension();
  const std::string summary = summary_table(run, data.observed_names);
  {
    fs::path path = stem;
    path += ".summary.txt";
    std::ofstream out(path, std::ios::binary);
    out << summary;
  }
  if (run.winner_iteration > 0) write_trajectories(stem, run, data);
  std::cout << summary;
  return kExitOk;
}

int cmd_doe(const Args& a) {
  const RunConfig cfg = load_config(a);
  fs::path report_path = !a.report.empty() ? fs::path(a.report) : cfg.report_path;
  if (report_path.empty()) throw UsageError("no report: set [io] report or pass --report");
  const LoadedReport report = read_report(report_path);
  const auto [first, second] = two_best(report);

  DesignSpace space;
  space.lower = cfg.doe_lower;
  space.upper = cfg.doe_upper;
  space.times = cfg.doe_times;
  if (space.lower.empty() || space.times.empty()) {
    const Dataset data = load_dataset(cfg);
    if (space.times.empty()) space.times = data.experiments.front().times;
    if (space.lower.empty()) {
      space.lower.assign(data.n_observed(), 0.0);
      space.upper.assign(data.n_observed(), 0.0);
      for (const auto& e : data.experiments) {
        for (std::size_t j = 0; j < data.n_observed(); ++j) space.upper[j] = std::max(space.upper[j], e.c0_observed[j]);
      }
    }
  }

  KineticModel nu = to_kinetic_model(first.matrix);
  nu.theta = first.theta;
  KineticModel mu = to_kinetic_model(second.matrix);
  mu.theta = second.theta;
  const DoEProposal p = design(nu, mu, space, cfg.doe_budget, cfg.seed, cfg.workers);

  const auto& names = report.observed_names;
  std::cout << std::setprecision(10);
  std::cout << "model 1: iteration " << first.iteration << ", AIC " << first.aic << ": "
            << to_reaction_strings(first.matrix, column_names(names, first.matrix.cols())).front() << " ...\n";
  std::cout << "model 2: iteration " << second.iteration << ", AIC " << second.aic << ": "
            << to_reaction_strings(second.matrix, column_names(names, second.matrix.cols())).front() << " ...\n";
  std::cout << "x_star:";
  for (std::size_t j = 0; j < p.x_star.size(); ++j) std::cout << ' ' << names[j] << '=' << p.x_star[j];
  std::cout << "\nobjective: " << p.objective << "\nevaluations: " << p.evaluations << "\n";
  if (p.objective == 0.0)
    std::cerr << "warning: objective is 0; the two models predict the same observed trajectories on this space\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discover the simplest reaction mechanism consistent with kinetic data"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", a.config, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", a.seed, "random seed");
    sub->add_option("--workers", a.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--time-budget", a.time_budget, "generation budget per iteration, seconds")
        ->check(CLI::NonNegativeNumber);
  };

  auto* sim = app.add_subcommand("simulate", "write a case-study dataset as CSV");
  sim->add_option("case", a.case_name, "hypothetical | aldol | fructose")->required();
  sim->add_option("--seed", a.seed, "noise seed");
  sim->add_option("--out", a.out, "output CSV (stdout if omitted)");

  auto* gen = app.add_subcommand("generate", "list feasible mechanisms for one iteration");
  common(gen, true);
  gen->add_option("--iteration", a.iteration, "iteration index (default 1)");

  auto* fit = app.add_subcommand("fit", "fit one mechanism to the dataset");
  common(fit, true);
  fit->add_option("--mechanism", a.mechanism, "reactions separated by ';'");
  fit->add_option("--data", a.data, "dataset CSV (overrides [io] dataset)");

  auto* disc = app.add_subcommand("discover", "run the discovery loop");
  common(disc, true);
  disc->add_option("--out", a.out, "report path (overrides [io] report)");
  disc->add_option("--data", a.data, "dataset CSV (overrides [io] dataset)");

  auto* doe = app.add_subcommand("doe", "propose the most discriminating next experiment");
  common(doe, true);
  doe->add_option("--report", a.report, "report path (overrides [io] report)");
  doe->add_option("--data", a.data, "dataset CSV (overrides [io] dataset)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(a);
    if (gen->parsed()) return cmd_generate(a);
    if (fit->parsed()) return cmd_fit(a);
    if (disc->parsed()) return cmd_discover(a);
    if (doe->parsed()) return cmd_doe(a);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NoCandidatesError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return a.case_name.empty() ? kExitData : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
