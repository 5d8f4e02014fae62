#include "kinmech/io.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kinmech/translate.hpp"

namespace kinmech {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T, typename Error>
T parse_value(const std::string& text, const std::string& what) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) throw Error("bad number '" + text + "' for " + what);
  return v;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (!lines.empty() && lines.front().starts_with("\xEF\xBB\xBF")) lines.front().erase(0, 3);
  return lines;
}

}  // namespace

// Dataset ---------------------------------------------------------------------

fs::path initial_state_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension();
  p += ".initial.csv";
  return p;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "experiment,time";
  for (const auto& n : data.observed_names) out << ',' << n;
  out << '\n';
  for (std::size_t e = 0; e < data.experiments.size(); ++e) {
    const Experiment& ex = data.experiments[e];
    for (std::size_t t = 0; t < ex.times.size(); ++t) {
      out << (e + 1) << ',' << format_number(ex.times[t]);
      for (Eigen::Index j = 0; j < ex.y.cols(); ++j) out << ',' << format_number(ex.y(static_cast<Eigen::Index>(t), j));
      out << '\n';
    }
  }
}

void write_dataset(const fs::path& csv, const Dataset& data) {
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw DataError("cannot write " + csv.string());
    write_dataset_csv(out, data);
  }
  std::ofstream out(initial_state_path(csv), std::ios::binary);
  if (!out) throw DataError("cannot write " + initial_state_path(csv).string());
  out << "experiment";
  for (const auto& n : data.observed_names) out << ',' << n;
  out << '\n';
  for (std::size_t e = 0; e < data.experiments.size(); ++e) {
    out << (e + 1);
    for (double v : data.experiments[e].c0_observed) out << ',' << format_number(v);
    out << '\n';
  }
}

Dataset read_dataset(const fs::path& csv, const std::optional<std::vector<std::string>>& expected_names) {
  const auto lines = read_lines(csv);
  if (lines.empty()) throw DataError(csv.string() + ": empty file");
  const auto header = split(lines.front(), ',');
  if (header.size() < 3 || header[0] != "experiment" || header[1] != "time")
    throw DataError(csv.string() + ": header must start with experiment,time and name at least one species");

  std::vector<std::string> names(header.begin() + 2, header.end());
  std::vector<int> source(names.size());
  std::iota(source.begin(), source.end(), 0);
  if (expected_names) {
    for (const auto& want : *expected_names) {
      if (std::find(names.begin(), names.end(), want) == names.end())
        throw DataError(csv.string() + ": dataset is missing column '" + want + "'");
    }
    for (const auto& have : names) {
      if (std::find(expected_names->begin(), expected_names->end(), have) == expected_names->end())
        throw DataError(csv.string() + ": unexpected column '" + have + "'");
    }
    source.clear();
    for (const auto& want : *expected_names)
      source.push_back(static_cast<int>(std::find(names.begin(), names.end(), want) - names.begin()));
    names = *expected_names;
  }
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
    throw DataError(csv.string() + ": duplicate species column");

  struct Rows {
    std::vector<double> times;
    std::vector<std::vector<double>> values;
  };
  std::vector<std::string> ids;
  std::map<std::string, Rows> rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto where = csv.string() + " line " + std::to_string(l + 1);
    const auto fields = split(lines[l], ',');
    if (fields.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    const std::string& id = fields[0];
    if (ids.empty() || ids.back() != id) {
      if (rows.count(id)) throw DataError(where + ": rows of experiment " + id + " are not contiguous");
      ids.push_back(id);
    }
    Rows& r = rows[id];
    const double t = parse_value<double, DataError>(fields[1], where);
    if (!std::isfinite(t) || (!r.times.empty() && !(t > r.times.back())))
      throw DataError(where + ": times must be finite and strictly increasing within an experiment");
    r.times.push_back(t);
    std::vector<double> v(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      v[j] = parse_value<double, DataError>(fields[2 + source[j]], where);
      if (!std::isfinite(v[j])) throw DataError(where + ": non-finite concentration");
    }
    r.values.push_back(std::move(v));
  }
  if (ids.empty()) throw DataError(csv.string() + ": no data rows");

  std::map<std::string, std::vector<double>> initial;
  const fs::path init_path = initial_state_path(csv);
  if (fs::exists(init_path)) {
    const auto init_lines = read_lines(init_path);
    if (init_lines.empty()) throw DataError(init_path.string() + ": empty file");
    const auto init_header = split(init_lines.front(), ',');
    if (init_header.empty() || init_header[0] != "experiment")
      throw DataError(init_path.string() + ": header must start with experiment");
    std::vector<int> col(names.size(), -1);
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto it = std::find(init_header.begin() + 1, init_header.end(), names[j]);
      if (it == init_header.end()) throw DataError(init_path.string() + ": missing column '" + names[j] + "'");
      col[j] = static_cast<int>(it - init_header.begin());
    }
    for (std::size_t l = 1; l < init_lines.size(); ++l) {
      const auto where = init_path.string() + " line " + std::to_string(l + 1);
      const auto fields = split(init_lines[l], ',');
      if (fields.size() != init_header.size()) throw DataError(where + ": wrong field count");
      std::vector<double> v(names.size());
      for (std::size_t j = 0; j < names.size(); ++j) {
        v[j] = parse_value<double, DataError>(fields[col[j]], where);
        if (!(v[j] >= 0) || !std::isfinite(v[j])) throw DataError(where + ": initial concentrations must be >= 0");
      }
      initial[fields[0]] = std::move(v);
    }
  }

  Dataset data;
  data.observed_names = names;
  for (const auto& id : ids) {
    const Rows& r = rows[id];
    Experiment e;
    e.times = r.times;
    e.y.resize(static_cast<Eigen::Index>(r.times.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t t = 0; t < r.times.size(); ++t) {
      for (std::size_t j = 0; j < names.size(); ++j)
        e.y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = r.values[t][j];
    }
    if (!initial.empty()) {
      const auto it = initial.find(id);
      if (it == initial.end()) throw DataError(init_path.string() + ": no initial state for experiment " + id);
      e.c0_observed = it->second;
    } else {
      e.c0_observed = r.values.front();
      for (double& v : e.c0_observed) v = std::max(v, 0.0);
    }
    data.experiments.push_back(std::move(e));
  }
  return data;
}

// Configuration -----------------------------------------------------------------

namespace {

using Ptree = boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"reaction", {"species", "stoichiometry"}},
      {"search", {"min_steps", "min_species", "max_iterations", "gen_time_budget_s", "workers"}},
      {"fit", {"bounds", "n_starts", "seed"}},
      {"doe", {"lower", "upper", "budget", "time_grid"}},
      {"io", {"dataset", "report"}},
  };
  return keys;
}

std::vector<double> doubles(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& f : split(text, ',')) out.push_back(parse_value<double, ConfigError>(f, key));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  Ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) throw ConfigError("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }

  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    const auto s = tree.get_child_optional(section);
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  };
  auto get_int = [&](const std::string& section, const std::string& key) -> std::optional<long long> {
    const auto v = get(section, key);
    if (!v) return std::nullopt;
    return parse_value<long long, ConfigError>(*v, section + "." + key);
  };
  auto get_double = [&](const std::string& section, const std::string& key) -> std::optional<double> {
    const auto v = get(section, key);
    if (!v) return std::nullopt;
    return parse_value<double, ConfigError>(*v, section + "." + key);
  };
  auto positive = [](long long v, const std::string& key) {
    if (v < 1 || v > 1'000'000'000) throw ConfigError("config: " + key + " must be a positive integer");
    return static_cast<int>(v);
  };

  RunConfig cfg;
  const auto species = get("reaction", "species");
  const auto stoich = get("reaction", "stoichiometry");
  if (!species || !stoich) throw ConfigError("config: [reaction] needs species and stoichiometry");
  cfg.spec.overall.species_names = split(*species, ',');
  for (const auto& f : split(*stoich, ','))
    cfg.spec.overall.stoich.push_back(static_cast<int>(parse_value<long long, ConfigError>(f, "stoichiometry")));
  if (cfg.spec.overall.species_names.size() != cfg.spec.overall.stoich.size())
    throw ConfigError("config: species and stoichiometry lengths differ");
  const ValidationReport reaction_ok = validate(cfg.spec.overall);
  if (!reaction_ok.ok()) throw ConfigError("config: " + reaction_ok.violations.front());

  const auto min_steps = get_int("search", "min_steps");
  const auto min_species = get_int("search", "min_species");
  if (min_steps && min_species) {
    cfg.spec.min_steps = positive(*min_steps, "min_steps");
    cfg.spec.min_species = positive(*min_species, "min_species");
  } else if (min_steps || min_species) {
    throw ConfigError("config: give both min_steps and min_species, or neither");
  } else {
    try {
      std::tie(cfg.spec.min_steps, cfg.spec.min_species) = suggest_minimum_size(cfg.spec.overall);
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (const auto v = get_int("search", "max_iterations")) cfg.spec.max_iterations = positive(*v, "max_iterations");
  if (const auto v = get_double("search", "gen_time_budget_s")) {
    if (!(*v >= 0)) throw ConfigError("config: gen_time_budget_s must be >= 0");
    cfg.spec.gen_time_budget_s = *v;
  }
  if (const auto v = get_int("search", "workers")) cfg.workers = positive(*v, "workers");

  if (const auto v = get("fit", "bounds")) {
    const auto b = doubles(*v, "fit.bounds");
    if (b.size() != 2) throw ConfigError("config: fit.bounds needs two numbers");
    cfg.spec.rate_bounds = {b[0], b[1]};
  }
  if (const auto v = get_int("fit", "n_starts")) cfg.spec.multistart_count = positive(*v, "n_starts");
  if (const auto v = get("fit", "seed")) cfg.seed = parse_value<std::uint64_t, ConfigError>(*v, "fit.seed");

  const std::size_t n_obs = cfg.spec.overall.size();
  if (const auto v = get("doe", "lower")) cfg.doe_lower = doubles(*v, "doe.lower");
  if (const auto v = get("doe", "upper")) cfg.doe_upper = doubles(*v, "doe.upper");
  if (cfg.doe_lower.empty() != cfg.doe_upper.empty()) throw ConfigError("config: give both doe.lower and doe.upper");
  if (!cfg.doe_lower.empty()) {
    if (cfg.doe_lower.size() != n_obs || cfg.doe_upper.size() != n_obs)
      throw ConfigError("config: doe bounds need one value per species");
    for (std::size_t j = 0; j < n_obs; ++j) {
      if (!(cfg.doe_lower[j] >= 0) || !(cfg.doe_upper[j] >= cfg.doe_lower[j]))
        throw ConfigError("config: empty bounds interval for doe species " + cfg.spec.overall.species_names[j]);
    }
  }
  if (const auto v = get_int("doe", "budget")) cfg.doe_budget = positive(*v, "doe.budget");
  if (const auto v = get("doe", "time_grid")) {
    const auto g = doubles(*v, "doe.time_grid");
    if (g.size() != 3 || !(g[1] > g[0]) || g[2] < 2 || g[2] != std::floor(g[2]))
      throw ConfigError("config: doe.time_grid is start, end, count with end > start and count >= 2");
    const int count = static_cast<int>(g[2]);
    for (int k = 0; k < count; ++k) cfg.doe_times.push_back(g[0] + (g[1] - g[0]) * k / (count - 1));
  }

  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  if (const auto v = get("io", "dataset")) cfg.dataset_path = resolve(*v);
  if (const auto v = get("io", "report")) cfg.report_path = resolve(*v);

  const ValidationReport ok = validate(cfg.spec);
  if (!ok.ok()) throw ConfigError("config: " + ok.violations.front());
  return cfg;
}

RunConfig read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

// Reports -----------------------------------------------------------------------

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json candidate_json(const ScoredCandidate& c, const std::vector<std::string>& observed) {
  Json j;
  Json rows = Json::array();
  for (int i = 0; i < c.matrix.rows(); ++i) {
    Json row = Json::array();
    for (int v : c.matrix.row(i)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  j["reactions"] = to_reaction_strings(c.matrix, column_names(observed, c.matrix.cols()));
  Json theta = Json::array();
  for (double v : c.fit.theta_star) theta.push_back(number(v));
  j["theta"] = std::move(theta);
  j["sse"] = number(c.fit.sse);
  j["nll"] = number(c.nll);
  j["d"] = c.d;
  j["aic"] = number(c.aic);
  j["converged"] = c.fit.converged;
  j["best_start"] = c.fit.best_start_index;
  return j;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? sep : "") + parts[k];
  return out;
}

}  // namespace

std::string report_json(const RunReport& run, const ReportContext& ctx) {
  Json j;
  j["format_version"] = kReportFormatVersion;
  j["observed_species"] = ctx.observed_names;
  j["seed"] = ctx.seed;
  j["n_observations"] = ctx.n_observations;
  j["terminated_reason"] = to_string(run.terminated_reason);
  j["winner_iteration"] = run.winner_iteration;
  j["winner"] = run.winner_iteration > 0 ? candidate_json(run.winner, ctx.observed_names) : Json(nullptr);
  Json its = Json::array();
  for (const auto& it : run.iterations) {
    Json ij;
    ij["iteration"] = it.plan.iteration_index;
    ij["n_steps"] = it.plan.n_steps;
    ij["n_species"] = it.plan.n_species;
    ij["n_candidates"] = it.n_candidates;
    ij["n_structures_fitted"] = it.n_fitted;
    ij["generation_complete"] = it.complete;
    ij["best_aic"] = number(it.best().aic);
    Json cands = Json::array();
    for (const auto& c : it.all_scores) cands.push_back(candidate_json(c, ctx.observed_names));
    ij["candidates"] = std::move(cands);
    its.push_back(std::move(ij));
  }
  j["iterations"] = std::move(its);
  return j.dump(1) + "\n";
}

std::string summary_table(const RunReport& run, const std::vector<std::string>& observed_names) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "Iteration" << std::setw(7) << "Steps" << std::setw(9) << "Species"
      << std::setw(12) << "Candidates" << std::setw(14) << "Best AIC"
      << "Best mechanism\n";
  for (const auto& it : run.iterations) {
    const auto& best = it.best();
    std::ostringstream aic;
    aic << std::fixed << std::setprecision(2) << best.aic;
    out << std::setw(10) << it.plan.iteration_index << std::setw(7) << it.plan.n_steps << std::setw(9)
        << it.plan.n_species << std::setw(12) << (std::to_string(it.n_candidates) + (it.complete ? "" : "+"))
        << std::setw(14) << aic.str()
        << join(to_reaction_strings(best.matrix, column_names(observed_names, best.matrix.cols())), "; ") << "\n";
  }
  const int last = run.iterations.empty() ? 0 : run.iterations.back().plan.iteration_index;
  out << "terminated: " << to_string(run.terminated_reason) << " at iteration " << last << "; winner: iteration "
      << run.winner_iteration << "\n";
  return out.str();
}

LoadedReport read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report " + path.string());
  LoadedReport out;
  try {
    const Json j = Json::parse(in);
    if (j.at("format_version").get<int>() != kReportFormatVersion)
      throw DataError(path.string() + ": unsupported format_version");
    out.observed_names = j.at("observed_species").get<std::vector<std::string>>();
    for (const auto& it : j.at("iterations")) {
      const int index = it.at("iteration").get<int>();
      for (const auto& c : it.at("candidates")) {
        if (c.at("aic").is_null()) continue;
        const auto rows = c.at("matrix").get<std::vector<std::vector<int>>>();
        if (rows.empty()) throw DataError(path.string() + ": empty candidate matrix");
        std::vector<std::int8_t> flat;
        for (const auto& r : rows) {
          if (r.size() != rows.front().size()) throw DataError(path.string() + ": ragged candidate matrix");
          for (int v : r) flat.push_back(static_cast<std::int8_t>(v));
        }
        ReportCandidate rc;
        rc.matrix = MechanismMatrix(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), flat);
        rc.theta = c.at("theta").get<std::vector<double>>();
        rc.aic = c.at("aic").get<double>();
        rc.iteration = index;
        if (static_cast<int>(rc.theta.size()) != rc.matrix.rows())
          throw DataError(path.string() + ": theta length differs from step count");
        out.candidates.push_back(std::move(rc));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(), [](const auto& a, const auto& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    return a.matrix < b.matrix;
  });
  return out;
}

std::pair<ReportCandidate, ReportCandidate> two_best(const LoadedReport& report) {
  const int n_obs = static_cast<int>(report.observed_names.size());
  if (!report.candidates.empty()) {
    const auto& first = report.candidates.front();
    for (std::size_t k = 1; k < report.candidates.size(); ++k) {
      if (!isomorphic(first.matrix, report.candidates[k].matrix, n_obs)) return {first, report.candidates[k]};
    }
  }
  throw DataError("need two models: the report has fewer than two distinct scored candidates");
}

}  // namespace kinmech
