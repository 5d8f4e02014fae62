#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinmech/datagen.hpp"
#include "kinmech/doe.hpp"
#include "kinmech/mechanism.hpp"
#include "kinmech/problem.hpp"
#include "kinmech/select.hpp"

namespace kinmech {

/// Malformed or inconsistent dataset / report contents.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text or values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double (at most 17 significant
/// digits), independent of locale.
std::string format_number(double v);

// Dataset CSV ---------------------------------------------------------------
//
// <name>.csv holds `experiment,time,<species...>`, one row per sample.
// <name>.initial.csv holds `experiment,<species...>`, the known initial state
// of each experiment. Without it the first row of each experiment is used,
// clipped at zero.

std::filesystem::path initial_state_path(const std::filesystem::path& csv);

void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset(const std::filesystem::path& csv, const Dataset& data);

/// Throws DataError with a diagnostic on any malformed content. When
/// expected_names is given the species columns must match it exactly.
Dataset read_dataset(const std::filesystem::path& csv,
                     const std::optional<std::vector<std::string>>& expected_names = std::nullopt);

// Configuration ---------------------------------------------------------------

struct RunConfig {
  ProblemSpec spec;
  int workers = 1;
  std::uint64_t seed = 0;
  int doe_budget = 200;
  std::vector<double> doe_lower;  // empty: use [0, max observed initial] of the dataset
  std::vector<double> doe_upper;
  std::vector<double> doe_times;  // empty: grid of the first experiment
  std::filesystem::path dataset_path;
  std::filesystem::path report_path;
};

/// INI text with sections [reaction] [search] [fit] [doe] [io]. Relative
/// paths are resolved against base_dir. Unknown sections or keys, bad
/// numbers and specs failing validate() throw ConfigError.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig read_config(const std::filesystem::path& path);

// Reports ---------------------------------------------------------------------

inline constexpr int kReportFormatVersion = 1;

struct ReportContext {
  std::vector<std::string> observed_names;
  std::uint64_t seed = 0;
  std::size_t n_observations = 0;
};

/// Machine report as JSON text (stable key order, shortest round-trip
/// numbers). Contains no timings, so equal inputs give equal bytes.
std::string report_json(const RunReport& run, const ReportContext& ctx);

/// Table of per-iteration bests followed by the termination line.
std::string summary_table(const RunReport& run, const std::vector<std::string>& observed_names);

struct ReportCandidate {
  MechanismMatrix matrix;
  std::vector<double> theta;
  double aic = 0.0;
  int iteration = 0;
};

struct LoadedReport {
  std::vector<std::string> observed_names;
  std::vector<ReportCandidate> candidates;  // every iteration, ascending AIC
};

LoadedReport read_report(const std::filesystem::path& path);

/// Lowest-AIC candidate and the lowest-AIC one that is structurally
/// different from it. Throws DataError with "need two models" otherwise.
std::pair<ReportCandidate, ReportCandidate> two_best(const LoadedReport& report);

}  // namespace kinmech
