#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "kinmech/io.hpp"

using namespace kinmech;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("kinmech_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const char* kConfig = R"(
[reaction]
species = A, B, C
stoichiometry = -4, 1, 1

[search]
min_steps = 2
min_species = 3
max_iterations = 4
gen_time_budget_s = 60
workers = 2

[fit]
bounds = 0, 5
n_starts = 3
seed = 17

[doe]
lower = 0, 0, 0
upper = 10, 1, 1
budget = 25
time_grid = 0, 10, 11

[io]
dataset = data.csv
report = out/report.json
)";

}  // namespace

TEST_CASE("numbers round-trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(10.0) == "10");
}

TEST_CASE("dataset csv round-trip is exact") {
  TempDir dir;
  const Dataset d = generate(case_study("aldol"), 1);
  const fs::path csv = dir.path / "aldol.csv";
  write_dataset(csv, d);
  CHECK(fs::exists(initial_state_path(csv)));
  const Dataset back = read_dataset(csv, d.observed_names);
  CHECK(back.observed_names == d.observed_names);
  REQUIRE(back.experiments.size() == d.experiments.size());
  for (std::size_t e = 0; e < d.experiments.size(); ++e) {
    CHECK(back.experiments[e].times == d.experiments[e].times);
    CHECK(back.experiments[e].y == d.experiments[e].y);
    CHECK(back.experiments[e].c0_observed == d.experiments[e].c0_observed);
  }
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "experiment,time,A,B,C,D");
}

TEST_CASE("dataset without initial states uses the first row") {
  TempDir dir;
  write_text(dir.path / "d.csv", "experiment,time,B,A\n1,0,0.5,-0.1\n1,1,0.7,0.2\n2,0,1,2\n2,2,3,4\n");
  const Dataset d = read_dataset(dir.path / "d.csv", std::vector<std::string>{"A", "B"});
  REQUIRE(d.experiments.size() == 2);
  CHECK(d.experiments[0].c0_observed == std::vector<double>{0.0, 0.5});
  CHECK(d.experiments[1].y(1, 0) == 4.0);
  CHECK(d.experiments[1].y(1, 1) == 3.0);
}

TEST_CASE("dataset diagnostics") {
  TempDir dir;
  const fs::path p = dir.path / "bad.csv";
  auto fails_with = [&](const std::string& text, const std::string& message,
                        std::optional<std::vector<std::string>> names = std::nullopt) {
    write_text(p, text);
    try {
      read_dataset(p, names);
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find(message) != std::string::npos);
    }
  };
  fails_with("experiment,time,A,B\n1,0,1,2\n", "missing column 'C'", std::vector<std::string>{"A", "B", "C"});
  fails_with("experiment,time,A\n1,0,1\n1,0,2\n", "strictly increasing");
  fails_with("experiment,time,A\n1,0,1\n2,0,1\n1,1,2\n", "not contiguous");
  fails_with("experiment,time,A\n1,0,x\n", "bad number");
  fails_with("experiment,time,A\n1,0\n", "expected 3 fields");
  fails_with("time,A\n0,1\n", "header");
  CHECK_THROWS_AS(read_dataset(dir.path / "missing.csv"), DataError);
}

TEST_CASE("config parses every section") {
  const RunConfig c = parse_config(kConfig, "/base");
  CHECK(c.spec.overall.species_names == std::vector<std::string>{"A", "B", "C"});
  CHECK(c.spec.overall.stoich == std::vector<int>{-4, 1, 1});
  CHECK(c.spec.min_steps == 2);
  CHECK(c.spec.max_iterations == 4);
  CHECK(c.spec.gen_time_budget_s == 60.0);
  CHECK(c.workers == 2);
  CHECK(c.spec.rate_bounds.upper == 5.0);
  CHECK(c.spec.multistart_count == 3);
  CHECK(c.seed == 17);
  CHECK(c.doe_upper == std::vector<double>{10, 1, 1});
  CHECK(c.doe_budget == 25);
  CHECK(c.doe_times.size() == 11);
  CHECK(c.doe_times.back() == 10.0);
  CHECK(c.dataset_path == fs::path("/base/data.csv"));
  CHECK(c.report_path == fs::path("/base/out/report.json"));
}

TEST_CASE("config rejects unknown keys and bad values") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string reaction = "[reaction]\nspecies = A, B\nstoichiometry = -1, 1\n";
  CHECK(message(reaction).empty());
  CHECK(message(reaction + "[search]\nmin_step = 1\n").find("unknown key 'min_step'") != std::string::npos);
  CHECK(message(reaction + "[extra]\nx = 1\n").find("unknown section") != std::string::npos);
  CHECK(message(reaction + "[fit]\nn_starts = many\n").find("bad number") != std::string::npos);
  CHECK(message(reaction + "[fit]\nbounds = 3, 3\n").find("empty bounds interval") != std::string::npos);
  CHECK(message(reaction + "[search]\nmin_steps = 1\nmin_species = 1\n").find("min_species below observed count") !=
        std::string::npos);
  CHECK(message("[reaction]\nspecies = A, B\nstoichiometry = -1\n").find("lengths differ") != std::string::npos);
}

TEST_CASE("missing sizes are suggested") {
  const RunConfig c = parse_config("[reaction]\nspecies = A, B, C\nstoichiometry = -1, 3, 1\n");
  CHECK(c.spec.min_steps == 3);
  CHECK(c.spec.min_species == 4);
}

TEST_CASE("report json and summary") {
  RunReport run;
  IterationReport it;
  it.plan = {1, 1, 2, 0};
  it.n_candidates = 1;
  it.n_fitted = 1;
  ScoredCandidate c;
  c.matrix = MechanismMatrix{{-1, 1}};
  c.fit.theta_star = {0.25};
  c.fit.sse = 2.0;
  c.fit.n_obs_total = 40;
  c.d = 1;
  c.nll = nll(2.0, 40);
  c.aic = aic(c.nll, 1);
  it.all_scores = {c};
  run.iterations = {it};
  run.winner = c;
  run.winner_iteration = 1;
  run.terminated_reason = Termination::kMaxIterations;

  const ReportContext ctx{{"A", "B"}, 5, 40};
  const std::string json = report_json(run, ctx);
  CHECK(json == report_json(run, ctx));
  CHECK(json.find("\"format_version\": 1") != std::string::npos);
  CHECK(json.find("\"A -> B\"") != std::string::npos);

  const std::string table = summary_table(run, {"A", "B"});
  CHECK(table.find("terminated: max_iterations at iteration 1; winner: iteration 1") != std::string::npos);

  TempDir dir;
  write_text(dir.path / "r.json", json);
  const LoadedReport back = read_report(dir.path / "r.json");
  REQUIRE(back.candidates.size() == 1);
  CHECK(back.candidates[0].theta == std::vector<double>{0.25});
  CHECK(back.candidates[0].aic == c.aic);
  CHECK_THROWS_WITH_AS(two_best(back), doctest::Contains("need two models"), DataError);
}

TEST_CASE("two best skips structural duplicates") {
  LoadedReport r;
  r.observed_names = {"A", "B", "C"};
  r.candidates = {{MechanismMatrix{{-2, 1, 0}, {-2, 0, 1}}, {1, 2}, -10.0, 1},
                  {MechanismMatrix{{-2, 0, 1}, {-2, 1, 0}}, {2, 1}, -10.0, 1},
                  {MechanismMatrix{{-1, 1, 0, -1}, {-1, 0, 1, 1}}, {1, 1}, -5.0, 2}};
  const auto [a, b] = two_best(r);
  CHECK(a.aic == -10.0);
  CHECK(b.aic == -5.0);
}
