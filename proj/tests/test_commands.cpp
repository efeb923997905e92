#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "oqsim/commands.hpp"
#include "oqsim/errors.hpp"
#include "oqsim/io.hpp"

using namespace oqsim;
namespace fs = std::filesystem;

namespace {

struct ScratchDir {
  fs::path dir;

  explicit ScratchDir(const std::string& tag) {
    dir = fs::temp_directory_path() / ("oqsim_cmd_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~ScratchDir() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Rows below the header, '#' metadata line skipped, cells split on commas.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

nlohmann::json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

// Scenario shared by the command tests: tiny grids so everything is instant.
std::string scenario_json(const fs::path& out_dir, const std::string& extra_sections) {
  std::string text = R"({
  "seed": 5,
  "grids": {"system": {"n": 8, "length": 8.0}, "environment": {"n": 8, "length": 8.0}},
  "hamiltonian": {"preset": "coupled_harmonic",
                  "params": {"m1": 1.0, "m2": 1.0, "omega1": 1.0,
                             "omega2": 1.2, "lambda": 0.2}},
  "initial": {"system": {"center": 0.5, "sigma": 0.7}, "environment": {"sigma": 0.8}},
  "output": {"directory": ")" +
                     out_dir.string() + "\"}";
  if (!extra_sections.empty()) text += ",\n" + extra_sections;
  text += "\n}";
  return text;
}

const char* kEvolutionSection =
    R"("evolution": {"time": 0.4, "steps": 8, "snapshot_stride": 4, "store_states": true})";

}  // namespace

TEST_CASE("the run command writes time series, marginals and a manifest") {
  const ScratchDir scratch("run");
  const fs::path out = scratch.dir / "out";
  const Config cfg =
      load_config(scratch.write("run.json", scenario_json(out, kEvolutionSection)));

  std::ostringstream log;
  cmd_run(cfg, log);
  CHECK(log.str().find("run: 8 steps") != std::string::npos);

  for (const char* name : {"timeseries.csv", "reduced_density.csv", "marginal_system.csv",
                           "marginal_environment.csv", "manifest.json", "state_0.csv",
                           "state_4.csv", "state_8.csv"}) {
    CHECK(fs::exists(out / name));
  }

  const auto rows = read_csv(out / "timeseries.csv");
  REQUIRE(rows.size() == 3);  // steps 0, 4 and 8
  CHECK(std::stod(rows[0][0]) == 0.0);
  CHECK(std::stod(rows[2][0]) == doctest::Approx(0.4).epsilon(1e-12));
  for (const auto& row : rows) {
    REQUIRE(row.size() == 6);
    const double purity_value = std::stod(row[1]);
    CHECK(purity_value > 0.0);
    CHECK(purity_value < 1.0 + 1e-9);
  }
  // Entanglement only grows from the product start here.
  CHECK(std::stod(rows[0][1]) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::stod(rows[2][1]) < 1.0);

  const auto marginal = read_csv(out / "marginal_system.csv");
  REQUIRE(marginal.size() == 8);
  double mass = 0.0;
  for (const auto& row : marginal) mass += std::stod(row[1]);
  CHECK(mass * 1.0 == doctest::Approx(1.0).epsilon(1e-10));  // dq = 1 here

  const nlohmann::json manifest = read_manifest(out);
  CHECK(manifest.at("command") == "run");
  CHECK(manifest.at("seed") == 5);
  CHECK(manifest.at("sign") == "-");
  CHECK(manifest.at("config_hash") == hex64(fnv1a64(cfg.canonical)));
  CHECK(manifest.at("max_step_norm_drift").get<double>() < 1e-12);
  const auto outputs = manifest.at("outputs").get<std::vector<std::string>>();
  CHECK(outputs.size() == 7);
  for (const char* name : {"timeseries.csv", "state_4.csv", "reduced_density.csv"}) {
    CHECK(std::find(outputs.begin(), outputs.end(), name) != outputs.end());
  }

  // Reruns are byte-identical: no timestamps or machine identifiers anywhere.
  const std::string timeseries = slurp(out / "timeseries.csv");
  const std::string kernel = slurp(out / "reduced_density.csv");
  const std::string manifest_bytes = slurp(out / "manifest.json");
  std::ostringstream again;
  cmd_run(cfg, again);
  CHECK(slurp(out / "timeseries.csv") == timeseries);
  CHECK(slurp(out / "reduced_density.csv") == kernel);
  CHECK(slurp(out / "manifest.json") == manifest_bytes);
}

TEST_CASE("the unravel command reports exhaustive and sampled reconstructions") {
  const ScratchDir scratch("unravel");
  const fs::path out = scratch.dir / "out";
  const std::string sections = std::string(kEvolutionSection) +
                               ",\n\"unravel\": {\"times\": [0.4, 0.0], \"samples\": 200}";
  const Config cfg = load_config(scratch.write("run.json", scenario_json(out, sections)));

  std::ostringstream log;
  CommandOptions exhaustive_opt;
  exhaustive_opt.exhaustive = true;
  cmd_unravel(apply_overrides(cfg, exhaustive_opt), log);

  auto rows = read_csv(out / "ensemble.csv");
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[0][0]) == 0.0);  // times are sorted on output
  CHECK(std::stod(rows[1][0]) == doctest::Approx(0.4).epsilon(1e-12));
  for (const auto& row : rows) {
    CHECK(std::stoll(row[1]) == 8);  // every environment point enumerated
    CHECK(std::abs(std::stod(row[2]) - std::stod(row[3])) < 1e-12);
    CHECK(std::stod(row[4]) < 1e-12);
    CHECK(std::stod(row[5]) == 0.0);
  }
  CHECK(read_manifest(out).at("command") == "unravel");

  // Monte Carlo: seeded, reproducible, and seed-sensitive.
  cmd_unravel(cfg, log);
  rows = read_csv(out / "ensemble.csv");
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(std::stoll(row[1]) == 200);
    CHECK(std::stod(row[4]) > 0.0);
    CHECK(std::stod(row[4]) < 0.5);
    CHECK(std::stod(row[5]) > 0.0);
  }
  const std::string first = slurp(out / "ensemble.csv");
  cmd_unravel(cfg, log);
  CHECK(slurp(out / "ensemble.csv") == first);

  CommandOptions reseed;
  reseed.seed = 6;
  cmd_unravel(apply_overrides(cfg, reseed), log);
  CHECK(slurp(out / "ensemble.csv") != first);

  // Momentum-basis readout keeps the reconstruction exact under enumeration.
  const std::string momentum_sections =
      std::string(kEvolutionSection) +
      ",\n\"unravel\": {\"times\": [0.4], \"basis\": \"momentum\", \"exhaustive\": true}";
  const Config momentum_cfg =
      load_config(scratch.write("momentum.json", scenario_json(out, momentum_sections)));
  cmd_unravel(momentum_cfg, log);
  rows = read_csv(out / "ensemble.csv");
  REQUIRE(rows.size() == 1);
  CHECK(std::stod(rows[0][4]) < 1e-12);

  const std::string negative_sections =
      std::string(kEvolutionSection) + ",\n\"unravel\": {\"times\": [-0.5]}";
  const Config negative =
      load_config(scratch.write("negative.json", scenario_json(out, negative_sections)));
  CHECK_THROWS_AS(cmd_unravel(negative, log), ConfigError);
}

TEST_CASE("the wigner command cross-checks both marginalization paths") {
  const ScratchDir scratch("wigner");
  const fs::path out = scratch.dir / "out";
  const std::string sections =
      std::string(kEvolutionSection) + ",\n\"wigner\": {\"slices\": [[3, 4]]}";
  const Config cfg = load_config(scratch.write("run.json", scenario_json(out, sections)));

  std::ostringstream log;
  cmd_wigner(cfg, log);

  for (const char* name : {"wigner_direct.csv", "wigner_marginalized.csv", "wigner_checks.csv",
                           "wigner_slice_3_4.csv"}) {
    CHECK(fs::exists(out / name));
  }
  const auto checks = read_csv(out / "wigner_checks.csv");
  REQUIRE(checks.size() == 6);
  for (const auto& row : checks) {
    const std::string& name = row[0];
    const double value = std::stod(row[1]);
    if (name == "two_path_max_diff" || name == "position_marginal_max_diff") {
      CHECK(value < 1e-10);
    } else if (name.rfind("mass_", 0) == 0) {
      CHECK(value == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  const auto direct = read_csv(out / "wigner_direct.csv");
  CHECK(direct.size() == 64);  // 8 positions x 8 momenta
  const auto slice = read_csv(out / "wigner_slice_3_4.csv");
  CHECK(slice.size() == 64);

  // Without an evolution section the table describes the initial state.
  const fs::path out0 = scratch.dir / "initial";
  const Config initial_cfg =
      load_config(scratch.write("initial.json", scenario_json(out0, "")));
  cmd_wigner(initial_cfg, log);
  CHECK(read_manifest(out0).at("outputs").size() == 3);

  const std::string bad_sections =
      std::string(kEvolutionSection) + ",\n\"wigner\": {\"slices\": [[99, 0]]}";
  const Config bad =
      load_config(scratch.write("bad.json", scenario_json(out, bad_sections)));
  CHECK_THROWS_AS(cmd_wigner(bad, log), ConfigError);
}

TEST_CASE("the gaussian command reports covariance residuals per time") {
  const ScratchDir scratch("gaussian");
  const fs::path out = scratch.dir / "out";
  const std::string sections = std::string(kEvolutionSection) +
                               ",\n\"gaussian\": {\"times\": [0.2, 0.4], \"samples\": 2000}";
  const Config cfg = load_config(scratch.write("run.json", scenario_json(out, sections)));

  std::ostringstream log;
  cmd_gaussian(cfg, log);
  const auto rows = read_csv(out / "residuals.csv");
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 4);
    CHECK(std::stoll(row[1]) == 2000);
    CHECK(std::stod(row[2]) < 5.0 / std::sqrt(2000.0));
    CHECK(std::stod(row[3]) > 0.0);
    CHECK(std::stod(row[3]) < 1.0 + 1e-9);
  }
  CHECK(read_manifest(out).at("command") == "gaussian");
}

TEST_CASE("the converge command tabulates the error against the dense reference") {
  const ScratchDir scratch("converge");
  const fs::path out = scratch.dir / "out";
  const std::string sections =
      R"("convergence": {"time": 0.5, "steps_list": [8, 16, 32]})";
  const Config cfg = load_config(scratch.write("run.json", scenario_json(out, sections)));

  std::ostringstream log;
  cmd_converge(cfg, log);
  const auto rows = read_csv(out / "convergence.csv");
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[2][2]) < std::stod(rows[0][2]));  // error shrinks with steps
  const double fitted = read_manifest(out).at("fitted_order").get<double>();
  CHECK(fitted > 0.7);
  CHECK(fitted < 1.3);
}

TEST_CASE("commands demand the sections they consume") {
  const ScratchDir scratch("sections");
  const Config cfg =
      load_config(scratch.write("run.json", scenario_json(scratch.dir / "out", "")));
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_run(cfg, log), ConfigError);
  CHECK_THROWS_AS(cmd_unravel(cfg, log), ConfigError);
  CHECK_THROWS_AS(cmd_gaussian(cfg, log), ConfigError);
  CHECK_THROWS_AS(cmd_converge(cfg, log), ConfigError);
}

TEST_CASE("command overrides replace seed, sign, output and sampling mode") {
  const ScratchDir scratch("override");
  const std::string sections =
      std::string(kEvolutionSection) + ",\n\"unravel\": {\"times\": [0.4]}";
  const Config cfg =
      load_config(scratch.write("run.json", scenario_json(scratch.dir / "a", sections)));

  CommandOptions options;
  options.seed = 99;
  options.time_sign = +1;
  options.out_dir = (scratch.dir / "b").string();
  options.exhaustive = true;
  const Config patched = apply_overrides(cfg, options);
  CHECK(patched.seed == 99);
  CHECK(patched.time_sign == +1);
  CHECK(patched.output_dir == (scratch.dir / "b").string());
  REQUIRE(patched.unravel.has_value());
  CHECK(patched.unravel->exhaustive);
  // The hash covers the file contents, not the effective options.
  CHECK(patched.canonical == cfg.canonical);

  std::ostringstream log;
  cmd_run(patched, log);
  CHECK(fs::exists(scratch.dir / "b" / "timeseries.csv"));
  const nlohmann::json manifest = read_manifest(scratch.dir / "b");
  CHECK(manifest.at("seed") == 99);
  CHECK(manifest.at("sign") == "+");
}
