#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "oqsim/config.hpp"
#include "oqsim/errors.hpp"
#include "oqsim/io.hpp"

using namespace oqsim;
namespace fs = std::filesystem;

namespace {

struct ScratchDir {
  fs::path dir;

  explicit ScratchDir(const std::string& tag) {
    dir = fs::temp_directory_path() / ("oqsim_test_" + tag);
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

const char* kFullConfig = R"({
  "seed": 7,
  "sign": "+",
  "grids": {"system": {"n": 32, "length": 16.0, "center": 0.5},
            "environment": {"n": 16, "length": 12.0}},
  "hamiltonian": {"preset": "coupled_harmonic",
                  "params": {"m1": 1.0, "m2": 1.0, "omega1": 1.0,
                             "omega2": 1.2, "lambda": 0.1}},
  "initial": {"system": {"center": 0.4, "sigma": 0.8, "momentum": 0.3},
              "environment": {"sigma": 0.6}},
  "evolution": {"time": 1.5, "steps": 64, "scheme": "strang",
                "snapshot_stride": 8, "store_states": true},
  "unravel": {"times": [0.5, 1.5], "samples": 250, "basis": "momentum",
              "exhaustive": true},
  "wigner": {"slices": [[3, 4], [7, 2]]},
  "gaussian": {"times": [1.5], "samples": 500},
  "convergence": {"time": 0.5, "steps_list": [8, 16, 32]},
  "output": {"directory": "results"}
})";

}  // namespace

TEST_CASE("a full configuration file parses into every section") {
  const ScratchDir scratch("full");
  const Config cfg = load_config(scratch.write("run.json", kFullConfig));

  CHECK(cfg.seed == 7);
  CHECK(cfg.time_sign == +1);
  CHECK(cfg.grid1.n == 32);
  CHECK(cfg.grid1.length == 16.0);
  CHECK(cfg.grid1.center == 0.5);
  CHECK(cfg.grid2.n == 16);
  CHECK(cfg.grid2.center == 0.0);
  CHECK(cfg.hamiltonian.preset == "coupled_harmonic");
  CHECK(cfg.hamiltonian.params.at("lambda") == 0.1);
  CHECK(cfg.initial1.center == 0.4);
  CHECK(cfg.initial1.momentum == 0.3);
  CHECK(cfg.initial2.sigma == 0.6);
  CHECK(cfg.initial2.momentum == 0.0);
  REQUIRE(cfg.evolution.has_value());
  CHECK(cfg.evolution->time == 1.5);
  CHECK(cfg.evolution->steps == 64);
  CHECK(cfg.evolution->scheme == SplitScheme::kStrang);
  CHECK(cfg.evolution->snapshot_stride == 8);
  CHECK(cfg.evolution->store_states);
  REQUIRE(cfg.unravel.has_value());
  CHECK(cfg.unravel->times == std::vector<double>{0.5, 1.5});
  CHECK(cfg.unravel->samples == 250);
  CHECK(cfg.unravel->basis == "momentum");
  CHECK(cfg.unravel->exhaustive);
  REQUIRE(cfg.wigner.slices.size() == 2);
  CHECK(cfg.wigner.slices[0] == std::make_pair<Eigen::Index, Eigen::Index>(3, 4));
  REQUIRE(cfg.gaussian.has_value());
  CHECK(cfg.gaussian->samples == 500);
  REQUIRE(cfg.convergence.has_value());
  CHECK(cfg.convergence->steps_list == std::vector<Eigen::Index>{8, 16, 32});
  CHECK(cfg.output_dir == "results");
  CHECK(cfg.base_dir == scratch.dir);

  // Materialization matches the direct constructors.
  const Grid g1 = grid_from(cfg.grid1);
  CHECK((g1.points - make_grid(32, 16.0, 0.5).points).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXcd packet = packet_from(cfg.initial1, g1);
  CHECK((packet - gaussian_packet(g1, 0.4, 0.8, 0.3)).cwiseAbs().maxCoeff() == 0.0);
  const Grid g2 = grid_from(cfg.grid2);
  const HamiltonianSpec spec = hamiltonian_from(cfg.hamiltonian, g1, g2, cfg.base_dir);
  const HamiltonianSpec direct = make_preset("coupled_harmonic", g1, g2, cfg.hamiltonian.params);
  CHECK((spec.v1 - direct.v1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((spec.v12 - direct.v12).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the canonical form ignores key order and whitespace") {
  const ScratchDir scratch("canon");
  const Config a = load_config(scratch.write("a.json", kFullConfig));
  const char* reordered = R"({
    "output": {"directory": "results"},
    "initial": {"environment": {"sigma": 0.6},
                "system": {"momentum": 0.3, "sigma": 0.8, "center": 0.4}},
    "grids": {"environment": {"length": 12.0, "n": 16},
              "system": {"center": 0.5, "length": 16.0, "n": 32}},
    "hamiltonian": {"params": {"lambda": 0.1, "m1": 1.0, "m2": 1.0,
                               "omega1": 1.0, "omega2": 1.2},
                    "preset": "coupled_harmonic"},
    "convergence": {"steps_list": [8, 16, 32], "time": 0.5},
    "gaussian": {"samples": 500, "times": [1.5]},
    "wigner": {"slices": [[3, 4], [7, 2]]},
    "unravel": {"exhaustive": true, "basis": "momentum", "samples": 250,
                "times": [0.5, 1.5]},
    "evolution": {"store_states": true, "snapshot_stride": 8, "scheme": "strang",
                  "steps": 64, "time": 1.5},
    "sign": "+",
    "seed": 7
  })";
  const Config b = load_config(scratch.write("b.json", reordered));
  CHECK(a.canonical == b.canonical);
  CHECK(hex64(fnv1a64(a.canonical)) == hex64(fnv1a64(b.canonical)));
}

TEST_CASE("defaults cover everything a command does not need") {
  const ScratchDir scratch("minimal");
  const char* minimal = R"({
    "grids": {"system": {"n": 8, "length": 8.0},
              "environment": {"n": 8, "length": 8.0}},
    "hamiltonian": {"preset": "coupled_harmonic"},
    "initial": {"system": {"sigma": 1.0}, "environment": {"sigma": 1.0}}
  })";
  const Config cfg = load_config(scratch.write("run.json", minimal));
  CHECK(cfg.seed == 0);
  CHECK(cfg.time_sign == -1);
  CHECK_FALSE(cfg.evolution.has_value());
  CHECK_FALSE(cfg.unravel.has_value());
  CHECK_FALSE(cfg.gaussian.has_value());
  CHECK_FALSE(cfg.convergence.has_value());
  CHECK(cfg.wigner.slices.empty());
  CHECK(cfg.output_dir == "out");
}

TEST_CASE("configuration mistakes fail with the offending path") {
  const ScratchDir scratch("bad");
  const auto expect_error = [&](const std::string& name, const std::string& text,
                                const std::string& needle) {
    const fs::path path = scratch.write(name, text);
    try {
      load_config(path);
      FAIL("expected ConfigError for " << name);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  const std::string grids = R"("grids": {"system": {"n": 8, "length": 8.0},
                                         "environment": {"n": 8, "length": 8.0}})";
  const std::string ham = R"("hamiltonian": {"preset": "coupled_harmonic"})";
  const std::string initial =
      R"("initial": {"system": {"sigma": 1.0}, "environment": {"sigma": 1.0}})";
  const std::string base = grids + "," + ham + "," + initial;

  expect_error("unknown_top.json", "{" + base + R"(, "extra": 1})", "unknown key 'extra'");
  expect_error("unknown_grid.json",
               R"({"grids": {"system": {"n": 8, "length": 8.0, "foo": 1},
                             "environment": {"n": 8, "length": 8.0}},)" +
                   ham + "," + initial + "}",
               "grids.system: unknown key 'foo'");
  expect_error("missing_grids.json", "{" + ham + "," + initial + "}", "missing key 'grids'");
  expect_error("missing_sigma.json",
               "{" + grids + "," + ham +
                   R"(, "initial": {"system": {}, "environment": {"sigma": 1.0}}})",
               "missing key 'sigma'");
  expect_error("bad_seed.json", R"({"seed": -3,)" + base + "}", "nonnegative");
  expect_error("bad_sign.json", R"({"sign": "x",)" + base + "}", "'-' or '+'");
  expect_error("bad_scheme.json",
               "{" + base + R"(, "evolution": {"time": 1.0, "steps": 4, "scheme": "euler"}})",
               "'lie' or 'strang'");
  expect_error("bad_steps.json",
               "{" + base + R"(, "evolution": {"time": 1.0, "steps": 0}})", "must be >= 1");
  expect_error("bad_basis.json",
               "{" + base + R"(, "unravel": {"times": [1.0], "basis": "energy"}})",
               "'position' or 'momentum'");
  expect_error("empty_times.json",
               "{" + base + R"(, "unravel": {"times": []}})", "non-empty array");
  expect_error("bad_slice.json",
               "{" + base + R"(, "wigner": {"slices": [[1]]}})", "wigner.slices[0]");
  expect_error("bad_type.json",
               R"({"grids": {"system": {"n": "eight", "length": 8.0},
                             "environment": {"n": 8, "length": 8.0}},)" +
                   ham + "," + initial + "}",
               "expected an integer");
  expect_error("not_json.json", "{]", "not_json.json");
  CHECK_THROWS_AS(load_config(scratch.dir / "absent.json"), ConfigError);
}

TEST_CASE("tabulated potentials load from files next to the configuration") {
  const ScratchDir scratch("tab");
  const Grid g1 = make_grid(8, 8.0);
  const Grid g2 = make_grid(4, 4.0);

  std::string v1 = "# quadratic well\n\n";
  for (Eigen::Index k = 0; k < g1.n; ++k) {
    v1 += format_double(0.5 * g1.points(k) * g1.points(k)) + "\n";
  }
  std::string v2;
  for (Eigen::Index l = 0; l < g2.n; ++l) {
    v2 += format_double(0.25 * g2.points(l) * g2.points(l)) + "\n";
  }
  std::string v12;
  for (Eigen::Index k = 0; k < g1.n; ++k) {
    for (Eigen::Index l = 0; l < g2.n; ++l) {
      if (l) v12 += ",";
      v12 += format_double(0.1 * g1.points(k) * g2.points(l));
    }
    v12 += "\n";
  }
  scratch.write("v1.txt", v1);
  scratch.write("v2.txt", v2);
  scratch.write("v12.csv", v12);

  HamiltonianConfig cfg;
  cfg.preset = "tabulated";
  cfg.params = {{"m1", 2.0}, {"m2", 0.5}};
  cfg.files = {{"v1", "v1.txt"}, {"v2", "v2.txt"}, {"v12", "v12.csv"}};
  const HamiltonianSpec spec = hamiltonian_from(cfg, g1, g2, scratch.dir);
  CHECK(spec.m1 == 2.0);
  CHECK(spec.m2 == 0.5);
  CHECK(std::abs(spec.v1(3) - 0.5 * g1.points(3) * g1.points(3)) < 1e-15);
  CHECK(std::abs(spec.v2(1) - 0.25 * g2.points(1) * g2.points(1)) < 1e-15);
  CHECK(std::abs(spec.v12(5, 2) - 0.1 * g1.points(5) * g2.points(2)) < 1e-15);

  // The coupling file is optional; without it the spec is uncoupled.
  HamiltonianConfig uncoupled = cfg;
  uncoupled.files.erase("v12");
  CHECK(hamiltonian_from(uncoupled, g1, g2, scratch.dir).v12.size() == 0);

  HamiltonianConfig missing = cfg;
  missing.files.erase("v1");
  CHECK_THROWS_AS(hamiltonian_from(missing, g1, g2, scratch.dir), ConfigError);

  HamiltonianConfig bad_param = cfg;
  bad_param.params["omega1"] = 1.0;
  CHECK_THROWS_AS(hamiltonian_from(bad_param, g1, g2, scratch.dir), ConfigError);

  HamiltonianConfig bad_mass = cfg;
  bad_mass.params["m1"] = 0.0;
  CHECK_THROWS_AS(hamiltonian_from(bad_mass, g1, g2, scratch.dir), ConfigError);

  // Shape mismatches: v1 against the wrong grid, a ragged coupling table.
  CHECK_THROWS_AS(hamiltonian_from(cfg, g2, g1, scratch.dir), ConfigError);
  scratch.write("ragged.csv", "1.0,2.0\n3.0\n");
  HamiltonianConfig ragged = cfg;
  ragged.files["v12"] = "ragged.csv";
  CHECK_THROWS_AS(hamiltonian_from(ragged, g1, g2, scratch.dir), ConfigError);
  scratch.write("corrupt.txt", "1.0\nnot-a-number\n");
  HamiltonianConfig corrupt = cfg;
  corrupt.files["v1"] = "corrupt.txt";
  CHECK_THROWS_AS(hamiltonian_from(corrupt, g1, g2, scratch.dir), ConfigError);

  // Preset Hamiltonians must not carry potential files.
  HamiltonianConfig preset_with_files = cfg;
  preset_with_files.preset = "coupled_harmonic";
  CHECK_THROWS_AS(hamiltonian_from(preset_with_files, g1, g2, scratch.dir), ConfigError);
}

TEST_CASE("numeric formatting and hashing are byte-stable") {
  // std::from_chars rather than std::stod: the latter reports ERANGE for
  // subnormal values even though the text parses exactly.
  for (const double x : {0.1, 1.0 / 3.0, 2.0, 6.02214076e23, 1.1125369292536007e-308, -42.5}) {
    const std::string text = format_double(x);
    double parsed = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), parsed);
    REQUIRE(result.ec == std::errc{});
    CHECK(parsed == x);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");

  const ScratchDir scratch("csv");
  const fs::path path = scratch.dir / "table.csv";
  {
    CsvWriter csv(path, "run abc", {"time", "value", "label"});
    csv.row(0.5, 42, std::string("ok"));
    csv.row(1.5, -1, std::string("end"));
  }
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "# run abc\ntime,value,label\n0.5,42,ok\n1.5,-1,end\n");
}
