#include "oqsim/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "oqsim/states.hpp"

namespace oqsim {

namespace {

using njson = nlohmann::json;

void check_keys(const njson& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("config: " + path + ": unknown key '" + key + "'");
    }
  }
}

const njson& require(const njson& obj, const std::string& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("config: " + path + ": missing key '" + key + "'");
  return *it;
}

double as_number(const njson& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError("config: " + path + ": expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ConfigError("config: " + path + ": value must be finite");
  return x;
}

Eigen::Index as_index(const njson& value, const std::string& path) {
  if (!value.is_number_integer()) throw ConfigError("config: " + path + ": expected an integer");
  return value.get<Eigen::Index>();
}

bool as_bool(const njson& value, const std::string& path) {
  if (!value.is_boolean()) throw ConfigError("config: " + path + ": expected a boolean");
  return value.get<bool>();
}

std::string as_string(const njson& value, const std::string& path) {
  if (!value.is_string()) throw ConfigError("config: " + path + ": expected a string");
  return value.get<std::string>();
}

GridConfig parse_grid(const njson& obj, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("config: " + path + ": expected an object");
  check_keys(obj, path, {"n", "length", "center"});
  GridConfig g;
  g.n = as_index(require(obj, path, "n"), path + ".n");
  g.length = as_number(require(obj, path, "length"), path + ".length");
  if (obj.contains("center")) g.center = as_number(obj["center"], path + ".center");
  return g;
}

PacketConfig parse_packet(const njson& obj, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("config: " + path + ": expected an object");
  check_keys(obj, path, {"center", "sigma", "momentum"});
  PacketConfig p;
  if (obj.contains("center")) p.center = as_number(obj["center"], path + ".center");
  p.sigma = as_number(require(obj, path, "sigma"), path + ".sigma");
  if (obj.contains("momentum")) p.momentum = as_number(obj["momentum"], path + ".momentum");
  return p;
}

std::vector<double> parse_times(const njson& value, const std::string& path) {
  if (!value.is_array() || value.empty()) {
    throw ConfigError("config: " + path + ": expected a non-empty array of times");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(as_number(value[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SplitScheme parse_scheme(const njson& value, const std::string& path) {
  const std::string s = as_string(value, path);
  if (s == "lie") return SplitScheme::kLie;
  if (s == "strang") return SplitScheme::kStrang;
  throw ConfigError("config: " + path + ": expected 'lie' or 'strang'");
}

Eigen::VectorXd load_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open potential file " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw ConfigError("potential file " + path.string() + ": bad line '" + line + "'");
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
  if (!out.allFinite()) throw ConfigError("potential file " + path.string() + ": non-finite value");
  return out;
}

}  // namespace

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  njson root;
  try {
    in >> root;
  } catch (const njson::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "(top level)",
             {"seed", "sign", "grids", "hamiltonian", "initial", "evolution", "unravel",
              "wigner", "gaussian", "convergence", "output"});

  Config cfg;
  cfg.base_dir = path.parent_path();
  cfg.canonical = root.dump();

  if (root.contains("seed")) {
    const njson& seed = root["seed"];
    const bool ok = seed.is_number_unsigned() ||
                    (seed.is_number_integer() && seed.get<long long>() >= 0);
    if (!ok) throw ConfigError("config: seed: expected a nonnegative integer");
    cfg.seed = seed.get<std::uint64_t>();
  }
  if (root.contains("sign")) {
    const std::string sign = as_string(root["sign"], "sign");
    if (sign == "-") {
      cfg.time_sign = -1;
    } else if (sign == "+") {
      cfg.time_sign = +1;
    } else {
      throw ConfigError("config: sign: expected '-' or '+'");
    }
  }

  const njson& grids = require(root, "(top level)", "grids");
  if (!grids.is_object()) throw ConfigError("config: grids: expected an object");
  check_keys(grids, "grids", {"system", "environment"});
  cfg.grid1 = parse_grid(require(grids, "grids", "system"), "grids.system");
  cfg.grid2 = parse_grid(require(grids, "grids", "environment"), "grids.environment");

  const njson& ham = require(root, "(top level)", "hamiltonian");
  if (!ham.is_object()) throw ConfigError("config: hamiltonian: expected an object");
  check_keys(ham, "hamiltonian", {"preset", "params", "files"});
  cfg.hamiltonian.preset = as_string(require(ham, "hamiltonian", "preset"), "hamiltonian.preset");
  if (ham.contains("params")) {
    const njson& params = ham["params"];
    if (!params.is_object()) throw ConfigError("config: hamiltonian.params: expected an object");
    for (const auto& [key, value] : params.items()) {
      cfg.hamiltonian.params[key] = as_number(value, "hamiltonian.params." + key);
    }
  }
  if (ham.contains("files")) {
    const njson& files = ham["files"];
    if (!files.is_object()) throw ConfigError("config: hamiltonian.files: expected an object");
    check_keys(files, "hamiltonian.files", {"v1", "v2", "v12"});
    for (const auto& [key, value] : files.items()) {
      cfg.hamiltonian.files[key] = as_string(value, "hamiltonian.files." + key);
    }
  }

  const njson& initial = require(root, "(top level)", "initial");
  if (!initial.is_object()) throw ConfigError("config: initial: expected an object");
  check_keys(initial, "initial", {"system", "environment"});
  cfg.initial1 = parse_packet(require(initial, "initial", "system"), "initial.system");
  cfg.initial2 = parse_packet(require(initial, "initial", "environment"), "initial.environment");

  if (root.contains("evolution")) {
    const njson& evo = root["evolution"];
    if (!evo.is_object()) throw ConfigError("config: evolution: expected an object");
    check_keys(evo, "evolution", {"time", "steps", "scheme", "snapshot_stride", "store_states"});
    EvolutionConfig e;
    e.time = as_number(require(evo, "evolution", "time"), "evolution.time");
    e.steps = as_index(require(evo, "evolution", "steps"), "evolution.steps");
    if (e.steps < 1) throw ConfigError("config: evolution.steps: must be >= 1");
    if (evo.contains("scheme")) e.scheme = parse_scheme(evo["scheme"], "evolution.scheme");
    if (evo.contains("snapshot_stride")) {
      e.snapshot_stride = as_index(evo["snapshot_stride"], "evolution.snapshot_stride");
      if (e.snapshot_stride < 0) {
        throw ConfigError("config: evolution.snapshot_stride: must be >= 0");
      }
    }
    if (evo.contains("store_states")) {
      e.store_states = as_bool(evo["store_states"], "evolution.store_states");
    }
    cfg.evolution = e;
  }

  if (root.contains("unravel")) {
    const njson& unr = root["unravel"];
    if (!unr.is_object()) throw ConfigError("config: unravel: expected an object");
    check_keys(unr, "unravel", {"times", "samples", "basis", "exhaustive"});
    UnravelConfig u;
    u.times = parse_times(require(unr, "unravel", "times"), "unravel.times");
    if (unr.contains("samples")) {
      u.samples = as_index(unr["samples"], "unravel.samples");
      if (u.samples < 1) throw ConfigError("config: unravel.samples: must be >= 1");
    }
    if (unr.contains("basis")) {
      u.basis = as_string(unr["basis"], "unravel.basis");
      if (u.basis != "position" && u.basis != "momentum") {
        throw ConfigError("config: unravel.basis: expected 'position' or 'momentum'");
      }
    }
    if (unr.contains("exhaustive")) {
      u.exhaustive = as_bool(unr["exhaustive"], "unravel.exhaustive");
    }
    cfg.unravel = u;
  }

  if (root.contains("wigner")) {
    const njson& wig = root["wigner"];
    if (!wig.is_object()) throw ConfigError("config: wigner: expected an object");
    check_keys(wig, "wigner", {"slices"});
    if (wig.contains("slices")) {
      const njson& slices = wig["slices"];
      if (!slices.is_array()) throw ConfigError("config: wigner.slices: expected an array");
      for (std::size_t i = 0; i < slices.size(); ++i) {
        const std::string spath = "wigner.slices[" + std::to_string(i) + "]";
        const njson& pair = slices[i];
        if (!pair.is_array() || pair.size() != 2) {
          throw ConfigError("config: " + spath + ": expected [q2_index, p2_index]");
        }
        cfg.wigner.slices.emplace_back(as_index(pair[0], spath + "[0]"),
                                       as_index(pair[1], spath + "[1]"));
      }
    }
  }

  if (root.contains("gaussian")) {
    const njson& gau = root["gaussian"];
    if (!gau.is_object()) throw ConfigError("config: gaussian: expected an object");
    check_keys(gau, "gaussian", {"times", "samples"});
    GaussianConfig g;
    g.times = parse_times(require(gau, "gaussian", "times"), "gaussian.times");
    if (gau.contains("samples")) {
      g.samples = as_index(gau["samples"], "gaussian.samples");
      if (g.samples < 1) throw ConfigError("config: gaussian.samples: must be >= 1");
    }
    cfg.gaussian = g;
  }

  if (root.contains("convergence")) {
    const njson& con = root["convergence"];
    if (!con.is_object()) throw ConfigError("config: convergence: expected an object");
    check_keys(con, "convergence", {"time", "steps_list"});
    ConvergenceConfig c;
    c.time = as_number(require(con, "convergence", "time"), "convergence.time");
    const njson& list = require(con, "convergence", "steps_list");
    if (!list.is_array() || list.empty()) {
      throw ConfigError("config: convergence.steps_list: expected a non-empty array");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Eigen::Index steps =
          as_index(list[i], "convergence.steps_list[" + std::to_string(i) + "]");
      if (steps < 1) throw ConfigError("config: convergence.steps_list: entries must be >= 1");
      c.steps_list.push_back(steps);
    }
    cfg.convergence = c;
  }

  if (root.contains("output")) {
    const njson& out = root["output"];
    if (!out.is_object()) throw ConfigError("config: output: expected an object");
    check_keys(out, "output", {"directory"});
    if (out.contains("directory")) {
      cfg.output_dir = as_string(out["directory"], "output.directory");
    }
  }

  return cfg;
}

Grid grid_from(const GridConfig& cfg) { return make_grid(cfg.n, cfg.length, cfg.center); }

HamiltonianSpec hamiltonian_from(const HamiltonianConfig& cfg, const Grid& grid1,
                                 const Grid& grid2, const std::filesystem::path& base_dir) {
  if (cfg.preset != "tabulated") {
    if (!cfg.files.empty()) {
      throw ConfigError("config: hamiltonian.files: only valid with preset 'tabulated'");
    }
    return make_preset(cfg.preset, grid1, grid2, cfg.params);
  }

  HamiltonianSpec spec;
  spec.preset = "tabulated";
  for (const auto& [key, value] : cfg.params) {
    if (key == "m1") {
      spec.m1 = value;
    } else if (key == "m2") {
      spec.m2 = value;
    } else {
      throw ConfigError("config: hamiltonian.params: unknown key '" + key +
                        "' for tabulated potentials (only m1, m2)");
    }
  }
  if (!(spec.m1 > 0.0) || !(spec.m2 > 0.0)) {
    throw ConfigError("config: hamiltonian.params: masses must be positive");
  }
  const auto file = [&](const std::string& key) -> std::filesystem::path {
    const auto it = cfg.files.find(key);
    if (it == cfg.files.end()) {
      throw ConfigError("config: hamiltonian.files: missing '" + key + "'");
    }
    std::filesystem::path p(it->second);
    return p.is_absolute() ? p : base_dir / p;
  };
  spec.v1 = load_column(file("v1"));
  spec.v2 = load_column(file("v2"));
  if (spec.v1.size() != grid1.n || spec.v2.size() != grid2.n) {
    throw ConfigError("tabulated potentials do not match the grid sizes");
  }
  if (cfg.files.count("v12")) {
    std::ifstream in(file("v12"));
    if (!in) throw ConfigError("cannot open coupling file");
    std::vector<double> flat;
    Eigen::Index cols = -1;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string cell;
      Eigen::Index count = 0;
      while (std::getline(ss, cell, ',')) {
        try {
          flat.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw ConfigError("coupling file: bad cell '" + cell + "'");
        }
        ++count;
      }
      if (cols < 0) cols = count;
      if (cols != count) throw ConfigError("coupling file: ragged rows");
    }
    const Eigen::Index rows = (cols > 0) ? static_cast<Eigen::Index>(flat.size()) / cols : 0;
    if (rows != grid1.n || cols != grid2.n) {
      throw ConfigError("coupling file shape does not match the grids");
    }
    spec.v12.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        spec.v12(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
      }
    }
    if (!spec.v12.allFinite()) throw ConfigError("coupling file: non-finite value");
  }
  return spec;
}

Eigen::VectorXcd packet_from(const PacketConfig& cfg, const Grid& grid) {
  return gaussian_packet(grid, cfg.center, cfg.sigma, cfg.momentum);
}

}  // namespace oqsim
