#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oqsim/evolve.hpp"
#include "oqsim/hamiltonian.hpp"

namespace oqsim {

// Parsed run configuration. One JSON file configures every command; unknown
// keys anywhere are fatal with a field-path message. Sections a command does
// not use may be omitted.
struct GridConfig {
  Eigen::Index n = 0;
  double length = 0.0;
  double center = 0.0;
};

struct PacketConfig {
  double center = 0.0;
  double sigma = 1.0;
  double momentum = 0.0;
};

struct HamiltonianConfig {
  std::string preset;                         // named preset or "tabulated"
  std::map<std::string, double> params;
  std::map<std::string, std::string> files;   // tabulated: v1, v2, optional v12
};

struct EvolutionConfig {
  double time = 1.0;
  Eigen::Index steps = 128;
  SplitScheme scheme = SplitScheme::kLie;
  Eigen::Index snapshot_stride = 0;
  bool store_states = false;
};

struct UnravelConfig {
  std::vector<double> times;
  Eigen::Index samples = 1000;
  std::string basis = "position";  // or "momentum"
  bool exhaustive = false;
};

struct WignerConfig {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> slices;  // (q2, p2) indices
};

struct GaussianConfig {
  std::vector<double> times;
  Eigen::Index samples = 10000;
};

struct ConvergenceConfig {
  double time = 1.0;
  std::vector<Eigen::Index> steps_list;
};

struct Config {
  std::uint64_t seed = 0;
  int time_sign = -1;  // -1: e^{-itH} (default); +1: e^{+itH}
  GridConfig grid1;
  GridConfig grid2;
  HamiltonianConfig hamiltonian;
  PacketConfig initial1;
  PacketConfig initial2;
  std::optional<EvolutionConfig> evolution;
  std::optional<UnravelConfig> unravel;
  WignerConfig wigner;
  std::optional<GaussianConfig> gaussian;
  std::optional<ConvergenceConfig> convergence;
  std::string output_dir = "out";

  std::filesystem::path base_dir;  // directory of the config file
  std::string canonical;           // sorted compact serialization, hashed into the manifest
};

Config load_config(const std::filesystem::path& path);

// Materialization helpers.
Grid grid_from(const GridConfig& cfg);
HamiltonianSpec hamiltonian_from(const HamiltonianConfig& cfg, const Grid& grid1,
                                 const Grid& grid2, const std::filesystem::path& base_dir);
Eigen::VectorXcd packet_from(const PacketConfig& cfg, const Grid& grid);

}  // namespace oqsim
