#include "oqsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "oqsim/hilbert_measure.hpp"
#include "oqsim/io.hpp"
#include "oqsim/oracle.hpp"
#include "oqsim/unravel.hpp"
#include "oqsim/verify.hpp"
#include "oqsim/version.hpp"
#include "oqsim/wigner.hpp"

namespace oqsim {

namespace {

using njson = nlohmann::json;

struct Scenario {
  Grid grid1;
  Grid grid2;
  HamiltonianSpec spec;
  CompositeState initial;
};

Scenario build_scenario(const Config& cfg) {
  Scenario s;
  s.grid1 = grid_from(cfg.grid1);
  s.grid2 = grid_from(cfg.grid2);
  s.spec = hamiltonian_from(cfg.hamiltonian, s.grid1, s.grid2, cfg.base_dir);
  s.initial = product_state(s.grid1, packet_from(cfg.initial1, s.grid1), s.grid2,
                            packet_from(cfg.initial2, s.grid2));
  return s;
}

// Internal evolution time: the default propagator is e^{-itH}; sign '+'
// requests e^{+itH} = e^{-i(-t)H}.
double internal_time(const Config& cfg, double user_time) {
  return (cfg.time_sign < 0) ? user_time : -user_time;
}

std::filesystem::path ensure_outdir(const Config& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string grid_meta(const Grid& g, const char* name) {
  return std::string(name) + ": n=" + std::to_string(g.n) +
         " length=" + format_double(g.length) + " center=" + format_double(g.center);
}

std::string scenario_meta(const Scenario& s) {
  return grid_meta(s.grid1, "grid1") + "; " + grid_meta(s.grid2, "grid2");
}

void write_manifest(const Config& cfg, const std::filesystem::path& dir,
                    const std::string& command, const std::vector<std::string>& outputs,
                    const njson& extra = njson::object()) {
  njson manifest;
  manifest["command"] = command;
  manifest["config_hash"] = hex64(fnv1a64(cfg.canonical));
  manifest["seed"] = cfg.seed;
  manifest["sign"] = (cfg.time_sign < 0) ? "-" : "+";
  manifest["version"] = std::string(kVersion);
  manifest["outputs"] = outputs;
  for (const auto& [key, value] : extra.items()) manifest[key] = value;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw ConfigError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

// Sequential segment evolution landing exactly on the requested user times
// (sorted, deduplicated, nonnegative). Step size stays near the configured
// dt; each snapshot records the *user* time.
std::vector<Snapshot> evolve_to_times(const Config& cfg, const Scenario& s,
                                      std::vector<double> times, double dt_hint,
                                      SplitScheme scheme) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (!times.empty() && times.front() < 0.0) {
    throw ConfigError("snapshot times must be nonnegative");
  }
  std::vector<Snapshot> snapshots;
  CompositeState state = s.initial;
  double previous = 0.0;
  Eigen::Index step_counter = 0;
  for (const double t : times) {
    const double delta = t - previous;
    if (delta > 0.0) {
      const Eigen::Index steps =
          std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(delta / dt_hint)));
      EvolveOptions options;
      options.scheme = scheme;
      state = evolve(state, s.spec, internal_time(cfg, delta), steps, options).state;
      step_counter += steps;
    }
    snapshots.push_back(Snapshot{step_counter, t, state});
    previous = t;
  }
  return snapshots;
}

void write_marginal_csv(const std::filesystem::path& path, const std::string& meta,
                        const MarginalDensity& marginal) {
  CsvWriter csv(path, meta, {"q", "density"});
  for (Eigen::Index k = 0; k < marginal.grid.n; ++k) {
    csv.row(marginal.grid.points(k), marginal.weights(k));
  }
}

void write_kernel_csv(const std::filesystem::path& path, const std::string& meta,
                      const DensityOperator& rho) {
  CsvWriter csv(path, meta, {"i", "j", "q_i", "q_j", "re", "im"});
  for (Eigen::Index i = 0; i < rho.grid.n; ++i) {
    for (Eigen::Index j = 0; j < rho.grid.n; ++j) {
      csv.row(i, j, rho.grid.points(i), rho.grid.points(j), rho.kernel(i, j).real(),
              rho.kernel(i, j).imag());
    }
  }
}

void write_wigner_csv(const std::filesystem::path& path, const std::string& meta,
                      const WignerTable& table) {
  CsvWriter csv(path, meta, {"q", "p", "w"});
  for (Eigen::Index k = 0; k < table.values.rows(); ++k) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      csv.row(table.qgrid.points(k), table.momenta(j), table.values(k, j));
    }
  }
}

}  // namespace

Config apply_overrides(Config cfg, const CommandOptions& options) {
  if (options.seed) cfg.seed = *options.seed;
  if (options.time_sign) cfg.time_sign = *options.time_sign;
  if (options.out_dir) cfg.output_dir = *options.out_dir;
  if (options.exhaustive && cfg.unravel) cfg.unravel->exhaustive = *options.exhaustive;
  return cfg;
}

void cmd_run(const Config& cfg, std::ostream& log) {
  if (!cfg.evolution) throw ConfigError("command 'run' requires the 'evolution' section");
  const Scenario s = build_scenario(cfg);
  const EvolutionConfig& evo = *cfg.evolution;
  const std::filesystem::path dir = ensure_outdir(cfg);
  const double sign_back = (cfg.time_sign < 0) ? 1.0 : -1.0;

  const Eigen::Index stride =
      (evo.snapshot_stride > 0) ? evo.snapshot_stride : std::max<Eigen::Index>(1, evo.steps / 16);

  CsvWriter timeseries(dir / "timeseries.csv", scenario_meta(s),
                       {"time", "purity", "mean_q1", "var_q1", "mean_q2", "var_q2"});
  std::vector<std::string> outputs = {"timeseries.csv"};

  const auto moments = [](const MarginalDensity& m) {
    const double mean = (m.grid.points.array() * m.weights.array()).sum() * m.grid.step;
    const double var =
        ((m.grid.points.array() - mean).square() * m.weights.array()).sum() * m.grid.step;
    return std::pair<double, double>(mean, var);
  };

  EvolveOptions options;
  options.scheme = evo.scheme;
  options.snapshot_stride = stride;
  Eigen::Index state_files = 0;
  options.observer = [&](Eigen::Index step, double time, const CompositeState& state) {
    const MarginalDensity m1 = marginal_density_1(state);
    const MarginalDensity m2 = marginal_density_2(state);
    const auto [mean1, var1] = moments(m1);
    const auto [mean2, var2] = moments(m2);
    timeseries.row(time * sign_back, purity(reduced_density(state)), mean1, var1, mean2, var2);
    if (evo.store_states) {
      const std::string name = "state_" + std::to_string(step) + ".csv";
      CsvWriter state_csv(dir / name, scenario_meta(s), {"k", "l", "q1", "q2", "re", "im"});
      for (Eigen::Index l = 0; l < state.grid2.n; ++l) {
        for (Eigen::Index k = 0; k < state.grid1.n; ++k) {
          state_csv.row(k, l, state.grid1.points(k), state.grid2.points(l),
                        state.amplitudes(k, l).real(), state.amplitudes(k, l).imag());
        }
      }
      outputs.push_back(name);
      ++state_files;
    }
  };

  const EvolveResult result =
      evolve(s.initial, s.spec, internal_time(cfg, evo.time), evo.steps, options);

  const DensityOperator reduced = reduced_density(result.state);
  write_kernel_csv(dir / "reduced_density.csv", grid_meta(s.grid1, "grid1"), reduced);
  write_marginal_csv(dir / "marginal_system.csv", grid_meta(s.grid1, "grid1"),
                     marginal_density_1(result.state));
  write_marginal_csv(dir / "marginal_environment.csv", grid_meta(s.grid2, "grid2"),
                     marginal_density_2(result.state));
  outputs.insert(outputs.end(),
                 {"reduced_density.csv", "marginal_system.csv", "marginal_environment.csv"});

  njson extra;
  extra["max_step_norm_drift"] = result.max_step_drift;
  write_manifest(cfg, dir, "run", outputs, extra);
  log << "run: " << evo.steps << " steps to t=" << format_double(evo.time)
      << ", final purity " << format_double(purity(reduced)) << ", max norm drift "
      << format_double(result.max_step_drift) << ", " << state_files
      << " state files, outputs in " << dir.string() << "\n";
}

void cmd_unravel(const Config& cfg, std::ostream& log) {
  if (!cfg.evolution) throw ConfigError("command 'unravel' requires the 'evolution' section");
  if (!cfg.unravel) throw ConfigError("command 'unravel' requires the 'unravel' section");
  const Scenario s = build_scenario(cfg);
  const UnravelConfig& unr = *cfg.unravel;
  const std::filesystem::path dir = ensure_outdir(cfg);
  const double dt_hint =
      std::abs(cfg.evolution->time) / static_cast<double>(cfg.evolution->steps);

  const std::vector<Snapshot> snapshots =
      evolve_to_times(cfg, s, unr.times, dt_hint, cfg.evolution->scheme);
  const RngFactory rng{cfg.seed};

  CsvWriter ensemble(dir / "ensemble.csv", scenario_meta(s),
                     {"time", "samples", "purity_mc", "purity_exact", "frobenius_error",
                      "stderr"});
  for (std::size_t ti = 0; ti < snapshots.size(); ++ti) {
    const CompositeState state = (unr.basis == "momentum")
                                     ? momentum_environment_view(snapshots[ti].state)
                                     : snapshots[ti].state;
    const DensityOperator exact = reduced_density(state);
    if (unr.exhaustive) {
      const DensityOperator estimate = enumerate_unraveling(state);
      ensemble.row(snapshots[ti].time, state.grid2.n, purity(estimate), purity(exact),
                   hs_distance(estimate.kernel, exact.kernel, state.grid1.step), 0.0);
    } else {
      const McDensity mc = mc_density_estimate(state, rng, unr.samples,
                                               static_cast<std::uint64_t>(ti + 1) << 32);
      ensemble.row(snapshots[ti].time, mc.samples, purity(mc.estimate), purity(exact),
                   hs_distance(mc.estimate.kernel, exact.kernel, state.grid1.step),
                   mc.stderr_kernel.norm() * state.grid1.step);
    }
  }
  write_manifest(cfg, dir, "unravel", {"ensemble.csv"});
  log << "unravel: " << snapshots.size() << " time(s), "
      << (unr.exhaustive ? "exhaustive enumeration" : std::to_string(unr.samples) + " samples")
      << ", basis " << unr.basis << ", outputs in " << dir.string() << "\n";
}

void cmd_wigner(const Config& cfg, std::ostream& log) {
  const Scenario s = build_scenario(cfg);
  const std::filesystem::path dir = ensure_outdir(cfg);

  CompositeState state = s.initial;
  double time = 0.0;
  if (cfg.evolution && cfg.evolution->time != 0.0) {
    time = cfg.evolution->time;
    EvolveOptions options;
    options.scheme = cfg.evolution->scheme;
    state = evolve(s.initial, s.spec, internal_time(cfg, time), cfg.evolution->steps, options)
                .state;
  }

  const WignerTable4 joint = joint_wigner(state);
  const WignerTable via_joint = marginalize_wigner(joint);
  const DensityOperator reduced = reduced_density(state);
  const WignerTable direct = wigner_from_density(reduced);
  const double two_path = (via_joint.values - direct.values).cwiseAbs().maxCoeff();

  const WignerMarginals marginals = wigner_marginals(direct);
  const double position_diff =
      (marginals.position - marginal_density_1(state).weights).cwiseAbs().maxCoeff();
  const double momentum_diff =
      (marginals.momentum - momentum_density(reduced)).cwiseAbs().maxCoeff();

  write_wigner_csv(dir / "wigner_direct.csv", grid_meta(s.grid1, "grid1"), direct);
  write_wigner_csv(dir / "wigner_marginalized.csv", grid_meta(s.grid1, "grid1"), via_joint);
  std::vector<std::string> outputs = {"wigner_direct.csv", "wigner_marginalized.csv",
                                      "wigner_checks.csv"};

  {
    CsvWriter checks(dir / "wigner_checks.csv", scenario_meta(s), {"check", "value"});
    checks.row("two_path_max_diff", two_path);
    checks.row("mass_direct", direct.mass());
    checks.row("mass_marginalized", via_joint.mass());
    checks.row("mass_joint", joint.mass());
    checks.row("position_marginal_max_diff", position_diff);
    checks.row("momentum_marginal_max_diff", momentum_diff);
  }

  for (const auto& [k2, j2] : cfg.wigner.slices) {
    if (k2 < 0 || k2 >= s.grid2.n || j2 < 0 || j2 >= s.grid2.n) {
      throw ConfigError("wigner slice index out of range");
    }
    const std::string name =
        "wigner_slice_" + std::to_string(k2) + "_" + std::to_string(j2) + ".csv";
    const std::string meta = grid_meta(s.grid1, "grid1") +
                             "; slice q2=" + format_double(joint.grid2.points(k2)) +
                             " p2=" + format_double(joint.momenta2(j2));
    CsvWriter slice(dir / name, meta, {"q1", "p1", "w"});
    for (Eigen::Index k1 = 0; k1 < s.grid1.n; ++k1) {
      for (Eigen::Index j1 = 0; j1 < s.grid1.n; ++j1) {
        slice.row(joint.grid1.points(k1), joint.momenta1(j1), joint.at(k1, j1, k2, j2));
      }
    }
    outputs.push_back(name);
  }

  write_manifest(cfg, dir, "wigner", outputs);
  log << "wigner: t=" << format_double(time) << ", two-path max diff "
      << format_double(two_path) << ", marginal diffs " << format_double(position_diff) << " / "
      << format_double(momentum_diff) << ", outputs in " << dir.string() << "\n";
}

void cmd_gaussian(const Config& cfg, std::ostream& log) {
  if (!cfg.evolution) throw ConfigError("command 'gaussian' requires the 'evolution' section");
  if (!cfg.gaussian) throw ConfigError("command 'gaussian' requires the 'gaussian' section");
  const Scenario s = build_scenario(cfg);
  const std::filesystem::path dir = ensure_outdir(cfg);
  const double dt_hint =
      std::abs(cfg.evolution->time) / static_cast<double>(cfg.evolution->steps);

  const std::vector<Snapshot> snapshots =
      evolve_to_times(cfg, s, cfg.gaussian->times, dt_hint, cfg.evolution->scheme);
  std::vector<std::pair<double, DensityOperator>> trajectory;
  trajectory.reserve(snapshots.size());
  for (const Snapshot& snap : snapshots) {
    trajectory.emplace_back(snap.time, reduced_density(snap.state));
  }
  const auto residuals = track_evolution(trajectory, RngFactory{cfg.seed}, cfg.gaussian->samples);

  CsvWriter csv(dir / "residuals.csv", scenario_meta(s),
                {"time", "samples", "frobenius_residual", "purity_exact"});
  for (const CovarianceResidual& r : residuals) {
    csv.row(r.time, r.samples, r.frobenius_residual, r.purity_exact);
  }
  write_manifest(cfg, dir, "gaussian", {"residuals.csv"});
  log << "gaussian: " << residuals.size() << " time(s), " << cfg.gaussian->samples
      << " samples each, outputs in " << dir.string() << "\n";
}

void cmd_converge(const Config& cfg, std::ostream& log) {
  if (!cfg.convergence) throw ConfigError("command 'converge' requires the 'convergence' section");
  const Scenario s = build_scenario(cfg);
  const std::filesystem::path dir = ensure_outdir(cfg);
  const SplitScheme scheme = cfg.evolution ? cfg.evolution->scheme : SplitScheme::kLie;

  const ConvergenceTable table =
      convergence_study(s.initial, s.spec, internal_time(cfg, cfg.convergence->time),
                        cfg.convergence->steps_list, scheme);

  CsvWriter csv(dir / "convergence.csv", scenario_meta(s),
                {"n", "dt", "l2_error", "observed_order"});
  for (const ConvergenceRow& row : table.rows) {
    csv.row(row.steps, row.dt, row.l2_error, row.observed_order);
  }
  njson extra;
  extra["fitted_order"] = table.fitted_order;
  write_manifest(cfg, dir, "converge", {"convergence.csv"}, extra);
  log << "converge: fitted order " << format_double(table.fitted_order) << " over "
      << table.rows.size() << " step counts, outputs in " << dir.string() << "\n";
}

int cmd_verify(const std::filesystem::path& out_dir, std::ostream& log) {
  const std::vector<CriterionResult> results = run_acceptance(log);
  int failures = 0;
  for (const CriterionResult& r : results) {
    if (!r.passed) ++failures;
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    CsvWriter csv(out_dir / "report.csv", "", {"criterion", "passed", "detail", "seconds"});
    for (const CriterionResult& r : results) {
      std::string detail = r.detail;
      std::replace(detail.begin(), detail.end(), ',', ';');
      csv.row(r.id, static_cast<int>(r.passed), detail, r.seconds);
    }
    log << "verify: report written to " << (out_dir / "report.csv").string() << "\n";
  }
  return failures;
}

}  // namespace oqsim
