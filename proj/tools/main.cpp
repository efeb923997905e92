// Command-line front end: every subcommand loads a JSON scenario config,
// applies the flag overrides and delegates to the library command layer.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oqsim/commands.hpp"
#include "oqsim/errors.hpp"
#include "oqsim/version.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string sign = "-";
  std::string out_dir;
  bool exhaustive = false;
};

void add_common_options(CLI::App* sub, Flags& flags) {
  sub->add_option("-c,--config", flags.config_path, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", flags.seed, "override the RNG seed");
  sub->add_option("--sign", flags.sign, "evolution sign: '-' for e^{-itH}, '+' for e^{+itH}")
      ->check(CLI::IsMember({"-", "+"}));
  sub->add_option("--out", flags.out_dir, "override the output directory");
}

oqsim::Config load_scenario(const CLI::App* sub, const Flags& flags) {
  oqsim::CommandOptions options;
  if (sub->count("--seed") > 0) options.seed = flags.seed;
  if (sub->count("--sign") > 0) options.time_sign = (flags.sign == "+") ? 1 : -1;
  if (sub->count("--out") > 0) options.out_dir = flags.out_dir;
  // Only the unravel subcommand registers --exhaustive; App::count throws
  // when asked about an option the subcommand does not have.
  const CLI::Option* exhaustive = sub->get_option_no_throw("--exhaustive");
  if (exhaustive != nullptr && exhaustive->count() > 0) options.exhaustive = flags.exhaustive;
  return oqsim::apply_overrides(oqsim::load_config(flags.config_path), options);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-grid simulator for coupled system-environment quantum dynamics"};
  app.set_version_flag("--version", std::string(oqsim::kVersion));
  app.require_subcommand(1);

  Flags flags;

  CLI::App* run = app.add_subcommand(
      "run", "split-step evolution: time series, marginals and the reduced density");
  add_common_options(run, flags);

  CLI::App* unravel = app.add_subcommand(
      "unravel", "stochastic pure-state reconstruction of the reduced density");
  add_common_options(unravel, flags);
  unravel->add_flag("--exhaustive", flags.exhaustive,
                    "enumerate every environment outcome instead of sampling");

  CLI::App* wigner = app.add_subcommand(
      "wigner", "phase-space tables: direct, joint-marginalized, and consistency checks");
  add_common_options(wigner, flags);

  CLI::App* gaussian = app.add_subcommand(
      "gaussian", "Gaussian state-measure sampling of the reduced density along the evolution");
  add_common_options(gaussian, flags);

  CLI::App* converge = app.add_subcommand(
      "converge", "split-step error against the dense-diagonalization reference");
  add_common_options(converge, flags);

  CLI::App* verify = app.add_subcommand(
      "verify", "run the acceptance criteria on the built-in reference scenario");
  std::string report_dir;
  verify->add_option("--out", report_dir, "directory for report.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return oqsim::cmd_verify(report_dir, std::cout);
    }
    if (run->parsed()) {
      oqsim::cmd_run(load_scenario(run, flags), std::cout);
    } else if (unravel->parsed()) {
      oqsim::cmd_unravel(load_scenario(unravel, flags), std::cout);
    } else if (wigner->parsed()) {
      oqsim::cmd_wigner(load_scenario(wigner, flags), std::cout);
    } else if (gaussian->parsed()) {
      oqsim::cmd_gaussian(load_scenario(gaussian, flags), std::cout);
    } else if (converge->parsed()) {
      oqsim::cmd_converge(load_scenario(converge, flags), std::cout);
    }
  } catch (const oqsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
