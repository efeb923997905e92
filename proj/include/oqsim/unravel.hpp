#pragma once

#include <cstdint>
#include <vector>

#include "oqsim/evolve.hpp"
#include "oqsim/rng.hpp"
#include "oqsim/states.hpp"

namespace oqsim {

// Probability distribution of environment readouts (= marginal on axis 2).
MarginalDensity environment_distribution(const CompositeState& phi);

// Inverse-CDF sampling on the lattice. Exact ties at a cumulative boundary
// resolve to the lower index; zero-weight points are never produced.
std::vector<Eigen::Index> sample_environment(const MarginalDensity& dist, StreamRng& rng,
                                             Eigen::Index count);

// Normalized conditional system state for the sampled environment point.
Eigen::VectorXcd random_pure_state(const CompositeState& phi, Eigen::Index env_index);

// Same composite state with the environment axis rotated to the momentum
// representation; conditioning then reads out environment momenta instead of
// positions. The reduced system state is unchanged by this rotation.
CompositeState momentum_environment_view(const CompositeState& phi);

struct McDensity {
  DensityOperator estimate;        // (1/N) sum of conditional projectors
  Eigen::MatrixXd stderr_kernel;   // per-entry standard error (complex spread)
  Eigen::Index samples = 0;
};

// Monte Carlo estimate of the reduced density. Sample i draws from stream
// stream_base + i, so estimates are independent of evaluation order and
// bit-for-bit reproducible for a given (seed, stream_base, N).
McDensity mc_density_estimate(const CompositeState& phi, const RngFactory& rng,
                              Eigen::Index count, std::uint64_t stream_base = 0);

struct McScalar {
  double estimate = 0.0;
  double std_error = 0.0;
};

McScalar mc_expectation(const CompositeState& phi, const Eigen::MatrixXcd& observable,
                        const RngFactory& rng, Eigen::Index count,
                        std::uint64_t stream_base = 0);

struct EnvironmentSample {
  double time = 0.0;
  Eigen::Index env_index = 0;
  double weight = 0.0;             // probability of the sampled point
  std::uint64_t rng_stream_id = 0;
};

// Trajectory ensemble over the requested snapshot times: per time, `count`
// independent environment readouts and their conditional states. Sampling at
// (time index ti, trajectory j) uses stream (ti+1) << 32 | j: a product
// measure across times, reproducible per sample.
struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<std::vector<EnvironmentSample>> samples;
  std::vector<std::vector<Eigen::VectorXcd>> states;
  std::uint64_t seed = 0;
  Eigen::Index count = 0;
};

TrajectoryEnsemble process_snapshot(const std::vector<Snapshot>& trajectory,
                                    const std::vector<double>& times, const RngFactory& rng,
                                    Eigen::Index count);

}  // namespace oqsim
