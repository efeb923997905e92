#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "oqsim/errors.hpp"
#include "oqsim/evolve.hpp"
#include "oqsim/oracle.hpp"
#include "oqsim/unravel.hpp"

using namespace oqsim;

namespace {

struct Setup {
  Grid g1 = make_grid(32, 14.0);
  Grid g2 = make_grid(16, 12.0);
  HamiltonianSpec spec = make_preset("coupled_harmonic", g1, g2,
                                     {{"m1", 1.0},
                                      {"m2", 1.0},
                                      {"omega1", 1.0},
                                      {"omega2", 1.2},
                                      {"lambda", 0.15}});

  // A mildly entangled state: a product state pushed through a few steps.
  CompositeState entangled() const {
    const CompositeState phi0 =
        product_state(g1, gaussian_packet(g1, 0.7, 1.0 / std::sqrt(2.0)), g2,
                      harmonic_ground_state(g2, 1.0, 1.2));
    return evolve(phi0, spec, 0.6, 24).state;
  }
};

}  // namespace

TEST_CASE("environment distribution is the axis-2 marginal") {
  const Setup s;
  const CompositeState phi = s.entangled();
  const MarginalDensity dist = environment_distribution(phi);
  REQUIRE(dist.weights.size() == s.g2.n);
  CHECK(std::abs(dist.weights.sum() * s.g2.step - 1.0) < 1e-12);
  for (Eigen::Index l = 0; l < s.g2.n; ++l) {
    const double column = phi.amplitudes.col(l).squaredNorm() * s.g1.step;
    CHECK(std::abs(dist.weights(l) - column) < 1e-13);
  }
}

TEST_CASE("sampling never emits zero-weight points") {
  const Setup s;
  // Support the environment on the upper half of the grid only.
  Eigen::VectorXcd psi2 = Eigen::VectorXcd::Zero(s.g2.n);
  for (Eigen::Index l = s.g2.n / 2; l < s.g2.n; ++l) psi2(l) = 1.0;
  psi2 /= psi2.norm() * std::sqrt(s.g2.step);
  const CompositeState phi =
      product_state(s.g1, gaussian_packet(s.g1, 0.0, 1.0), s.g2, psi2);

  const MarginalDensity dist = environment_distribution(phi);
  StreamRng rng(2024, 3);
  const std::vector<Eigen::Index> draws = sample_environment(dist, rng, 2000);
  REQUIRE(draws.size() == 2000);
  for (const Eigen::Index idx : draws) {
    CHECK(idx >= s.g2.n / 2);
    CHECK(idx < s.g2.n);
  }

  StreamRng rng2(2024, 4);
  CHECK_THROWS_AS(sample_environment(dist, rng2, -1), DomainError);

  MarginalDensity bad = dist;
  bad.weights *= 2.0;
  StreamRng rng3(2024, 5);
  CHECK_THROWS_AS(sample_environment(bad, rng3, 1), DomainError);
}

TEST_CASE("monte carlo density is reproducible and converges to the marginal") {
  const Setup s;
  const CompositeState phi = s.entangled();
  const DensityOperator exact = reduced_density(phi);

  const RngFactory rng{777};
  const McDensity a = mc_density_estimate(phi, rng, 400);
  const McDensity b = mc_density_estimate(phi, rng, 400);
  CHECK(a.samples == 400);
  CHECK((a.estimate.kernel - b.estimate.kernel).cwiseAbs().maxCoeff() == 0.0);

  // Streams are indexed per sample: the two-sample estimate is exactly the
  // average of the single-sample estimates at stream bases 0 and 1.
  const McDensity one0 = mc_density_estimate(phi, rng, 1);
  const McDensity one1 = mc_density_estimate(phi, rng, 1, 1);
  const McDensity two = mc_density_estimate(phi, rng, 2);
  CHECK((two.estimate.kernel - 0.5 * (one0.estimate.kernel + one1.estimate.kernel))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK(one0.stderr_kernel.cwiseAbs().maxCoeff() == 0.0);

  const double err_small = hs_distance(mc_density_estimate(phi, rng, 50).estimate.kernel,
                                       exact.kernel, s.g1.step);
  const double err_large =
      hs_distance(mc_density_estimate(phi, rng, 5000).estimate.kernel, exact.kernel, s.g1.step);
  CHECK(err_large < err_small);
  CHECK(err_large < 0.05);
  CHECK(a.stderr_kernel.minCoeff() >= 0.0);

  CHECK_THROWS_AS(mc_density_estimate(phi, rng, 0), DomainError);
}

TEST_CASE("monte carlo expectations agree with the reduced density") {
  const Setup s;
  const CompositeState phi = s.entangled();
  const Eigen::MatrixXcd position = s.g1.points.cast<std::complex<double>>().asDiagonal();

  const RngFactory rng{31};
  const McScalar mc = mc_expectation(phi, position, rng, 3000);
  const double exact = expectation(reduced_density(phi), position);
  CHECK(mc.std_error > 0.0);
  CHECK(std::abs(mc.estimate - exact) < 5.0 * mc.std_error + 1e-12);

  CHECK_THROWS_AS(mc_expectation(phi, position.topLeftCorner(4, 4), rng, 10), ShapeError);
  Eigen::MatrixXcd skew = position;
  skew(0, 1) = std::complex<double>(0.0, 1.0);
  CHECK_THROWS_AS(mc_expectation(phi, skew, rng, 10), DomainError);
}

TEST_CASE("rotating the environment readout leaves the system marginal fixed") {
  const Setup s;
  const CompositeState phi = s.entangled();
  const CompositeState rotated = momentum_environment_view(phi);
  CHECK(std::abs(rotated.norm() - 1.0) < 1e-12);
  CHECK(hs_distance(reduced_density(phi).kernel, reduced_density(rotated).kernel, s.g1.step) <
        1e-13);

  // The readout distribution itself does change basis.
  const MarginalDensity momenta = environment_distribution(rotated);
  CHECK(std::abs(momenta.weights.sum() * momenta.grid.step - 1.0) < 1e-12);

  // Enumerating conditionals in either basis rebuilds the same marginal.
  const DensityOperator from_momenta = enumerate_unraveling(rotated);
  CHECK(hs_distance(reduced_density(phi).kernel, from_momenta.kernel, s.g1.step) < 1e-12);
}

TEST_CASE("trajectory ensembles tag every draw with its stream") {
  const Setup s;
  const CompositeState phi0 =
      product_state(s.g1, gaussian_packet(s.g1, 0.7, 1.0 / std::sqrt(2.0)), s.g2,
                    harmonic_ground_state(s.g2, 1.0, 1.2));
  EvolveOptions options;
  options.snapshot_stride = 8;
  const EvolveResult evo = evolve(phi0, s.spec, 0.8, 32, options);

  const RngFactory rng{99};
  const std::vector<double> times = {0.2, 0.8};
  const TrajectoryEnsemble ensemble = process_snapshot(evo.snapshots, times, rng, 16);
  REQUIRE(ensemble.times.size() == 2);
  REQUIRE(ensemble.samples.size() == 2);
  REQUIRE(ensemble.states.size() == 2);
  CHECK(ensemble.seed == 99);
  CHECK(ensemble.count == 16);

  for (std::size_t ti = 0; ti < 2; ++ti) {
    CHECK(std::abs(ensemble.times[ti] - times[ti]) < 1e-12);
    REQUIRE(ensemble.samples[ti].size() == 16);
    for (std::size_t j = 0; j < 16; ++j) {
      const EnvironmentSample& sample = ensemble.samples[ti][j];
      const std::uint64_t expected_stream =
          (static_cast<std::uint64_t>(ti + 1) << 32) | static_cast<std::uint64_t>(j);
      CHECK(sample.rng_stream_id == expected_stream);
      CHECK(sample.env_index >= 0);
      CHECK(sample.env_index < s.g2.n);
      CHECK(sample.weight > 0.0);
      const double norm =
          ensemble.states[ti][j].norm() * std::sqrt(s.g1.step);
      CHECK(std::abs(norm - 1.0) < 1e-12);
    }
  }

  // Replaying a single time slice reuses the same streams as the joint run.
  const TrajectoryEnsemble replay = process_snapshot(evo.snapshots, {0.2}, rng, 16);
  CHECK(replay.samples[0][5].env_index == ensemble.samples[0][5].env_index);

  CHECK_THROWS_AS(process_snapshot(evo.snapshots, {0.31}, rng, 4), DomainError);
  CHECK_THROWS_AS(process_snapshot(evo.snapshots, {0.2}, rng, 0), DomainError);
}
