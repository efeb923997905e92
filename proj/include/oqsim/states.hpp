#pragma once

#include <complex>

#include "oqsim/lattice.hpp"

namespace oqsim {

// Tolerances shared by the state types.
inline constexpr double kNormDriftTolerance = 1e-8;      // renormalize below, reject above
inline constexpr double kHermiticityTolerance = 1e-10;   // max |K - K^dagger|
inline constexpr double kTraceTolerance = 1e-10;         // |tr(K) dq - 1|
inline constexpr double kPsdFloor = -1e-9;               // smallest admissible eigenvalue

// Pure state of system (x) environment on the product grid, flat Lebesgue
// coordinates: amplitudes(k, l) = phi(q1_k, q2_l). Quadrature-normalized.
struct CompositeState {
  Grid grid1;
  Grid grid2;
  Eigen::MatrixXcd amplitudes;

  double cell() const { return grid1.step * grid2.step; }
  double norm() const { return amplitudes.norm() * std::sqrt(cell()); }
};

// Validates the shape, renormalizes norm drift below kNormDriftTolerance and
// rejects anything larger.
CompositeState make_composite(const Grid& grid1, const Grid& grid2, Eigen::MatrixXcd amplitudes);

// phi(k, l) = psi1(k) * psi2(l); both inputs must be normalized within 1e-8.
CompositeState product_state(const Grid& grid1, const Eigen::VectorXcd& psi1, const Grid& grid2,
                             const Eigen::VectorXcd& psi2);

// Probability density on one coordinate; nonnegative, unit quadrature mass.
struct MarginalDensity {
  Grid grid;
  Eigen::VectorXd weights;
};

MarginalDensity marginal_density_1(const CompositeState& phi);
MarginalDensity marginal_density_2(const CompositeState& phi);

// Normalized system state conditioned on environment point q2_l, together
// with the probability weight rho_2(q2_l) * dq2 of that column.
struct ConditionalState {
  Eigen::VectorXcd state;
  double weight = 0.0;
};

ConditionalState conditional_state(const CompositeState& phi, Eigen::Index l);

// Reduced state of one subsystem as an integral kernel with
// trace(kernel) * step = 1. Operator action: (K f)(k) = sum_k' K(k,k') f(k') step.
struct DensityOperator {
  Grid grid;
  Eigen::MatrixXcd kernel;
};

struct DensityDiagnostics {
  double hermiticity_defect = 0.0;  // max |K - K^dagger|
  double trace_defect = 0.0;        // |tr(K) * step - 1|
  double min_eigenvalue = 0.0;      // of the operator matrix K * step
};

DensityDiagnostics density_diagnostics(const Grid& grid, const Eigen::MatrixXcd& kernel);

// Checks Hermiticity, unit trace and positive semidefiniteness (within the
// tolerances above) and throws DomainError naming the violated invariant.
DensityOperator make_density(const Grid& grid, Eigen::MatrixXcd kernel);

// Partial trace over the environment (resp. system) as a kernel integral:
// K(k, k') = sum_l phi(k, l) conj(phi(k', l)) * dq2.
DensityOperator reduced_density(const CompositeState& phi);
DensityOperator reduced_density_environment(const CompositeState& phi);

// tr(rho * A) * step for a Hermitian observable matrix A over the same grid.
double expectation(const DensityOperator& rho, const Eigen::MatrixXcd& observable);

// tr(rho^2) * step^2; 1 (within fp) exactly for projector kernels.
double purity(const DensityOperator& rho);

// Max-norm deviation between the direct system marginal and its
// reconstruction as an environment-weighted mixture of conditional densities.
// Zero-mass environment columns are skipped (they contribute no mass).
double chapman_kolmogorov_check(const CompositeState& phi);

// Normalized Gaussian wavepacket exp(-(q-c)^2/(4 sigma^2) + i p q).
Eigen::VectorXcd gaussian_packet(const Grid& grid, double center, double sigma,
                                 double momentum = 0.0);
// Ground state of (1/2m) p^2 + (1/2) m omega^2 q^2 (continuum formula).
Eigen::VectorXcd harmonic_ground_state(const Grid& grid, double mass, double omega);

// |<a|b>|^2 under the lattice quadrature, insensitive to global phase.
double state_fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid& grid);
double composite_fidelity(const CompositeState& a, const CompositeState& b);

// Hilbert-Schmidt distance ||A - B||_F * step between kernels.
double hs_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double step);

}  // namespace oqsim
