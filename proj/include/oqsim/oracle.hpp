#pragma once

#include "oqsim/hamiltonian.hpp"

namespace oqsim {

// Exact-diagonalization reference: eigendecomposition of the dense composite
// Hamiltonian, reusable across times. Deliberately works on flattened dense
// matrices rather than the split/FFT fast paths; the only shared ingredients
// are the grid and the dense operator builders, so the discretized model is
// identical while the propagation path is independent.
class ExactPropagator {
 public:
  ExactPropagator(const HamiltonianSpec& spec, const Grid& grid1, const Grid& grid2,
                  Eigen::Index size_cap = kOracleSizeCap);

  CompositeState propagate(const CompositeState& phi0, double t) const;
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  Grid grid1_;
  Grid grid2_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
};

CompositeState exact_propagate(const CompositeState& phi0, const HamiltonianSpec& spec, double t,
                               Eigen::Index size_cap = kOracleSizeCap);

inline constexpr Eigen::Index kDisplacementSizeCap = 256;

// Dense unitary e^{-i (u q + v p)} obtained by exponentiating the full
// generator (no factorization); the reference for the phase-space tools.
Eigen::MatrixXcd exact_displacement(const Grid& grid, double u, double v);

// Ground truth for the stochastic estimators: the weighted sum of conditional
// projectors over every environment point, computed by explicit enumeration.
DensityOperator enumerate_unraveling(const CompositeState& phi);

}  // namespace oqsim
