#include "oqsim/oracle.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace oqsim {

namespace {
using Complex = std::complex<double>;
}

ExactPropagator::ExactPropagator(const HamiltonianSpec& spec, const Grid& grid1,
                                 const Grid& grid2, Eigen::Index size_cap)
    : grid1_(grid1), grid2_(grid2) {
  const Eigen::MatrixXcd h = build_dense_hamiltonian(spec, grid1, grid2, size_cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("ExactPropagator: eigendecomposition failed");
  }
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

CompositeState ExactPropagator::propagate(const CompositeState& phi0, double t) const {
  if (phi0.grid1.n != grid1_.n || phi0.grid2.n != grid2_.n) {
    throw ShapeError("ExactPropagator: state does not match the grids");
  }
  const Eigen::Index total = grid1_.n * grid2_.n;
  const Eigen::Map<const Eigen::VectorXcd> flat(phi0.amplitudes.data(), total);
  Eigen::VectorXcd coeffs = eigenvectors_.adjoint() * flat;
  for (Eigen::Index i = 0; i < total; ++i) {
    coeffs(i) *= std::polar(1.0, -t * eigenvalues_(i));
  }
  const Eigen::VectorXcd out = eigenvectors_ * coeffs;
  Eigen::MatrixXcd amplitudes =
      Eigen::Map<const Eigen::MatrixXcd>(out.data(), grid1_.n, grid2_.n);
  return make_composite(phi0.grid1, phi0.grid2, std::move(amplitudes));
}

CompositeState exact_propagate(const CompositeState& phi0, const HamiltonianSpec& spec, double t,
                               Eigen::Index size_cap) {
  return ExactPropagator(spec, phi0.grid1, phi0.grid2, size_cap).propagate(phi0, t);
}

Eigen::MatrixXcd exact_displacement(const Grid& grid, double u, double v) {
  if (grid.n > kDisplacementSizeCap) {
    throw ResourceError("exact_displacement: grid size " + std::to_string(grid.n) +
                        " exceeds cap " + std::to_string(kDisplacementSizeCap));
  }
  Eigen::MatrixXcd generator = v * dense_momentum(grid);
  generator.diagonal() += (u * grid.points).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(generator);
  if (es.info() != Eigen::Success) {
    throw NumericalError("exact_displacement: eigendecomposition failed");
  }
  Eigen::VectorXcd phases(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    phases(i) = std::polar(1.0, -es.eigenvalues()(i));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

DensityOperator enumerate_unraveling(const CompositeState& phi) {
  const Eigen::Index n1 = phi.grid1.n;
  Eigen::MatrixXcd kernel = Eigen::MatrixXcd::Zero(n1, n1);
  for (Eigen::Index l = 0; l < phi.grid2.n; ++l) {
    const Eigen::VectorXcd column = phi.amplitudes.col(l);
    const double counting_sq = column.squaredNorm();
    if (!(counting_sq > 0.0)) continue;  // zero-probability outcome
    const double density = counting_sq * phi.grid1.step;       // rho_2(q2_l)
    const double weight = density * phi.grid2.step;            // outcome probability
    const Eigen::VectorXcd normalized = column / std::sqrt(density);
    kernel.noalias() += weight * (normalized * normalized.adjoint());
  }
  return DensityOperator{phi.grid1, std::move(kernel)};
}

}  // namespace oqsim
