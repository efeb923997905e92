#include "oqsim/states.hpp"

#include <cmath>
#include <string>

namespace oqsim {

namespace {

void check_shape(const Grid& grid1, const Grid& grid2, const Eigen::MatrixXcd& amplitudes,
                 const char* what) {
  if (amplitudes.rows() != grid1.n || amplitudes.cols() != grid2.n) {
    throw ShapeError(std::string(what) + ": amplitude shape (" +
                     std::to_string(amplitudes.rows()) + ", " + std::to_string(amplitudes.cols()) +
                     ") does not match grids (" + std::to_string(grid1.n) + ", " +
                     std::to_string(grid2.n) + ")");
  }
}

}  // namespace

CompositeState make_composite(const Grid& grid1, const Grid& grid2, Eigen::MatrixXcd amplitudes) {
  check_shape(grid1, grid2, amplitudes, "make_composite");
  const double norm = amplitudes.norm() * std::sqrt(grid1.step * grid2.step);
  const double drift = std::abs(norm - 1.0);
  if (!(drift < kNormDriftTolerance)) {
    throw DomainError("make_composite: norm drift " + std::to_string(drift) +
                      " exceeds tolerance " + std::to_string(kNormDriftTolerance));
  }
  amplitudes /= norm;
  return CompositeState{grid1, grid2, std::move(amplitudes)};
}

CompositeState product_state(const Grid& grid1, const Eigen::VectorXcd& psi1, const Grid& grid2,
                             const Eigen::VectorXcd& psi2) {
  if (psi1.size() != grid1.n || psi2.size() != grid2.n) {
    throw ShapeError("product_state: factor lengths do not match grids");
  }
  const double n1 = quadrature_norm(psi1, grid1);
  const double n2 = quadrature_norm(psi2, grid2);
  if (std::abs(n1 - 1.0) > kNormDriftTolerance || std::abs(n2 - 1.0) > kNormDriftTolerance) {
    throw DomainError("product_state: factors must be quadrature-normalized within 1e-8");
  }
  return make_composite(grid1, grid2, psi1 * psi2.transpose());
}

MarginalDensity marginal_density_1(const CompositeState& phi) {
  Eigen::VectorXd w = phi.amplitudes.cwiseAbs2().rowwise().sum() * phi.grid2.step;
  return MarginalDensity{phi.grid1, std::move(w)};
}

MarginalDensity marginal_density_2(const CompositeState& phi) {
  Eigen::VectorXd w = phi.amplitudes.cwiseAbs2().colwise().sum().transpose() * phi.grid1.step;
  return MarginalDensity{phi.grid2, std::move(w)};
}

ConditionalState conditional_state(const CompositeState& phi, Eigen::Index l) {
  if (l < 0 || l >= phi.grid2.n) {
    throw DomainError("conditional_state: environment index " + std::to_string(l) +
                      " out of range");
  }
  const Eigen::VectorXcd column = phi.amplitudes.col(l);
  const double density = column.squaredNorm() * phi.grid1.step;  // rho_2(q2_l)
  const double weight = density * phi.grid2.step;
  if (!(weight > 1e-30)) {
    throw DomainError("conditional_state: zero-probability environment column " +
                      std::to_string(l));
  }
  return ConditionalState{column / std::sqrt(density), weight};
}

DensityDiagnostics density_diagnostics(const Grid& grid, const Eigen::MatrixXcd& kernel) {
  DensityDiagnostics d;
  d.hermiticity_defect = (kernel - kernel.adjoint()).cwiseAbs().maxCoeff();
  d.trace_defect = std::abs(kernel.trace().real() * grid.step - 1.0) +
                   std::abs(kernel.trace().imag() * grid.step);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kernel * grid.step,
                                                     Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityOperator make_density(const Grid& grid, Eigen::MatrixXcd kernel) {
  if (kernel.rows() != grid.n || kernel.cols() != grid.n) {
    throw ShapeError("make_density: kernel shape does not match grid");
  }
  const DensityDiagnostics d = density_diagnostics(grid, kernel);
  if (d.hermiticity_defect > kHermiticityTolerance) {
    throw DomainError("make_density: Hermiticity defect " + std::to_string(d.hermiticity_defect));
  }
  if (d.trace_defect > kTraceTolerance) {
    throw DomainError("make_density: trace defect " + std::to_string(d.trace_defect));
  }
  if (d.min_eigenvalue < kPsdFloor) {
    throw DomainError("make_density: eigenvalue " + std::to_string(d.min_eigenvalue) +
                      " below PSD floor");
  }
  return DensityOperator{grid, std::move(kernel)};
}

DensityOperator reduced_density(const CompositeState& phi) {
  Eigen::MatrixXcd kernel = phi.amplitudes * phi.amplitudes.adjoint() * phi.grid2.step;
  return DensityOperator{phi.grid1, std::move(kernel)};
}

DensityOperator reduced_density_environment(const CompositeState& phi) {
  Eigen::MatrixXcd kernel =
      (phi.amplitudes.adjoint() * phi.amplitudes).transpose() * phi.grid1.step;
  return DensityOperator{phi.grid2, std::move(kernel)};
}

double expectation(const DensityOperator& rho, const Eigen::MatrixXcd& observable) {
  if (observable.rows() != rho.grid.n || observable.cols() != rho.grid.n) {
    throw ShapeError("expectation: observable shape does not match grid");
  }
  const double herm = (observable - observable.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermiticityTolerance) {
    throw DomainError("expectation: observable is not Hermitian (defect " + std::to_string(herm) +
                      ")");
  }
  // tr(K A) = sum_{k,k'} K(k,k') A(k',k)
  const std::complex<double> tr = rho.kernel.cwiseProduct(observable.transpose()).sum();
  const double value = tr.real() * rho.grid.step;
  const double residue = std::abs(tr.imag()) * rho.grid.step;
  if (residue > 1e-10) {
    throw NumericalError("expectation: imaginary residue " + std::to_string(residue));
  }
  return value;
}

double purity(const DensityOperator& rho) {
  return rho.kernel.squaredNorm() * rho.grid.step * rho.grid.step;
}

double chapman_kolmogorov_check(const CompositeState& phi) {
  const MarginalDensity direct = marginal_density_1(phi);
  Eigen::VectorXd mixed = Eigen::VectorXd::Zero(phi.grid1.n);
  for (Eigen::Index l = 0; l < phi.grid2.n; ++l) {
    const Eigen::VectorXd column_density = phi.amplitudes.col(l).cwiseAbs2();
    const double mass = column_density.sum() * phi.grid1.step;  // rho_2(q2_l)
    if (!(mass > 0.0)) continue;
    // conditional density times the weight of this environment point
    mixed += (column_density / mass) * (mass * phi.grid2.step);
  }
  return (mixed - direct.weights).cwiseAbs().maxCoeff();
}

Eigen::VectorXcd gaussian_packet(const Grid& grid, double center, double sigma, double momentum) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("gaussian_packet: sigma must be positive");
  }
  Eigen::VectorXcd out(grid.n);
  for (Eigen::Index k = 0; k < grid.n; ++k) {
    const double d = grid.points(k) - center;
    out(k) = std::polar(std::exp(-d * d / (4.0 * sigma * sigma)), momentum * grid.points(k));
  }
  const double norm = quadrature_norm(out, grid);
  if (!(norm > 0.0)) throw NumericalError("gaussian_packet: packet underflowed to zero");
  return out / norm;
}

Eigen::VectorXcd harmonic_ground_state(const Grid& grid, double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0)) {
    throw DomainError("harmonic_ground_state: mass and omega must be positive");
  }
  return gaussian_packet(grid, 0.0, 1.0 / std::sqrt(2.0 * mass * omega), 0.0);
}

double state_fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid& grid) {
  const std::complex<double> overlap = quadrature_inner(a, b, grid);
  const double na = quadrature_norm(a, grid);
  const double nb = quadrature_norm(b, grid);
  if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("state_fidelity: zero state");
  return std::norm(overlap) / (na * na * nb * nb);
}

double composite_fidelity(const CompositeState& a, const CompositeState& b) {
  if (a.amplitudes.rows() != b.amplitudes.rows() || a.amplitudes.cols() != b.amplitudes.cols()) {
    throw ShapeError("composite_fidelity: shapes differ");
  }
  const std::complex<double> overlap =
      (a.amplitudes.conjugate().cwiseProduct(b.amplitudes)).sum() * a.cell();
  return std::norm(overlap) / (a.norm() * a.norm() * b.norm() * b.norm());
}

double hs_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double step) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("hs_distance: shapes differ");
  }
  return (a - b).norm() * step;
}

}  // namespace oqsim
