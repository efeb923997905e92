#include "oqsim/hilbert_measure.hpp"

#include <cmath>
#include <string>

namespace oqsim {

GaussianStateMeasure from_density(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.kernel * rho.grid.step);
  if (es.info() != Eigen::Success) {
    throw NumericalError("from_density: eigendecomposition failed");
  }
  Eigen::VectorXd lambda = es.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < kPsdFloor) {
      throw DomainError("from_density: eigenvalue " + std::to_string(lambda(i)) +
                        " below the PSD floor");
    }
    if (lambda(i) < 0.0) lambda(i) = 0.0;
  }
  return GaussianStateMeasure{rho.grid, std::move(lambda), es.eigenvectors()};
}

std::vector<Eigen::VectorXcd> sample_states(const GaussianStateMeasure& measure,
                                            const RngFactory& rng, Eigen::Index count,
                                            std::uint64_t stream_base) {
  if (count < 1) throw DomainError("sample_states: count must be >= 1");
  const Eigen::Index n = measure.grid.n;
  if (measure.eigenvalues.size() != n || measure.eigenvectors.rows() != n) {
    throw ShapeError("sample_states: spectral data does not match the grid");
  }
  const Eigen::VectorXd roots = measure.eigenvalues.cwiseSqrt();
  const double to_kernel_units = 1.0 / std::sqrt(measure.grid.step);
  std::vector<Eigen::VectorXcd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    StreamRng stream = rng.stream(stream_base + static_cast<std::uint64_t>(i));
    Eigen::VectorXcd coeffs(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      coeffs(a) = roots(a) * stream.complex_normal();
    }
    out.push_back((measure.eigenvectors * coeffs) * to_kernel_units);
  }
  return out;
}

Eigen::MatrixXcd empirical_covariance(const std::vector<Eigen::VectorXcd>& samples,
                                      const Grid& grid) {
  if (samples.empty()) throw DomainError("empirical_covariance: no samples");
  const Eigen::Index n = grid.n;
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n, n);
  for (const Eigen::VectorXcd& z : samples) {
    if (z.size() != n) throw ShapeError("empirical_covariance: sample length mismatch");
    cov.noalias() += z * z.adjoint();
  }
  return cov / static_cast<double>(samples.size());
}

std::vector<CovarianceResidual> track_evolution(
    const std::vector<std::pair<double, DensityOperator>>& trajectory, const RngFactory& rng,
    Eigen::Index count) {
  std::vector<CovarianceResidual> out;
  out.reserve(trajectory.size());
  for (std::size_t ti = 0; ti < trajectory.size(); ++ti) {
    const auto& [time, rho] = trajectory[ti];
    const GaussianStateMeasure measure = from_density(rho);
    const auto samples =
        sample_states(measure, rng, count, static_cast<std::uint64_t>(ti + 1) << 32);
    const Eigen::MatrixXcd cov = empirical_covariance(samples, rho.grid);
    out.push_back(CovarianceResidual{time, count, hs_distance(cov, rho.kernel, rho.grid.step),
                                     purity(rho)});
  }
  return out;
}

}  // namespace oqsim
