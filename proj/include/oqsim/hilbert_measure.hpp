#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "oqsim/rng.hpp"
#include "oqsim/states.hpp"

namespace oqsim {

// Zero-mean Gaussian measure on grid functions whose correlation operator is
// a given density operator: draws are z = sum_a sqrt(lambda_a) xi_a e_a with
// iid circular complex Gaussian xi and (lambda, e) the spectral data of the
// operator. E[z z^dagger] then reproduces the kernel.
struct GaussianStateMeasure {
  Grid grid;
  Eigen::VectorXd eigenvalues;    // of kernel * step, ascending, clipped at 0
  Eigen::MatrixXcd eigenvectors;  // counting-orthonormal columns
};

// Spectral decomposition of the density; eigenvalues below the PSD floor are
// an error, small negatives above it are clipped to zero.
GaussianStateMeasure from_density(const DensityOperator& rho);

// Sample i draws from stream stream_base + i.
std::vector<Eigen::VectorXcd> sample_states(const GaussianStateMeasure& measure,
                                            const RngFactory& rng, Eigen::Index count,
                                            std::uint64_t stream_base = 0);

// (1/N) sum z z^dagger in kernel units (not trace-normalized).
Eigen::MatrixXcd empirical_covariance(const std::vector<Eigen::VectorXcd>& samples,
                                      const Grid& grid);

struct CovarianceResidual {
  double time = 0.0;
  Eigen::Index samples = 0;
  double frobenius_residual = 0.0;  // ||empirical - kernel||_F * step
  double purity_exact = 0.0;
};

// For each (time, density) pair: sample `count` states (stream base
// (index+1) << 32) and report the covariance residual.
std::vector<CovarianceResidual> track_evolution(
    const std::vector<std::pair<double, DensityOperator>>& trajectory, const RngFactory& rng,
    Eigen::Index count);

}  // namespace oqsim
