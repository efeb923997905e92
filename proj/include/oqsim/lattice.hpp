#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <vector>

#include "oqsim/errors.hpp"

namespace oqsim {

// Uniform position lattice together with its induced momentum lattice
// (hbar = 1 throughout). Points are q_k = center - L/2 + k*step; momenta are
// 2*pi*m/L for m = -n/2 .. n/2-1 stored in standard DFT frequency order
// (0, 1, ..., n/2-1, -n/2, ..., -1). Reciprocity: step * momentum_step * n
// = 2*pi, so the DFT below is exactly unitary. User-facing tables sort the
// momenta ascending; see ascending_momentum_order.
struct Grid {
  Eigen::Index n = 0;
  double length = 0.0;
  double center = 0.0;
  double step = 0.0;
  Eigen::VectorXd points;
  Eigen::VectorXd momenta;

  double momentum_step() const { return 2.0 * std::numbers::pi / length; }
  double origin() const { return points(0); }
};

// n must be a power of two >= 2, length positive and finite.
Grid make_grid(Eigen::Index n, double length, double center = 0.0);

// Permutation p with momenta(p[0]) < momenta(p[1]) < ...
std::vector<Eigen::Index> ascending_momentum_order(const Grid& grid);
Eigen::VectorXd ascending_momenta(const Grid& grid);

// Unitary transform to/from the momentum representation. Bin j of the result
// carries momentum grid.momenta(j); phases are referenced to the absolute
// coordinates, so an on-grid plane wave e^{i p_m q} maps to sqrt(n) at bin m.
// Norm-preserving under the counting measure; round trip is identity to fp.
Eigen::VectorXcd to_momentum(const Eigen::VectorXcd& values, const Grid& grid);
Eigen::VectorXcd from_momentum(const Eigen::VectorXcd& values, const Grid& grid);

// Reference Gaussian measure on an environment coordinate.
struct GaussianMeasureSpec {
  double mean = 0.0;
  double variance = 1.0;
};

// Pointwise density d nu / dq on the grid.
Eigen::VectorXd gaussian_density(const GaussianMeasureSpec& spec, const Grid& grid);

// Isometric embedding L2(nu) -> L2(dq): multiply by sqrt(d nu / dq).
// The nu-quadrature norm of f equals the flat quadrature norm of the image.
Eigen::VectorXcd embed_gaussian(const Eigen::VectorXcd& f, const GaussianMeasureSpec& spec,
                                const Grid& grid);
// Inverse off the (numerically) zero set of the density; points where the
// density underflows to zero map to zero.
Eigen::VectorXcd unembed_gaussian(const Eigen::VectorXcd& f, const GaussianMeasureSpec& spec,
                                  const Grid& grid);

// sum conj(f) * g * step  (the L2(dq) inner product on the lattice).
std::complex<double> quadrature_inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                                      const Grid& grid);
double quadrature_norm(const Eigen::VectorXcd& f, const Grid& grid);

}  // namespace oqsim
