#include "oqsim/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unsupported/Eigen/FFT>

namespace oqsim {

namespace {

bool power_of_two(Eigen::Index n) { return n >= 2 && (n & (n - 1)) == 0; }

Eigen::FFT<double>& fft_engine() {
  // Eigen's FFT caches plans per length; one engine per thread is enough.
  static thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace

Grid make_grid(Eigen::Index n, double length, double center) {
  if (!power_of_two(n)) {
    throw ConfigError("grid size must be a power of two >= 2, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("grid length must be positive and finite");
  }
  if (!std::isfinite(center)) {
    throw ConfigError("grid center must be finite");
  }
  Grid g;
  g.n = n;
  g.length = length;
  g.center = center;
  g.step = length / static_cast<double>(n);
  g.points.resize(n);
  g.momenta.resize(n);
  const double left = center - 0.5 * length;
  const double dp = 2.0 * std::numbers::pi / length;
  for (Eigen::Index k = 0; k < n; ++k) {
    g.points(k) = left + static_cast<double>(k) * g.step;
    const auto m = (k < n / 2) ? k : k - n;
    g.momenta(k) = dp * static_cast<double>(m);
  }
  return g;
}

std::vector<Eigen::Index> ascending_momentum_order(const Grid& grid) {
  std::vector<Eigen::Index> order(grid.n);
  // DFT order is 0 .. n/2-1, -n/2 .. -1: ascending = second half, first half.
  const Eigen::Index half = grid.n / 2;
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    order[j] = (j + half) % grid.n;
  }
  return order;
}

Eigen::VectorXd ascending_momenta(const Grid& grid) {
  Eigen::VectorXd out(grid.n);
  const auto order = ascending_momentum_order(grid);
  for (Eigen::Index j = 0; j < grid.n; ++j) out(j) = grid.momenta(order[j]);
  return out;
}

Eigen::VectorXcd to_momentum(const Eigen::VectorXcd& values, const Grid& grid) {
  if (values.size() != grid.n) {
    throw ShapeError("to_momentum: expected " + std::to_string(grid.n) + " values, got " +
                     std::to_string(values.size()));
  }
  Eigen::VectorXcd bins(grid.n);
  fft_engine().fwd(bins, values);
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.n));
  const double q0 = grid.origin();
  Eigen::VectorXcd out(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    out(j) = bins(j) * scale * std::polar(1.0, -grid.momenta(j) * q0);
  }
  return out;
}

Eigen::VectorXcd from_momentum(const Eigen::VectorXcd& values, const Grid& grid) {
  if (values.size() != grid.n) {
    throw ShapeError("from_momentum: expected " + std::to_string(grid.n) + " values, got " +
                     std::to_string(values.size()));
  }
  const double q0 = grid.origin();
  Eigen::VectorXcd bins(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    bins(j) = values(j) * std::polar(1.0, grid.momenta(j) * q0);
  }
  Eigen::VectorXcd out(grid.n);
  fft_engine().inv(out, bins);  // divides by n
  out *= std::sqrt(static_cast<double>(grid.n));
  return out;
}

Eigen::VectorXd gaussian_density(const GaussianMeasureSpec& spec, const Grid& grid) {
  if (!(spec.variance > 0.0) || !std::isfinite(spec.variance)) {
    throw ConfigError("gaussian measure variance must be positive");
  }
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * spec.variance);
  Eigen::VectorXd out(grid.n);
  for (Eigen::Index k = 0; k < grid.n; ++k) {
    const double d = grid.points(k) - spec.mean;
    out(k) = norm * std::exp(-0.5 * d * d / spec.variance);
  }
  return out;
}

Eigen::VectorXcd embed_gaussian(const Eigen::VectorXcd& f, const GaussianMeasureSpec& spec,
                                const Grid& grid) {
  if (f.size() != grid.n) throw ShapeError("embed_gaussian: value count does not match grid");
  const Eigen::VectorXd density = gaussian_density(spec, grid);
  return f.cwiseProduct(density.cwiseSqrt().cast<std::complex<double>>());
}

Eigen::VectorXcd unembed_gaussian(const Eigen::VectorXcd& f, const GaussianMeasureSpec& spec,
                                  const Grid& grid) {
  if (f.size() != grid.n) throw ShapeError("unembed_gaussian: value count does not match grid");
  const Eigen::VectorXd density = gaussian_density(spec, grid);
  Eigen::VectorXcd out(grid.n);
  for (Eigen::Index k = 0; k < grid.n; ++k) {
    const double root = std::sqrt(density(k));
    out(k) = (root > 0.0) ? f(k) / root : std::complex<double>(0.0, 0.0);
  }
  return out;
}

std::complex<double> quadrature_inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                                      const Grid& grid) {
  if (f.size() != grid.n || g.size() != grid.n) {
    throw ShapeError("quadrature_inner: value count does not match grid");
  }
  return f.dot(g) * grid.step;  // Eigen's dot conjugates the first argument
}

double quadrature_norm(const Eigen::VectorXcd& f, const Grid& grid) {
  if (f.size() != grid.n) throw ShapeError("quadrature_norm: value count does not match grid");
  return f.norm() * std::sqrt(grid.step);
}

}  // namespace oqsim
