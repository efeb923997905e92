#include "oqsim/wigner.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/FFT>
#include <utility>

#include "oqsim/hamiltonian.hpp"

namespace oqsim {

namespace {

using Complex = std::complex<double>;

Eigen::FFT<double>& fft_engine() {
  static thread_local Eigen::FFT<double> engine;
  return engine;
}

void fft2_forward_inplace(Eigen::MatrixXcd& a) {
  auto& fft = fft_engine();
  Eigen::VectorXcd tmp(a.rows()), out(a.rows());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    tmp = a.col(c);
    fft.fwd(out, tmp);
    a.col(c) = out;
  }
  Eigen::VectorXcd rtmp(a.cols()), rout(a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    rtmp = a.row(r).transpose();
    fft.fwd(rout, rtmp);
    a.row(r) = rout.transpose();
  }
}

void fft2_inverse_inplace(Eigen::MatrixXcd& a) {
  auto& fft = fft_engine();
  Eigen::VectorXcd tmp(a.rows()), out(a.rows());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    tmp = a.col(c);
    fft.inv(out, tmp);
    a.col(c) = out;
  }
  Eigen::VectorXcd rtmp(a.cols()), rout(a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    rtmp = a.row(r).transpose();
    fft.inv(rout, rtmp);
    a.row(r) = rout.transpose();
  }
}

// Frequency-bin fan-out for one axis of the zero-padded spectrum: bin a of an
// n-point transform lands at position (a mod 2n) of the 2n-point spectrum,
// except the Nyquist bin a = n/2, whose content is split evenly between the
// +n/2 and -n/2 slots so conjugate symmetry (hence realness) is preserved.
std::vector<std::pair<Eigen::Index, double>> pad_targets(Eigen::Index a, Eigen::Index n) {
  if (a == n / 2) {
    return {{n / 2, 0.5}, {2 * n - n / 2, 0.5}};
  }
  const Eigen::Index out = (a < n / 2) ? a : a + n;
  return {{out, 1.0}};
}

inline Eigen::Index wrap(Eigen::Index i, Eigen::Index n) {
  i %= n;
  return (i < 0) ? i + n : i;
}

}  // namespace

Eigen::MatrixXcd spectral_upsample2x(const Eigen::MatrixXcd& values) {
  const Eigen::Index rows = values.rows();
  const Eigen::Index cols = values.cols();
  if (rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0) {
    throw ShapeError("spectral_upsample2x: dimensions must be even and >= 2");
  }
  Eigen::MatrixXcd spectrum = values;
  fft2_forward_inplace(spectrum);
  Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(2 * rows, 2 * cols);
  for (Eigen::Index a = 0; a < rows; ++a) {
    const auto row_targets = pad_targets(a, rows);
    for (Eigen::Index b = 0; b < cols; ++b) {
      const auto col_targets = pad_targets(b, cols);
      for (const auto& [ra, wa] : row_targets) {
        for (const auto& [cb, wb] : col_targets) {
          padded(ra, cb) += wa * wb * spectrum(a, b);
        }
      }
    }
  }
  fft2_inverse_inplace(padded);
  return 4.0 * padded;
}

double WignerTable::mass() const {
  return values.sum() * qgrid.step * qgrid.momentum_step();
}

double WignerTable4::at(Eigen::Index k1, Eigen::Index j1, Eigen::Index k2,
                        Eigen::Index j2) const {
  const Eigen::Index np1 = momenta1.size();
  const Eigen::Index n2 = grid2.n;
  const Eigen::Index np2 = momenta2.size();
  return values[static_cast<std::size_t>(((k1 * np1 + j1) * n2 + k2) * np2 + j2)];
}

double WignerTable4::mass() const {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum * grid1.step * grid1.momentum_step() * grid2.step * grid2.momentum_step();
}

WignerTable wigner_from_density(const DensityOperator& rho) {
  const Grid& g = rho.grid;
  const Eigen::Index n = g.n;
  const Eigen::Index half = n / 2;
  const Eigen::MatrixXcd fine = spectral_upsample2x(rho.kernel);
  auto& fft = fft_engine();

  WignerTable table;
  table.qgrid = g;
  table.momenta = ascending_momenta(g);
  table.values.resize(n, n);
  const double scale = g.step / (2.0 * std::numbers::pi);

  Eigen::VectorXcd displaced(n), transformed(n);
  double max_imag = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index m = -half + 1; m < half; ++m) {
      const Eigen::Index a = wrap(2 * k + m, 2 * n);
      const Eigen::Index b = wrap(2 * k - m, 2 * n);
      displaced(wrap(m, n)) = fine(a, b);
    }
    // Half-weight split across the +-n/2 displacement pair (same Fourier
    // factor (-1)^j for both, Hermitian partners of each other), so the
    // window is symmetric and the transform exactly real.
    {
      const Eigen::Index a = wrap(2 * k + half, 2 * n);
      const Eigen::Index b = wrap(2 * k - half, 2 * n);
      displaced(half) = 0.5 * (fine(b, a) + fine(a, b));
    }
    fft.fwd(transformed, displaced);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex value = transformed((j + half) % n) * scale;
      max_imag = std::max(max_imag, std::abs(value.imag()));
      table.values(k, j) = value.real();
    }
  }
  if (max_imag > 1e-10) {
    throw NumericalError("wigner_from_density: imaginary residue " + std::to_string(max_imag));
  }
  const double mass = table.mass();
  if (std::abs(mass - 1.0) > 1e-8) {
    throw NumericalError("wigner_from_density: mass " + std::to_string(mass));
  }
  return table;
}

WignerTable4 joint_wigner(const CompositeState& phi, std::size_t entry_cap) {
  const Eigen::Index n1 = phi.grid1.n;
  const Eigen::Index n2 = phi.grid2.n;
  const std::size_t entries = static_cast<std::size_t>(n1) * n1 * n2 * n2;
  if (entries > entry_cap) {
    throw ResourceError("joint_wigner: " + std::to_string(entries) + " entries exceed cap " +
                        std::to_string(entry_cap));
  }
  const Eigen::Index h1 = n1 / 2;
  const Eigen::Index h2 = n2 / 2;
  const Eigen::MatrixXcd fine = spectral_upsample2x(phi.amplitudes);

  WignerTable4 table;
  table.grid1 = phi.grid1;
  table.grid2 = phi.grid2;
  table.momenta1 = ascending_momenta(phi.grid1);
  table.momenta2 = ascending_momenta(phi.grid2);
  table.values.assign(entries, 0.0);
  const double scale = phi.grid1.step * phi.grid2.step /
                       (4.0 * std::numbers::pi * std::numbers::pi);

  Eigen::MatrixXcd slab(n1, n2);
  double max_imag = 0.0;
  for (Eigen::Index k1 = 0; k1 < n1; ++k1) {
    for (Eigen::Index k2 = 0; k2 < n2; ++k2) {
      // Half-weight split across both +-n/2 displacement edges per axis (the
      // +-n/2 pair shares its Fourier factor and wraps to one slot), keeping
      // the window symmetric and the transform exactly real.
      slab.setZero();
      for (Eigen::Index m1 = -h1; m1 <= h1; ++m1) {
        const double w1 = (std::abs(m1) == h1) ? 0.5 : 1.0;
        const Eigen::Index a1 = wrap(2 * k1 + m1, 2 * n1);
        const Eigen::Index b1 = wrap(2 * k1 - m1, 2 * n1);
        for (Eigen::Index m2 = -h2; m2 <= h2; ++m2) {
          const double w2 = (std::abs(m2) == h2) ? 0.5 : 1.0;
          const Eigen::Index a2 = wrap(2 * k2 + m2, 2 * n2);
          const Eigen::Index b2 = wrap(2 * k2 - m2, 2 * n2);
          slab(wrap(m1, n1), wrap(m2, n2)) +=
              w1 * w2 * fine(a1, a2) * std::conj(fine(b1, b2));
        }
      }
      fft2_forward_inplace(slab);
      for (Eigen::Index j1 = 0; j1 < n1; ++j1) {
        for (Eigen::Index j2 = 0; j2 < n2; ++j2) {
          const Complex value = slab((j1 + h1) % n1, (j2 + h2) % n2) * scale;
          max_imag = std::max(max_imag, std::abs(value.imag()));
          table.values[static_cast<std::size_t>(((k1 * n1 + j1) * n2 + k2) * n2 + j2)] =
              value.real();
        }
      }
    }
  }
  if (max_imag > 1e-10) {
    throw NumericalError("joint_wigner: imaginary residue " + std::to_string(max_imag));
  }
  const double mass = table.mass();
  if (std::abs(mass - 1.0) > 1e-7) {
    throw NumericalError("joint_wigner: mass " + std::to_string(mass));
  }
  return table;
}

WignerTable marginalize_wigner(const WignerTable4& table) {
  const Eigen::Index n1 = table.grid1.n;
  const Eigen::Index n2 = table.grid2.n;
  WignerTable out;
  out.qgrid = table.grid1;
  out.momenta = table.momenta1;
  out.values = Eigen::MatrixXd::Zero(n1, n1);
  const double cell2 = table.grid2.step * table.grid2.momentum_step();
  for (Eigen::Index k1 = 0; k1 < n1; ++k1) {
    for (Eigen::Index j1 = 0; j1 < n1; ++j1) {
      double sum = 0.0;
      for (Eigen::Index k2 = 0; k2 < n2; ++k2) {
        for (Eigen::Index j2 = 0; j2 < n2; ++j2) {
          sum += table.at(k1, j1, k2, j2);
        }
      }
      out.values(k1, j1) = sum * cell2;
    }
  }
  return out;
}

WignerMarginals wigner_marginals(const WignerTable& table) {
  WignerMarginals m;
  m.position = table.values.rowwise().sum() * table.qgrid.momentum_step();
  m.momentum = table.values.colwise().sum().transpose() * table.qgrid.step;
  return m;
}

Eigen::VectorXd momentum_density(const DensityOperator& rho) {
  const Eigen::MatrixXcd u = dft_matrix(rho.grid);
  const Eigen::MatrixXcd momentum_kernel = u * rho.kernel * u.adjoint();
  const auto order = ascending_momentum_order(rho.grid);
  Eigen::VectorXd density(rho.grid.n);
  const double scale = rho.grid.step / rho.grid.momentum_step();
  for (Eigen::Index j = 0; j < rho.grid.n; ++j) {
    density(j) = momentum_kernel(order[j], order[j]).real() * scale;
  }
  return density;
}

WeylCharacteristic weyl_characteristic(const DensityOperator& rho, Eigen::Index u_count,
                                       Eigen::Index v_count) {
  const Grid& g = rho.grid;
  const Eigen::Index n = g.n;
  if (u_count <= 0) u_count = n;
  if (v_count <= 0) v_count = n;

  WeylCharacteristic chi;
  chi.u.resize(u_count);
  chi.v.resize(v_count);
  for (Eigen::Index a = 0; a < u_count; ++a) {
    chi.u(a) = (static_cast<double>(a) - static_cast<double>(u_count / 2)) * g.momentum_step();
  }
  for (Eigen::Index b = 0; b < v_count; ++b) {
    chi.v(b) = (static_cast<double>(b) - static_cast<double>(v_count / 2)) * g.step;
  }
  chi.values.resize(u_count, v_count);

  // e^{-i u q_k} rows for the trace against the diagonal of T_v rho.
  Eigen::MatrixXcd modulation(u_count, n);
  for (Eigen::Index a = 0; a < u_count; ++a) {
    for (Eigen::Index k = 0; k < n; ++k) {
      modulation(a, k) = std::polar(1.0, -chi.u(a) * g.points(k));
    }
  }

  auto& fft = fft_engine();
  Eigen::VectorXcd freq(n), back(n);
  Eigen::MatrixXcd translated(n, n);
  for (Eigen::Index b = 0; b < v_count; ++b) {
    const double v = chi.v(b);
    // Translation e^{-i v p} applied to each column of the kernel.
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::VectorXcd column = rho.kernel.col(c);
      fft.fwd(freq, column);
      for (Eigen::Index j = 0; j < n; ++j) {
        freq(j) *= std::polar(1.0, -v * g.momenta(j));
      }
      fft.inv(back, freq);
      translated.col(c) = back;
    }
    const Eigen::VectorXcd diag = translated.diagonal();
    const Eigen::VectorXcd column = modulation * diag * g.step;
    for (Eigen::Index a = 0; a < u_count; ++a) {
      chi.values(a, b) = column(a) * std::polar(1.0, 0.5 * chi.u(a) * v);
    }
  }
  return chi;
}

WignerTable characteristic_to_wigner(const WeylCharacteristic& chi, const Grid& grid) {
  const Eigen::Index n = grid.n;
  WignerTable table;
  table.qgrid = grid;
  table.momenta = ascending_momenta(grid);

  Eigen::MatrixXcd left(n, chi.u.size());   // e^{+i u_a q_k}
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index a = 0; a < chi.u.size(); ++a) {
      left(k, a) = std::polar(1.0, chi.u(a) * grid.points(k));
    }
  }
  Eigen::MatrixXcd right(chi.v.size(), n);   // e^{+i v_b p_j}
  for (Eigen::Index b = 0; b < chi.v.size(); ++b) {
    for (Eigen::Index j = 0; j < n; ++j) {
      right(b, j) = std::polar(1.0, chi.v(b) * table.momenta(j));
    }
  }
  const double du = grid.momentum_step();
  const double dv = grid.step;
  const double scale = du * dv / (4.0 * std::numbers::pi * std::numbers::pi);
  const Eigen::MatrixXcd w = left * chi.values * right * scale;
  table.values = w.real();
  return table;
}

double wigner_overlap(const WignerTable& a, const WignerTable& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw ShapeError("wigner_overlap: table shapes differ");
  }
  return 2.0 * std::numbers::pi * a.values.cwiseProduct(b.values).sum() * a.qgrid.step *
         a.qgrid.momentum_step();
}

}  // namespace oqsim
