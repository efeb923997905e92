#include "oqsim/hamiltonian.hpp"

#include <cmath>
#include <complex>
#include <set>
#include <unsupported/Eigen/FFT>

namespace oqsim {

namespace {

using Complex = std::complex<double>;

Eigen::FFT<double>& fft_engine() {
  static thread_local Eigen::FFT<double> engine;
  return engine;
}

// Small strict reader for preset parameter maps: defaulted lookups, and any
// key never asked for is a configuration error.
class ParamReader {
 public:
  explicit ParamReader(const std::map<std::string, double>& params) : params_(params) {}

  double get(const std::string& name, double fallback) {
    used_.insert(name);
    const auto it = params_.find(name);
    return it == params_.end() ? fallback : it->second;
  }

  void finish(const std::string& preset) const {
    for (const auto& [key, value] : params_) {
      (void)value;
      if (!used_.count(key)) {
        throw ConfigError("preset '" + preset + "': unknown parameter '" + key + "'");
      }
    }
  }

 private:
  const std::map<std::string, double>& params_;
  std::set<std::string> used_;
};

void check_spec_shapes(const HamiltonianSpec& spec, const Grid& grid1, const Grid& grid2,
                       const char* what) {
  if (spec.v1.size() != grid1.n || spec.v2.size() != grid2.n) {
    throw ShapeError(std::string(what) + ": potential lengths do not match grids");
  }
  if (spec.v12.size() != 0 &&
      (spec.v12.rows() != grid1.n || spec.v12.cols() != grid2.n)) {
    throw ShapeError(std::string(what) + ": coupling shape does not match grids");
  }
}

}  // namespace

bool has_coupling(const HamiltonianSpec& spec) {
  return spec.v12.size() != 0 && spec.v12.cwiseAbs().maxCoeff() > 0.0;
}

HamiltonianSpec make_preset(const std::string& name, const Grid& grid1, const Grid& grid2,
                            const std::map<std::string, double>& params) {
  ParamReader reader(params);
  HamiltonianSpec spec;
  spec.preset = name;
  spec.m1 = reader.get("m1", 1.0);
  spec.m2 = reader.get("m2", 1.0);
  if (!(spec.m1 > 0.0) || !(spec.m2 > 0.0)) {
    throw ConfigError("preset '" + name + "': masses must be positive");
  }

  const auto harmonic = [](const Grid& g, double m, double omega) {
    return (0.5 * m * omega * omega) * g.points.cwiseAbs2();
  };
  const auto bilinear = [&](double lambda) {
    return Eigen::MatrixXd(lambda * grid1.points * grid2.points.transpose());
  };

  if (name == "coupled_harmonic") {
    const double omega1 = reader.get("omega1", 1.0);
    const double omega2 = reader.get("omega2", 1.0);
    const double lambda = reader.get("lambda", 0.1);
    spec.v1 = harmonic(grid1, spec.m1, omega1);
    spec.v2 = harmonic(grid2, spec.m2, omega2);
    spec.v12 = bilinear(lambda);
  } else if (name == "free_plus_harmonic_env") {
    const double omega2 = reader.get("omega2", 1.0);
    const double lambda = reader.get("lambda", 0.1);
    spec.v1 = Eigen::VectorXd::Zero(grid1.n);
    spec.v2 = harmonic(grid2, spec.m2, omega2);
    spec.v12 = bilinear(lambda);
  } else if (name == "double_well_system") {
    const double barrier = reader.get("barrier", 2.0);
    const double width = reader.get("width", 1.0);
    const double omega2 = reader.get("omega2", 1.0);
    const double lambda = reader.get("lambda", 0.1);
    if (!(barrier >= 0.0) || !(width > 0.0)) {
      throw ConfigError("double_well_system: barrier must be >= 0 and width > 0");
    }
    spec.v1.resize(grid1.n);
    for (Eigen::Index k = 0; k < grid1.n; ++k) {
      const double r = grid1.points(k) / width;
      spec.v1(k) = barrier * (r * r - 1.0) * (r * r - 1.0);
    }
    spec.v2 = harmonic(grid2, spec.m2, omega2);
    spec.v12 = bilinear(lambda);
  } else {
    std::string known;
    for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  reader.finish(name);
  return spec;
}

std::vector<std::string> preset_names() {
  return {"coupled_harmonic", "free_plus_harmonic_env", "double_well_system"};
}

CompositeState apply_potential_phase(const CompositeState& phi, const Eigen::VectorXd& v,
                                     int axis, double dt) {
  if (axis != 1 && axis != 2) throw DomainError("apply_potential_phase: axis must be 1 or 2");
  const Grid& grid = (axis == 1) ? phi.grid1 : phi.grid2;
  if (v.size() != grid.n) {
    throw ShapeError("apply_potential_phase: potential length does not match the axis grid");
  }
  Eigen::VectorXcd phase(grid.n);
  for (Eigen::Index k = 0; k < grid.n; ++k) phase(k) = std::polar(1.0, -dt * v(k));
  CompositeState out = phi;
  if (axis == 1) {
    out.amplitudes.array().colwise() *= phase.array();
  } else {
    out.amplitudes.array().rowwise() *= phase.transpose().array();
  }
  return out;
}

CompositeState apply_potential_phase(const CompositeState& phi, const Eigen::MatrixXd& v12,
                                     double dt) {
  if (v12.rows() != phi.grid1.n || v12.cols() != phi.grid2.n) {
    throw ShapeError("apply_potential_phase: coupling shape does not match grids");
  }
  CompositeState out = phi;
  for (Eigen::Index l = 0; l < phi.grid2.n; ++l) {
    for (Eigen::Index k = 0; k < phi.grid1.n; ++k) {
      out.amplitudes(k, l) *= std::polar(1.0, -dt * v12(k, l));
    }
  }
  return out;
}

CompositeState apply_kinetic_phase(const CompositeState& phi, int axis, double mass, double dt) {
  if (axis != 1 && axis != 2) throw DomainError("apply_kinetic_phase: axis must be 1 or 2");
  if (!(mass > 0.0)) throw DomainError("apply_kinetic_phase: mass must be positive");
  const Grid& grid = (axis == 1) ? phi.grid1 : phi.grid2;
  Eigen::VectorXcd multiplier(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    const double p = grid.momenta(j);
    multiplier(j) = std::polar(1.0, -dt * p * p / (2.0 * mass));
  }
  // The absolute-coordinate phases of to_momentum cancel against from_momentum
  // around a diagonal multiplier, so plain DFTs suffice.
  auto& fft = fft_engine();
  CompositeState out = phi;
  Eigen::VectorXcd freq(grid.n), back(grid.n);
  if (axis == 1) {
    for (Eigen::Index l = 0; l < phi.grid2.n; ++l) {
      Eigen::VectorXcd column = out.amplitudes.col(l);
      fft.fwd(freq, column);
      freq.array() *= multiplier.array();
      fft.inv(back, freq);
      out.amplitudes.col(l) = back;
    }
  } else {
    for (Eigen::Index k = 0; k < phi.grid1.n; ++k) {
      Eigen::VectorXcd row = out.amplitudes.row(k).transpose();
      fft.fwd(freq, row);
      freq.array() *= multiplier.array();
      fft.inv(back, freq);
      out.amplitudes.row(k) = back.transpose();
    }
  }
  return out;
}

Eigen::MatrixXcd dft_matrix(const Grid& grid) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.n));
  const double q0 = grid.origin();
  Eigen::MatrixXcd u(grid.n, grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    const double row_phase = -grid.momenta(j) * q0;
    for (Eigen::Index k = 0; k < grid.n; ++k) {
      const double angle =
          row_phase - 2.0 * std::numbers::pi * static_cast<double>(j * k) / grid.n;
      u(j, k) = std::polar(scale, angle);
    }
  }
  return u;
}

namespace {

Eigen::MatrixXcd conjugated_multiplier(const Grid& grid, const Eigen::VectorXd& diag) {
  const Eigen::MatrixXcd u = dft_matrix(grid);
  Eigen::MatrixXcd m = u.adjoint() * diag.asDiagonal() * u;
  // Symmetrize away the fp asymmetry so downstream Hermiticity checks are clean.
  return 0.5 * (m + Eigen::MatrixXcd(m.adjoint()));
}

}  // namespace

Eigen::MatrixXcd dense_kinetic(const Grid& grid, double mass) {
  if (!(mass > 0.0)) throw DomainError("dense_kinetic: mass must be positive");
  return conjugated_multiplier(grid, grid.momenta.cwiseAbs2() / (2.0 * mass));
}

Eigen::MatrixXcd dense_momentum(const Grid& grid) {
  return conjugated_multiplier(grid, grid.momenta);
}

Eigen::MatrixXcd subsystem_hamiltonian(const Grid& grid, double mass, const Eigen::VectorXd& v) {
  if (v.size() != grid.n) throw ShapeError("subsystem_hamiltonian: potential length mismatch");
  Eigen::MatrixXcd h = dense_kinetic(grid, mass);
  h.diagonal() += v.cast<Complex>();
  return h;
}

Eigen::MatrixXcd build_dense_hamiltonian(const HamiltonianSpec& spec, const Grid& grid1,
                                         const Grid& grid2, Eigen::Index size_cap) {
  check_spec_shapes(spec, grid1, grid2, "build_dense_hamiltonian");
  const Eigen::Index n1 = grid1.n;
  const Eigen::Index n2 = grid2.n;
  const Eigen::Index total = n1 * n2;
  if (total > size_cap) {
    throw ResourceError("build_dense_hamiltonian: composite dimension " + std::to_string(total) +
                        " exceeds cap " + std::to_string(size_cap));
  }
  const Eigen::MatrixXcd h1 = subsystem_hamiltonian(grid1, spec.m1, spec.v1);
  const Eigen::MatrixXcd h2 = subsystem_hamiltonian(grid2, spec.m2, spec.v2);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(total, total);
  for (Eigen::Index l = 0; l < n2; ++l) {
    h.block(l * n1, l * n1, n1, n1) = h1;
  }
  for (Eigen::Index l = 0; l < n2; ++l) {
    for (Eigen::Index lp = 0; lp < n2; ++lp) {
      const Complex value = h2(l, lp);
      if (value == Complex(0.0, 0.0)) continue;
      h.block(l * n1, lp * n1, n1, n1).diagonal().array() += value;
    }
  }
  if (spec.v12.size() != 0) {
    for (Eigen::Index l = 0; l < n2; ++l) {
      for (Eigen::Index k = 0; k < n1; ++k) {
        h(k + l * n1, k + l * n1) += spec.v12(k, l);
      }
    }
  }
  return h;
}

}  // namespace oqsim
