#pragma once

#include <map>
#include <string>
#include <vector>

#include "oqsim/states.hpp"

namespace oqsim {

// Additive two-body Hamiltonian data:
//   H = p1^2/(2 m1) + V1(q1) + p2^2/(2 m2) + V2(q2) + V12(q1, q2),
// with every potential tabulated on its grid. An empty or all-zero V12 means
// the subsystems are uncoupled.
struct HamiltonianSpec {
  double m1 = 1.0;
  double m2 = 1.0;
  Eigen::VectorXd v1;   // over grid1
  Eigen::VectorXd v2;   // over grid2
  Eigen::MatrixXd v12;  // (n1 x n2), may be empty
  std::string preset = "custom";
};

bool has_coupling(const HamiltonianSpec& spec);

// Named presets; unknown preset or parameter keys raise ConfigError.
//   coupled_harmonic:       m1, m2, omega1, omega2, lambda   (V12 = lambda q1 q2)
//   free_plus_harmonic_env: m1, m2, omega2, lambda           (V1 = 0)
//   double_well_system:     m1, m2, barrier, width, omega2, lambda
//                           (V1 = barrier ((q/width)^2 - 1)^2)
HamiltonianSpec make_preset(const std::string& name, const Grid& grid1, const Grid& grid2,
                            const std::map<std::string, double>& params = {});
std::vector<std::string> preset_names();

// Pointwise phase e^{-i dt V} on one axis (axis 1 = system, 2 = environment)
// or on the full product grid. Exactly norm-preserving.
CompositeState apply_potential_phase(const CompositeState& phi, const Eigen::VectorXd& v,
                                     int axis, double dt);
CompositeState apply_potential_phase(const CompositeState& phi, const Eigen::MatrixXd& v12,
                                     double dt);

// Exact kinetic factor: Fourier multiplier e^{-i dt p^2/(2 mass)} along one axis.
CompositeState apply_kinetic_phase(const CompositeState& phi, int axis, double mass, double dt);

// The unitary DFT as an explicit matrix; row j, column k matches to_momentum.
Eigen::MatrixXcd dft_matrix(const Grid& grid);
// Dense position-representation operators conjugated through that DFT, so the
// dense oracle and the FFT fast paths share identical discrete operators.
Eigen::MatrixXcd dense_kinetic(const Grid& grid, double mass);
Eigen::MatrixXcd dense_momentum(const Grid& grid);

// Single-axis Hamiltonian H_j = T_j + diag(V_j) (Hermitian dense matrix).
Eigen::MatrixXcd subsystem_hamiltonian(const Grid& grid, double mass, const Eigen::VectorXd& v);

inline constexpr Eigen::Index kOracleSizeCap = 4096;

// Full composite Hamiltonian as a dense Hermitian matrix on the flattened
// product grid (flat index k + l*n1). Throws ResourceError above the cap.
Eigen::MatrixXcd build_dense_hamiltonian(const HamiltonianSpec& spec, const Grid& grid1,
                                         const Grid& grid2,
                                         Eigen::Index size_cap = kOracleSizeCap);

}  // namespace oqsim
