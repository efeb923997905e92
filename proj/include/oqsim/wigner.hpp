#pragma once

#include <cstddef>
#include <vector>

#include "oqsim/states.hpp"

namespace oqsim {

// Real phase-space table over (q, p); the momentum axis is sorted ascending.
struct WignerTable {
  Grid qgrid;
  Eigen::VectorXd momenta;   // ascending physical momenta
  Eigen::MatrixXd values;    // (n_q x n_p)

  double mass() const;       // sum * dq * dp
};

// 4-D table over (q1, p1, q2, p2), stored flat in row-major index order
// ((k1 * np1 + j1) * n2 + k2) * np2 + j2, both momentum axes ascending.
struct WignerTable4 {
  Grid grid1;
  Grid grid2;
  Eigen::VectorXd momenta1;
  Eigen::VectorXd momenta2;
  std::vector<double> values;

  double at(Eigen::Index k1, Eigen::Index j1, Eigen::Index k2, Eigen::Index j2) const;
  double mass() const;
};

// chi(u, v) = tr(rho e^{-i(u q + v p)}) sampled on a centered lattice:
// u on multiples of the momentum step, v on multiples of the position step.
struct WeylCharacteristic {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  Eigen::MatrixXcd values;   // (u_count x v_count)
};

// Computed factor-by-factor: e^{-i(u q + v p)} = e^{+i u v / 2} e^{-i u q}
// e^{-i v p}, the translation applied as an exact Fourier multiplier.
// Counts of 0 default to the grid size.
WeylCharacteristic weyl_characteristic(const DensityOperator& rho, Eigen::Index u_count = 0,
                                       Eigen::Index v_count = 0);

// W(q, p) = (1/2pi) sum_s rho(q + s/2, q - s/2) e^{-i p s} dq over the
// half-step displacement lattice s = m dq, |m| <= n/2, with the half-step
// kernel values supplied by band-limited (momentum zero-padded) 2x
// interpolation. With this displacement window the quadrature mass and the
// position marginal are exact lattice identities.
WignerTable wigner_from_density(const DensityOperator& rho);

inline constexpr std::size_t kJointWignerEntryCap = std::size_t(1) << 20;

// Joint table over both subsystems; entry count n1^2 n2^2 is capped.
WignerTable4 joint_wigner(const CompositeState& phi,
                          std::size_t entry_cap = kJointWignerEntryCap);

// Integrate out (q2, p2) with dq2 dp2 weights; lands on the subsystem-1 table.
WignerTable marginalize_wigner(const WignerTable4& table);

struct WignerMarginals {
  Eigen::VectorXd position;  // sum over p * dp
  Eigen::VectorXd momentum;  // sum over q * dq, per ascending momentum bin
};

WignerMarginals wigner_marginals(const WignerTable& table);

// Momentum-side probability density of a density operator, ascending bins,
// normalized so that sum * dp = 1. Reference values for the momentum
// marginal of a phase-space table.
Eigen::VectorXd momentum_density(const DensityOperator& rho);

// Inverse symplectic Fourier pairing: reconstructs the phase-space table
// from the characteristic function on the matched lattice.
WignerTable characteristic_to_wigner(const WeylCharacteristic& chi, const Grid& grid);

// 2x band-limited upsampling by frequency zero-padding (symmetric Nyquist
// split); exact on band-limited data, separable, linear.
Eigen::MatrixXcd spectral_upsample2x(const Eigen::MatrixXcd& values);

// 2 pi sum_{q,p} Wa Wb dq dp; equals tr(rho_a rho_b) dq^2 for matched tables.
double wigner_overlap(const WignerTable& a, const WignerTable& b);

}  // namespace oqsim
