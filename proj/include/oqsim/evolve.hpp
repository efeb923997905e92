#pragma once

#include <functional>
#include <vector>

#include "oqsim/hamiltonian.hpp"

namespace oqsim {

enum class SplitScheme { kLie, kStrang };

// One product-formula step. Each of the three factors is applied as the exact
// exponential of its own part: dense e^{-i dt H_j} for the two subsystem
// Hamiltonians (eigendecomposition, cached here) and the pointwise phase
// e^{-i dt V12} for the coupling. The splitting error therefore comes from
// the non-commutativity alone; with V12 = 0 a step is exact.
//
// For dt < 0 the factors are applied in reversed order, which makes the
// negative step the exact adjoint of the positive one (time reversal holds
// to fp). The Strang variant uses half steps of H1, H2 around the coupling.
class TrotterPlan {
 public:
  TrotterPlan(const HamiltonianSpec& spec, const Grid& grid1, const Grid& grid2, double dt,
              SplitScheme scheme = SplitScheme::kLie);

  void apply(Eigen::MatrixXcd& amplitudes) const;
  double dt() const { return dt_; }
  SplitScheme scheme() const { return scheme_; }

 private:
  double dt_ = 0.0;
  SplitScheme scheme_ = SplitScheme::kLie;
  bool reversed_ = false;
  bool coupled_ = false;
  Eigen::MatrixXcd u1_;        // e^{-i dt H1} (half step for Strang)
  Eigen::MatrixXcd u2_;        // e^{-i dt H2} (half step for Strang)
  Eigen::MatrixXcd coupling_;  // elementwise e^{-i dt V12}
};

// Order: system factor, then environment factor, then coupling phase.
CompositeState trotter_step(const CompositeState& phi, const HamiltonianSpec& spec, double dt,
                            SplitScheme scheme = SplitScheme::kLie);

inline constexpr Eigen::Index kSnapshotSizeCap = Eigen::Index(1) << 20;

struct Snapshot {
  Eigen::Index step = 0;
  double time = 0.0;
  CompositeState state;
};

struct EvolveOptions {
  SplitScheme scheme = SplitScheme::kLie;
  // 0: no snapshots. k > 0: keep the state at steps 0, k, 2k, ... and the
  // final step. Stored snapshots require n1*n2 <= kSnapshotSizeCap; for
  // larger problems attach an observer and store derived quantities instead.
  Eigen::Index snapshot_stride = 0;
  bool keep_states = true;
  double norm_drift_tolerance = kNormDriftTolerance;
  std::function<void(Eigen::Index step, double time, const CompositeState&)> observer;
};

struct EvolveResult {
  CompositeState state;
  std::vector<Snapshot> snapshots;
  double max_step_drift = 0.0;
};

// steps uniform product-formula steps of size t/steps, with a per-step norm
// check: drift beyond the tolerance raises NumericalError naming the step;
// smaller drift is renormalized away.
EvolveResult evolve(const CompositeState& phi0, const HamiltonianSpec& spec, double t,
                    Eigen::Index steps, const EvolveOptions& options = {});

struct ConvergenceRow {
  Eigen::Index steps = 0;
  double dt = 0.0;
  double l2_error = 0.0;       // quadrature norm of (split - exact) at time t
  double observed_order = 0.0; // pairwise log ratio; NaN on the first row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double fitted_order = 0.0;   // least-squares slope of log error vs log steps
};

// Compares against the dense eigendecomposition oracle (size-capped).
ConvergenceTable convergence_study(const CompositeState& phi0, const HamiltonianSpec& spec,
                                   double t, const std::vector<Eigen::Index>& steps_list,
                                   SplitScheme scheme = SplitScheme::kLie);

}  // namespace oqsim
