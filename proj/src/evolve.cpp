#include "oqsim/evolve.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "oqsim/oracle.hpp"

namespace oqsim {

namespace {

using Complex = std::complex<double>;

// V e^{-i dt lambda} V^dagger of a Hermitian matrix.
Eigen::MatrixXcd factor_exponential(const Eigen::MatrixXcd& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("trotter plan: subsystem eigendecomposition failed");
  }
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    phases(i) = std::polar(1.0, -dt * es.eigenvalues()(i));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TrotterPlan::TrotterPlan(const HamiltonianSpec& spec, const Grid& grid1, const Grid& grid2,
                         double dt, SplitScheme scheme)
    : dt_(dt), scheme_(scheme), reversed_(dt < 0.0), coupled_(has_coupling(spec)) {
  if (!std::isfinite(dt)) throw DomainError("trotter plan: dt must be finite");
  if (spec.v1.size() != grid1.n || spec.v2.size() != grid2.n) {
    throw ShapeError("trotter plan: potential lengths do not match grids");
  }
  if (coupled_ && (spec.v12.rows() != grid1.n || spec.v12.cols() != grid2.n)) {
    throw ShapeError("trotter plan: coupling shape does not match grids");
  }
  const double factor_dt = (scheme == SplitScheme::kStrang) ? 0.5 * dt : dt;
  u1_ = factor_exponential(subsystem_hamiltonian(grid1, spec.m1, spec.v1), factor_dt);
  u2_ = factor_exponential(subsystem_hamiltonian(grid2, spec.m2, spec.v2), factor_dt);
  if (coupled_) {
    coupling_.resize(grid1.n, grid2.n);
    for (Eigen::Index l = 0; l < grid2.n; ++l) {
      for (Eigen::Index k = 0; k < grid1.n; ++k) {
        coupling_(k, l) = std::polar(1.0, -dt * spec.v12(k, l));
      }
    }
  }
}

void TrotterPlan::apply(Eigen::MatrixXcd& amplitudes) const {
  const auto apply_u1 = [&] { amplitudes = u1_ * amplitudes; };
  const auto apply_u2 = [&] { amplitudes = amplitudes * u2_.transpose(); };
  const auto apply_coupling = [&] {
    if (coupled_) amplitudes.array() *= coupling_.array();
  };
  if (scheme_ == SplitScheme::kStrang) {
    apply_u1();
    apply_u2();
    apply_coupling();
    apply_u2();
    apply_u1();
    return;
  }
  if (!reversed_) {
    apply_u1();
    apply_u2();
    apply_coupling();
  } else {
    apply_coupling();
    apply_u2();
    apply_u1();
  }
}

CompositeState trotter_step(const CompositeState& phi, const HamiltonianSpec& spec, double dt,
                            SplitScheme scheme) {
  const TrotterPlan plan(spec, phi.grid1, phi.grid2, dt, scheme);
  CompositeState out = phi;
  plan.apply(out.amplitudes);
  return out;
}

EvolveResult evolve(const CompositeState& phi0, const HamiltonianSpec& spec, double t,
                    Eigen::Index steps, const EvolveOptions& options) {
  if (steps < 1) throw DomainError("evolve: steps must be >= 1");
  if (!std::isfinite(t)) throw DomainError("evolve: time must be finite");
  const bool keep = options.snapshot_stride > 0 && options.keep_states;
  if (keep && phi0.grid1.n * phi0.grid2.n > kSnapshotSizeCap) {
    throw ResourceError("evolve: snapshot storage above the size cap; use an observer");
  }
  const double dt = t / static_cast<double>(steps);
  const TrotterPlan plan(spec, phi0.grid1, phi0.grid2, dt, options.scheme);
  const double root_cell = std::sqrt(phi0.cell());

  EvolveResult result;
  result.state = phi0;
  const auto record = [&](Eigen::Index step, double time) {
    if (options.observer) options.observer(step, time, result.state);
    if (keep) result.snapshots.push_back(Snapshot{step, time, result.state});
  };
  if (options.snapshot_stride > 0) record(0, 0.0);

  for (Eigen::Index step = 1; step <= steps; ++step) {
    plan.apply(result.state.amplitudes);
    const double norm = result.state.amplitudes.norm() * root_cell;
    const double drift = std::abs(norm - 1.0);
    result.max_step_drift = std::max(result.max_step_drift, drift);
    if (drift > options.norm_drift_tolerance) {
      throw NumericalError("evolve: norm drift " + std::to_string(drift) + " at step " +
                           std::to_string(step));
    }
    result.state.amplitudes /= norm;
    if (options.snapshot_stride > 0 &&
        (step % options.snapshot_stride == 0 || step == steps)) {
      record(step, dt * static_cast<double>(step));
    }
  }
  return result;
}

ConvergenceTable convergence_study(const CompositeState& phi0, const HamiltonianSpec& spec,
                                   double t, const std::vector<Eigen::Index>& steps_list,
                                   SplitScheme scheme) {
  if (steps_list.empty()) throw DomainError("convergence_study: empty steps list");
  const ExactPropagator oracle(spec, phi0.grid1, phi0.grid2);
  const CompositeState reference = oracle.propagate(phi0, t);

  ConvergenceTable table;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < steps_list.size(); ++i) {
    const Eigen::Index steps = steps_list[i];
    EvolveOptions options;
    options.scheme = scheme;
    const CompositeState split = evolve(phi0, spec, t, steps, options).state;
    ConvergenceRow row;
    row.steps = steps;
    row.dt = t / static_cast<double>(steps);
    row.l2_error =
        (split.amplitudes - reference.amplitudes).norm() * std::sqrt(phi0.cell());
    row.observed_order = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      const ConvergenceRow& prev = table.rows[i - 1];
      if (row.l2_error > 0.0 && prev.l2_error > 0.0) {
        row.observed_order = std::log(prev.l2_error / row.l2_error) /
                             std::log(static_cast<double>(steps) / prev.steps);
      }
    }
    const double x = std::log(static_cast<double>(steps));
    const double y = std::log(std::max(row.l2_error, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    table.rows.push_back(row);
  }
  const double count = static_cast<double>(steps_list.size());
  const double denom = count * sxx - sx * sx;
  table.fitted_order = (denom != 0.0) ? -(count * sxy - sx * sy) / denom
                                      : std::numeric_limits<double>::quiet_NaN();
  return table;
}

}  // namespace oqsim
