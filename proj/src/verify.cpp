#include "oqsim/verify.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <utility>
#include <vector>

#include "oqsim/evolve.hpp"
#include "oqsim/hilbert_measure.hpp"
#include "oqsim/oracle.hpp"
#include "oqsim/unravel.hpp"
#include "oqsim/wigner.hpp"

namespace oqsim {

namespace {

using Complex = std::complex<double>;

// Reference scenario: two oscillators with a bilinear position coupling,
// the system packet displaced from the well minimum, the environment in its
// ground state. Everything below is pinned so reruns are reproducible.
constexpr Eigen::Index kPoints = 32;
constexpr double kLength = 20.0;
constexpr double kCoupling = 0.1;
constexpr double kFinalTime = 1.0;
constexpr Eigen::Index kSteps = 256;
constexpr std::uint64_t kSeed = 42;

struct Context {
  Grid grid1;
  Grid grid2;
  HamiltonianSpec spec;
  CompositeState initial;
  EvolveResult evolved;          // snapshots every kSteps/4 steps
  DensityOperator reduced_final;
};

Context make_context() {
  Context c;
  c.grid1 = make_grid(kPoints, kLength);
  c.grid2 = make_grid(kPoints, kLength);
  c.spec = make_preset("coupled_harmonic", c.grid1, c.grid2,
                       {{"m1", 1.0},
                        {"m2", 1.0},
                        {"omega1", 1.0},
                        {"omega2", 1.0},
                        {"lambda", kCoupling}});
  const double sigma = 1.0 / std::sqrt(2.0);  // ground-state width for m = omega = 1
  const Eigen::VectorXcd psi1 = gaussian_packet(c.grid1, 1.0, sigma, 0.0);
  const Eigen::VectorXcd psi2 = harmonic_ground_state(c.grid2, 1.0, 1.0);
  c.initial = product_state(c.grid1, psi1, c.grid2, psi2);

  EvolveOptions options;
  options.snapshot_stride = kSteps / 4;
  options.keep_states = true;
  c.evolved = evolve(c.initial, c.spec, kFinalTime, kSteps, options);
  c.reduced_final = reduced_density(c.evolved.state);
  return c;
}

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", value);
  return buf;
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

CompositeState random_composite(const Grid& g1, const Grid& g2, StreamRng& rng) {
  Eigen::MatrixXcd a(g1.n, g2.n);
  for (Eigen::Index l = 0; l < g2.n; ++l) {
    for (Eigen::Index k = 0; k < g1.n; ++k) {
      a(k, l) = rng.complex_normal();
    }
  }
  a /= a.norm() * std::sqrt(g1.step * g2.step);
  return make_composite(g1, g2, std::move(a));
}

// Superposition of a few wavepackets with band- and box-safe parameters:
// the states the displacement identities hold for on a finite grid.
Eigen::VectorXcd smooth_random_packet(const Grid& g, StreamRng& rng) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(g.n);
  for (int i = 0; i < 3; ++i) {
    const double center = (2.0 * rng.uniform() - 1.0) * 1.5;
    const double sigma = 0.9 + 0.3 * rng.uniform();
    const double momentum = (2.0 * rng.uniform() - 1.0) * 1.0;
    const Complex weight(rng.normal(), rng.normal());
    psi += weight * gaussian_packet(g, center, sigma, momentum);
  }
  psi /= quadrature_norm(psi, g);
  return psi;
}

Eigen::MatrixXcd hermitian_exponential(const Eigen::MatrixXcd& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    phases(i) = std::polar(1.0, -dt * es.eigenvalues()(i));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// --- criterion 1: the product formula converges at first order ------------

void criterion_trotter_convergence(const Context& ctx, CriterionResult& r) {
  const std::vector<Eigen::Index> steps = {64, 128, 256, 512};
  const ConvergenceTable table =
      convergence_study(ctx.initial, ctx.spec, kFinalTime, steps, SplitScheme::kLie);

  bool monotone = true;
  std::string errors;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (i > 0 && table.rows[i].l2_error > 1.05 * table.rows[i - 1].l2_error) monotone = false;
    errors += (i ? " -> " : "") + fmt(table.rows[i].l2_error);
  }
  const bool order_ok = table.fitted_order >= 0.8 && table.fitted_order <= 1.2;
  r.passed = monotone && order_ok;
  r.detail = "fitted order " + fmt(table.fitted_order) + " (want 0.8..1.2), errors " + errors +
             (monotone ? "" : " [not monotone]");
}

// --- criterion 2: pure-state unraveling reconstructs the reduced density ---

void criterion_unraveling(const Context& ctx, CriterionResult& r) {
  const CompositeState& phi = ctx.evolved.state;
  const DensityOperator& exact = ctx.reduced_final;
  const double dq = phi.grid1.step;

  const double d_enum = hs_distance(enumerate_unraveling(phi).kernel, exact.kernel, dq);
  const CompositeState rotated = momentum_environment_view(phi);
  const double d_rot = hs_distance(reduced_density(rotated).kernel, exact.kernel, dq);
  const double d_rot_enum =
      hs_distance(enumerate_unraveling(rotated).kernel, exact.kernel, dq);

  // Replica-averaged Monte Carlo error per sample count: the error of one
  // draw is heavy-tailed (rare tail-site hits), so the rate is fitted on the
  // mean over independent streams across a wide range of counts.
  const RngFactory rng{kSeed};
  const std::vector<Eigen::Index> counts = {100, 300, 1000, 3000, 10000, 30000};
  constexpr int kReplicas = 16;
  std::vector<double> log_n, log_err;
  std::string errors;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double mean_err = 0.0;
    for (int rep = 0; rep < kReplicas; ++rep) {
      const std::uint64_t base =
          static_cast<std::uint64_t>(i * kReplicas + rep + 1) << 40;
      const McDensity mc = mc_density_estimate(phi, rng, counts[i], base);
      mean_err += hs_distance(mc.estimate.kernel, exact.kernel, dq);
    }
    mean_err /= kReplicas;
    log_n.push_back(std::log(static_cast<double>(counts[i])));
    log_err.push_back(std::log(mean_err));
    errors += (i ? " -> " : "") + fmt(mean_err);
  }
  const double slope = fit_slope(log_n, log_err);

  const bool exact_ok = d_enum <= 1e-12 && d_rot <= 1e-12 && d_rot_enum <= 1e-12;
  const bool mc_ok = slope >= -0.65 && slope <= -0.35 && log_err.back() < log_err.front();
  r.passed = exact_ok && mc_ok;
  r.detail = "enumeration gap " + fmt(d_enum) + ", momentum-basis gaps " + fmt(d_rot) + "/" +
             fmt(d_rot_enum) + " (want <=1e-12); mc errors " + errors + ", slope " + fmt(slope) +
             " (want -0.65..-0.35)";
}

// --- criterion 3: joint Wigner marginalization matches the reduced path ----

void criterion_wigner(const Context& ctx, CriterionResult& r) {
  const double sigma = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd amp =
      gaussian_packet(ctx.grid1, 1.0, sigma, 0.5) *
          gaussian_packet(ctx.grid2, -1.0, sigma, 0.0).transpose() +
      gaussian_packet(ctx.grid1, -1.0, sigma, -0.5) *
          gaussian_packet(ctx.grid2, 1.0, sigma, 0.3).transpose();
  amp /= amp.norm() * std::sqrt(ctx.initial.cell());

  std::vector<std::pair<std::string, CompositeState>> states;
  states.emplace_back("product", ctx.initial);
  states.emplace_back("entangled", make_composite(ctx.grid1, ctx.grid2, std::move(amp)));
  states.emplace_back("evolved", ctx.evolved.state);

  double worst_two_path = 0.0, worst_mass = 0.0, worst_pos = 0.0, worst_mom = 0.0;
  for (const auto& [name, state] : states) {
    const WignerTable4 joint = joint_wigner(state);
    const WignerTable via_joint = marginalize_wigner(joint);
    const DensityOperator reduced = reduced_density(state);
    const WignerTable direct = wigner_from_density(reduced);

    worst_two_path = std::max(worst_two_path,
                              (via_joint.values - direct.values).cwiseAbs().maxCoeff());
    worst_mass = std::max(worst_mass, std::abs(direct.mass() - 1.0));
    const WignerMarginals marginals = wigner_marginals(direct);
    worst_pos = std::max(
        worst_pos,
        (marginals.position - marginal_density_1(state).weights).cwiseAbs().maxCoeff());
    worst_mom = std::max(worst_mom,
                         (marginals.momentum - momentum_density(reduced)).cwiseAbs().maxCoeff());
  }

  r.passed = worst_two_path <= 1e-7 && worst_mass <= 1e-8 && worst_pos <= 1e-8 &&
             worst_mom <= 2e-8;
  r.detail = "two-path max " + fmt(worst_two_path) + " (want <=1e-7); mass defect " +
             fmt(worst_mass) + ", position marginal " + fmt(worst_pos) +
             " (want <=1e-8), momentum marginal " + fmt(worst_mom) + " (want <=2e-8)";
}

// --- criterion 4: the kernel partial trace equals the matrix partial trace --

void criterion_partial_trace(const Context&, CriterionResult& r) {
  const Grid g1 = make_grid(16, 12.0);
  const Grid g2 = make_grid(16, 12.0);
  StreamRng rng(7, 0);

  double worst_sys = 0.0, worst_env = 0.0, worst_gap = 0.0;
  double worst_herm = 0.0, worst_trace = 0.0, worst_eig = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const CompositeState state = random_composite(g1, g2, rng);
    const DensityOperator rho1 = reduced_density(state);
    const DensityOperator rho2 = reduced_density_environment(state);

    const Eigen::Map<const Eigen::VectorXcd> vec(state.amplitudes.data(), g1.n * g2.n);
    const Eigen::MatrixXcd projector = vec * vec.adjoint();
    Eigen::MatrixXcd m1 = Eigen::MatrixXcd::Zero(g1.n, g1.n);
    Eigen::MatrixXcd m2 = Eigen::MatrixXcd::Zero(g2.n, g2.n);
    for (Eigen::Index k = 0; k < g1.n; ++k) {
      for (Eigen::Index kp = 0; kp < g1.n; ++kp) {
        for (Eigen::Index l = 0; l < g2.n; ++l) {
          m1(k, kp) += projector(k + l * g1.n, kp + l * g1.n);
        }
      }
    }
    for (Eigen::Index l = 0; l < g2.n; ++l) {
      for (Eigen::Index lp = 0; lp < g2.n; ++lp) {
        for (Eigen::Index k = 0; k < g1.n; ++k) {
          m2(l, lp) += projector(k + l * g1.n, k + lp * g1.n);
        }
      }
    }
    m1 *= g2.step;
    m2 *= g1.step;

    worst_sys = std::max(worst_sys, (rho1.kernel - m1).cwiseAbs().maxCoeff());
    worst_env = std::max(worst_env, (rho2.kernel - m2).cwiseAbs().maxCoeff());
    worst_gap = std::max(worst_gap, std::abs(purity(rho1) - purity(rho2)));
    const DensityDiagnostics d = density_diagnostics(g1, rho1.kernel);
    worst_herm = std::max(worst_herm, d.hermiticity_defect);
    worst_trace = std::max(worst_trace, d.trace_defect);
    worst_eig = std::min(worst_eig, d.min_eigenvalue);
  }

  r.passed = worst_sys <= 1e-12 && worst_env <= 1e-12 && worst_gap <= 1e-9 &&
             worst_herm <= kHermiticityTolerance && worst_trace <= kTraceTolerance &&
             worst_eig >= kPsdFloor;
  r.detail = "100 random states: matrix-route gaps " + fmt(worst_sys) + "/" + fmt(worst_env) +
             " (want <=1e-12), purity gap " + fmt(worst_gap) +
             " (want <=1e-9), invariants herm " + fmt(worst_herm) + " trace " +
             fmt(worst_trace) + " mineig " + fmt(worst_eig);
}

// --- criterion 5: Gaussian state measures reproduce the reduced kernel -----

void criterion_gaussian_measure(const Context& ctx, CriterionResult& r) {
  const Eigen::Index samples = 10000;
  std::vector<std::pair<double, DensityOperator>> trajectory;
  for (const Snapshot& snap : ctx.evolved.snapshots) {
    trajectory.emplace_back(snap.time, reduced_density(snap.state));
  }
  const std::vector<CovarianceResidual> residuals =
      track_evolution(trajectory, RngFactory{kSeed}, samples);

  const double bound = 5.0 / std::sqrt(static_cast<double>(samples));
  double worst = 0.0;
  std::string listed;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    worst = std::max(worst, residuals[i].frobenius_residual);
    listed += (i ? " " : "") + fmt(residuals[i].frobenius_residual);
  }

  // Cross-check the two stochastic representations of the same kernel at the
  // final time: a Gaussian measure draw and a conditional-state unraveling.
  const DensityOperator& exact = ctx.reduced_final;
  const double dq = exact.grid.step;
  const GaussianStateMeasure measure = from_density(exact);
  const Eigen::MatrixXcd emp = empirical_covariance(
      sample_states(measure, RngFactory{kSeed}, samples, std::uint64_t{99} << 32), exact.grid);
  const McDensity mc =
      mc_density_estimate(ctx.evolved.state, RngFactory{kSeed}, samples, std::uint64_t{77} << 32);
  const double d_gauss = hs_distance(emp, exact.kernel, dq);
  const double d_mc = hs_distance(mc.estimate.kernel, exact.kernel, dq);
  const double d_cross = hs_distance(emp, mc.estimate.kernel, dq);

  r.passed = worst <= bound && d_gauss <= bound && d_mc <= bound && d_cross <= 2.0 * bound;
  r.detail = "residuals [" + listed + "] (want <=" + fmt(bound) + "); cross-check gauss " +
             fmt(d_gauss) + " mc " + fmt(d_mc) + " mutual " + fmt(d_cross) + " (want <=" +
             fmt(2.0 * bound) + ")";
}

// --- criterion 6: conditional mixtures recompose the marginal --------------

void criterion_chapman_kolmogorov(const Context& ctx, CriterionResult& r) {
  std::vector<double> deviations;
  deviations.push_back(chapman_kolmogorov_check(ctx.initial));
  for (const Snapshot& snap : ctx.evolved.snapshots) {
    if (snap.time == 0.5 || snap.time == kFinalTime) {
      deviations.push_back(chapman_kolmogorov_check(snap.state));
    }
  }
  const Grid g1 = make_grid(16, 12.0);
  const Grid g2 = make_grid(16, 12.0);
  StreamRng rng(13, 0);
  for (int trial = 0; trial < 3; ++trial) {
    deviations.push_back(chapman_kolmogorov_check(random_composite(g1, g2, rng)));
  }

  double worst = 0.0;
  for (const double d : deviations) worst = std::max(worst, d);
  r.passed = deviations.size() >= 6 && worst <= 1e-10;
  r.detail = std::to_string(deviations.size()) + " states, worst deviation " + fmt(worst) +
             " (want <=1e-10)";
}

// --- criterion 7: structural invariants hold across random inputs ----------

void criterion_structure(const Context&, CriterionResult& r) {
  const Grid g1 = make_grid(16, 12.0);
  const Grid g2 = make_grid(16, 12.0);
  const HamiltonianSpec spec = make_preset("coupled_harmonic", g1, g2,
                                           {{"m1", 1.0},
                                            {"m2", 1.0},
                                            {"omega1", 1.0},
                                            {"omega2", 1.0},
                                            {"lambda", 0.1}});
  const Grid fine = make_grid(64, 24.0);  // wide/dense grid for displacement checks

  StreamRng rng(11, 0);
  int failures = 0;
  std::string first;
  const auto fail = [&](const std::string& what) {
    ++failures;
    if (first.empty()) first = what;
  };

  double worst_unitary = 0.0, worst_dense = 0.0, worst_weyl = 0.0, worst_wigner = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const CompositeState state = random_composite(g1, g2, rng);

    // Reduced kernels stay physical and share their purity.
    const DensityOperator rho1 = reduced_density(state);
    const DensityOperator rho2 = reduced_density_environment(state);
    const DensityDiagnostics d = density_diagnostics(g1, rho1.kernel);
    if (d.hermiticity_defect > kHermiticityTolerance || d.trace_defect > kTraceTolerance ||
        d.min_eigenvalue < kPsdFloor) {
      fail("reduced-density invariants");
    }
    if (std::abs(purity(rho1) - purity(rho2)) > 1e-9) fail("purity symmetry");

    // One product-formula step is unitary for either splitting.
    double dt = (2.0 * rng.uniform() - 1.0) * 0.1;
    if (std::abs(dt) < 1e-3) dt = 0.05;
    for (const SplitScheme scheme : {SplitScheme::kLie, SplitScheme::kStrang}) {
      const double drift = std::abs(trotter_step(state, spec, dt, scheme).norm() - 1.0);
      worst_unitary = std::max(worst_unitary, drift);
      if (drift > 1e-12) fail("step unitarity");
    }

    // Environment sampling yields in-range indices and normalized states.
    const MarginalDensity dist = environment_distribution(state);
    StreamRng sampler(11, 1000 + static_cast<std::uint64_t>(trial));
    for (const Eigen::Index idx : sample_environment(dist, sampler, 8)) {
      if (idx < 0 || idx >= g2.n) {
        fail("sample index range");
        continue;
      }
      const ConditionalState cond = conditional_state(state, idx);
      if (cond.weight <= 0.0 ||
          std::abs(quadrature_norm(cond.state, g1) - 1.0) > 1e-10) {
        fail("conditional-state normalization");
      }
    }

    if (trial % 10 != 0) continue;

    // Fast kinetic factor against the dense exponential.
    {
      const double kdt = 0.3;
      const CompositeState fast = apply_kinetic_phase(state, 1, 1.0, kdt);
      const Eigen::MatrixXcd dense =
          hermitian_exponential(dense_kinetic(g1, 1.0), kdt) * state.amplitudes;
      const double diff = (fast.amplitudes - dense).cwiseAbs().maxCoeff();
      worst_dense = std::max(worst_dense, diff);
      if (diff > 1e-10) fail("kinetic factor vs dense");
    }

    // One splitting step against the dense factor product on the flattened
    // state: diag(e^{-i dt V12}) (U2 kron U1) for forward steps; backward
    // steps reverse the factor order (that is what makes reversal exact).
    {
      const Eigen::MatrixXcd u1 =
          hermitian_exponential(subsystem_hamiltonian(g1, spec.m1, spec.v1), dt);
      const Eigen::MatrixXcd u2 =
          hermitian_exponential(subsystem_hamiltonian(g2, spec.m2, spec.v2), dt);
      Eigen::MatrixXcd dense = Eigen::kroneckerProduct(u2, u1).eval();
      const Eigen::Map<const Eigen::VectorXd> v12(spec.v12.data(), g1.n * g2.n);
      for (Eigen::Index row = 0; row < dense.rows(); ++row) {
        if (dt >= 0.0) {
          dense.row(row) *= std::polar(1.0, -dt * v12(row));
        } else {
          dense.col(row) *= std::polar(1.0, -dt * v12(row));
        }
      }
      const Eigen::Map<const Eigen::VectorXcd> vec(state.amplitudes.data(), g1.n * g2.n);
      const Eigen::VectorXcd stepped = dense * vec;
      const Eigen::MatrixXcd fast = trotter_step(state, spec, dt).amplitudes;
      const Eigen::Map<const Eigen::VectorXcd> fast_vec(fast.data(), g1.n * g2.n);
      const double diff = (fast_vec - stepped).cwiseAbs().maxCoeff();
      worst_dense = std::max(worst_dense, diff);
      if (diff > 1e-12) fail("split step vs dense product");
    }

    // Momentum transform against the explicit unitary matrix.
    {
      Eigen::VectorXcd f(g1.n);
      for (Eigen::Index k = 0; k < g1.n; ++k) f(k) = rng.complex_normal();
      const double diff =
          (to_momentum(f, g1) - dft_matrix(g1) * f).cwiseAbs().maxCoeff();
      worst_dense = std::max(worst_dense, diff);
      if (diff > 1e-12) fail("momentum transform vs matrix");
    }

    // Factorized displacement trace against the dense displacement
    // exponential, on a smooth state (the identities are continuum ones).
    {
      const Eigen::VectorXcd psi = smooth_random_packet(fine, rng);
      const DensityOperator rho = make_density(fine, psi * psi.adjoint());
      const WeylCharacteristic chi = weyl_characteristic(rho);
      const Eigen::Index half = fine.n / 2;
      const std::pair<Eigen::Index, Eigen::Index> offsets[] = {
          {0, 0}, {1, 0}, {0, 1}, {2, 3}, {-3, 2}};
      for (const auto& [da, db] : offsets) {
        const Eigen::Index a = half + da, b = half + db;
        const Eigen::MatrixXcd disp = exact_displacement(fine, chi.u(a), chi.v(b));
        const Complex reference = (rho.kernel * disp).trace() * fine.step;
        const double diff = std::abs(chi.values(a, b) - reference);
        worst_weyl = std::max(worst_weyl, diff);
        if (diff > 1e-8) fail("displacement trace vs dense");
      }
    }

    // Phase-space mass and the two construction paths, on the random state.
    {
      const WignerTable direct = wigner_from_density(rho1);
      const WignerTable via_joint = marginalize_wigner(joint_wigner(state));
      const double mass_defect = std::abs(direct.mass() - 1.0);
      const double two_path = (via_joint.values - direct.values).cwiseAbs().maxCoeff();
      const double pos = (wigner_marginals(direct).position - marginal_density_1(state).weights)
                             .cwiseAbs()
                             .maxCoeff();
      worst_wigner = std::max({worst_wigner, mass_defect, two_path, pos});
      if (mass_defect > 1e-8 || two_path > 1e-10 || pos > 1e-8) {
        fail("phase-space identities");
      }
    }
  }

  // Monte Carlo estimates are bit-for-bit reproducible for a fixed key.
  {
    const CompositeState state = random_composite(g1, g2, rng);
    const McDensity a = mc_density_estimate(state, RngFactory{123}, 64, 5);
    const McDensity b = mc_density_estimate(state, RngFactory{123}, 64, 5);
    if ((a.estimate.kernel - b.estimate.kernel).norm() != 0.0) fail("mc determinism");
  }

  r.passed = failures == 0;
  r.detail = "100 trials, " + std::to_string(failures) + " failures" +
             (first.empty() ? "" : " (first: " + first + ")") + "; worst unitary drift " +
             fmt(worst_unitary) + ", dense-agreement " + fmt(worst_dense) + ", displacement " +
             fmt(worst_weyl) + ", phase-space " + fmt(worst_wigner);
}

template <typename Fn>
CriterionResult run_one(const std::string& id, std::ostream& log, const Context& ctx, Fn fn) {
  CriterionResult r;
  r.id = id;
  const auto start = std::chrono::steady_clock::now();
  try {
    fn(ctx, r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = "unexpected exception: " + std::string(e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << (r.passed ? "PASS" : "FAIL") << " " << r.id << " [" << fmt(r.seconds)
      << "s]: " << r.detail << "\n";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log) {
  log << "reference scenario: coupled oscillators, n=" << kPoints << ", L=" << kLength
      << ", lambda=" << kCoupling << ", t=" << kFinalTime << ", " << kSteps
      << " steps, seed " << kSeed << "\n";
  const Context ctx = make_context();

  std::vector<CriterionResult> results;
  results.push_back(
      run_one("trotter_first_order_convergence", log, ctx, criterion_trotter_convergence));
  results.push_back(
      run_one("unraveling_reconstructs_reduced_density", log, ctx, criterion_unraveling));
  results.push_back(
      run_one("wigner_marginalization_consistency", log, ctx, criterion_wigner));
  results.push_back(
      run_one("partial_trace_kernel_identity", log, ctx, criterion_partial_trace));
  results.push_back(
      run_one("gaussian_measure_covariance", log, ctx, criterion_gaussian_measure));
  results.push_back(
      run_one("chapman_kolmogorov_consistency", log, ctx, criterion_chapman_kolmogorov));
  results.push_back(run_one("structural_invariants", log, ctx, criterion_structure));

  int failures = 0;
  for (const CriterionResult& r : results) {
    if (!r.passed) ++failures;
  }
  log << (failures == 0 ? "all criteria passed"
                        : std::to_string(failures) + " criterion(s) failed")
      << "\n";
  return results;
}

}  // namespace oqsim
