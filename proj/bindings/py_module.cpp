// Python bindings: a flat module mirroring the C++ API for the main
// operations (grids, states, evolution, unraveling, phase space, Gaussian
// state measures). Matrices cross the boundary as numpy arrays.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oqsim/evolve.hpp"
#include "oqsim/hilbert_measure.hpp"
#include "oqsim/oracle.hpp"
#include "oqsim/unravel.hpp"
#include "oqsim/version.hpp"
#include "oqsim/wigner.hpp"

namespace py = pybind11;
using namespace oqsim;

namespace {

EvolveResult evolve_py(const CompositeState& phi0, const HamiltonianSpec& spec, double t,
                       Eigen::Index steps, SplitScheme scheme, Eigen::Index snapshot_stride,
                       bool keep_states, double norm_drift_tolerance) {
  EvolveOptions options;
  options.scheme = scheme;
  options.snapshot_stride = snapshot_stride;
  options.keep_states = keep_states;
  options.norm_drift_tolerance = norm_drift_tolerance;
  return evolve(phi0, spec, t, steps, options);
}

py::array_t<double> wigner4_values(const WignerTable4& table) {
  const Eigen::Index n1 = table.grid1.n;
  const Eigen::Index np1 = table.momenta1.size();
  const Eigen::Index n2 = table.grid2.n;
  const Eigen::Index np2 = table.momenta2.size();
  py::array_t<double> out({n1, np1, n2, np2});
  std::copy(table.values.begin(), table.values.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(oqsim_core, m) {
  m.doc() = "finite-grid simulator for coupled system-environment quantum dynamics";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def_readonly("n", &Grid::n)
      .def_readonly("length", &Grid::length)
      .def_readonly("center", &Grid::center)
      .def_readonly("step", &Grid::step)
      .def_readonly("points", &Grid::points)
      .def_readonly("momenta", &Grid::momenta)
      .def("momentum_step", &Grid::momentum_step);
  m.def("make_grid", &make_grid, py::arg("n"), py::arg("length"), py::arg("center") = 0.0);
  m.def("ascending_momenta", &ascending_momenta);
  m.def("to_momentum", &to_momentum);
  m.def("from_momentum", &from_momentum);
  m.def("quadrature_norm", &quadrature_norm);

  m.def("gaussian_packet", &gaussian_packet, py::arg("grid"), py::arg("center"),
        py::arg("sigma"), py::arg("momentum") = 0.0);
  m.def("harmonic_ground_state", &harmonic_ground_state, py::arg("grid"),
        py::arg("mass") = 1.0, py::arg("omega") = 1.0);

  py::class_<CompositeState>(m, "CompositeState")
      .def_readonly("grid1", &CompositeState::grid1)
      .def_readonly("grid2", &CompositeState::grid2)
      .def_readonly("amplitudes", &CompositeState::amplitudes)
      .def("norm", &CompositeState::norm);
  m.def("make_composite", &make_composite);
  m.def("product_state", &product_state);

  py::class_<MarginalDensity>(m, "MarginalDensity")
      .def_readonly("grid", &MarginalDensity::grid)
      .def_readonly("weights", &MarginalDensity::weights);
  m.def("marginal_density_1", &marginal_density_1);
  m.def("marginal_density_2", &marginal_density_2);

  py::class_<ConditionalState>(m, "ConditionalState")
      .def_readonly("state", &ConditionalState::state)
      .def_readonly("weight", &ConditionalState::weight);
  m.def("conditional_state", &conditional_state);

  py::class_<DensityOperator>(m, "DensityOperator")
      .def_readonly("grid", &DensityOperator::grid)
      .def_readonly("kernel", &DensityOperator::kernel);
  py::class_<DensityDiagnostics>(m, "DensityDiagnostics")
      .def_readonly("hermiticity_defect", &DensityDiagnostics::hermiticity_defect)
      .def_readonly("trace_defect", &DensityDiagnostics::trace_defect)
      .def_readonly("min_eigenvalue", &DensityDiagnostics::min_eigenvalue);
  m.def("density_diagnostics", &density_diagnostics);
  m.def("make_density", &make_density);
  m.def("reduced_density", &reduced_density);
  m.def("reduced_density_environment", &reduced_density_environment);
  m.def("expectation", &expectation);
  m.def("purity", &purity);
  m.def("chapman_kolmogorov_check", &chapman_kolmogorov_check);
  m.def("state_fidelity", &state_fidelity);
  m.def("composite_fidelity", &composite_fidelity);
  m.def("hs_distance", &hs_distance);

  py::class_<HamiltonianSpec>(m, "HamiltonianSpec")
      .def_readonly("m1", &HamiltonianSpec::m1)
      .def_readonly("m2", &HamiltonianSpec::m2)
      .def_readonly("v1", &HamiltonianSpec::v1)
      .def_readonly("v2", &HamiltonianSpec::v2)
      .def_readonly("v12", &HamiltonianSpec::v12)
      .def_readonly("preset", &HamiltonianSpec::preset);
  m.def("make_preset", &make_preset, py::arg("name"), py::arg("grid1"), py::arg("grid2"),
        py::arg("params") = std::map<std::string, double>{});
  m.def("preset_names", &preset_names);
  m.def("has_coupling", &has_coupling);
  m.def("dft_matrix", &dft_matrix);
  m.def("dense_kinetic", &dense_kinetic);
  m.def("dense_momentum", &dense_momentum);
  m.def("subsystem_hamiltonian", &subsystem_hamiltonian);
  m.def("build_dense_hamiltonian", &build_dense_hamiltonian);

  py::enum_<SplitScheme>(m, "SplitScheme")
      .value("LIE", SplitScheme::kLie)
      .value("STRANG", SplitScheme::kStrang);
  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("step", &Snapshot::step)
      .def_readonly("time", &Snapshot::time)
      .def_readonly("state", &Snapshot::state);
  py::class_<EvolveResult>(m, "EvolveResult")
      .def_readonly("state", &EvolveResult::state)
      .def_readonly("snapshots", &EvolveResult::snapshots)
      .def_readonly("max_step_drift", &EvolveResult::max_step_drift);
  m.def("trotter_step", &trotter_step, py::arg("phi"), py::arg("spec"), py::arg("dt"),
        py::arg("scheme") = SplitScheme::kLie);
  m.def("evolve", &evolve_py, py::arg("phi0"), py::arg("spec"), py::arg("t"), py::arg("steps"),
        py::arg("scheme") = SplitScheme::kLie, py::arg("snapshot_stride") = 0,
        py::arg("keep_states") = true,
        py::arg("norm_drift_tolerance") = kNormDriftTolerance);

  py::class_<ConvergenceRow>(m, "ConvergenceRow")
      .def_readonly("steps", &ConvergenceRow::steps)
      .def_readonly("dt", &ConvergenceRow::dt)
      .def_readonly("l2_error", &ConvergenceRow::l2_error)
      .def_readonly("observed_order", &ConvergenceRow::observed_order);
  py::class_<ConvergenceTable>(m, "ConvergenceTable")
      .def_readonly("rows", &ConvergenceTable::rows)
      .def_readonly("fitted_order", &ConvergenceTable::fitted_order);
  m.def("convergence_study", &convergence_study, py::arg("phi0"), py::arg("spec"), py::arg("t"),
        py::arg("steps_list"), py::arg("scheme") = SplitScheme::kLie);

  py::class_<ExactPropagator>(m, "ExactPropagator")
      .def(py::init<const HamiltonianSpec&, const Grid&, const Grid&>())
      .def("propagate", &ExactPropagator::propagate)
      .def_property_readonly("eigenvalues", &ExactPropagator::eigenvalues);
  m.def("exact_propagate", &exact_propagate);
  m.def("exact_displacement", &exact_displacement);
  m.def("enumerate_unraveling", &enumerate_unraveling);

  py::class_<McDensity>(m, "McDensity")
      .def_readonly("estimate", &McDensity::estimate)
      .def_readonly("stderr_kernel", &McDensity::stderr_kernel)
      .def_readonly("samples", &McDensity::samples);
  m.def(
      "mc_density_estimate",
      [](const CompositeState& phi, std::uint64_t seed, Eigen::Index count,
         std::uint64_t stream_base) {
        return mc_density_estimate(phi, RngFactory{seed}, count, stream_base);
      },
      py::arg("phi"), py::arg("seed"), py::arg("count"), py::arg("stream_base") = 0);
  py::class_<McScalar>(m, "McScalar")
      .def_readonly("estimate", &McScalar::estimate)
      .def_readonly("std_error", &McScalar::std_error);
  m.def(
      "mc_expectation",
      [](const CompositeState& phi, const Eigen::MatrixXcd& observable, std::uint64_t seed,
         Eigen::Index count, std::uint64_t stream_base) {
        return mc_expectation(phi, observable, RngFactory{seed}, count, stream_base);
      },
      py::arg("phi"), py::arg("observable"), py::arg("seed"), py::arg("count"),
      py::arg("stream_base") = 0);
  m.def("momentum_environment_view", &momentum_environment_view);
  m.def("environment_distribution", &environment_distribution);

  py::class_<WignerTable>(m, "WignerTable")
      .def_readonly("qgrid", &WignerTable::qgrid)
      .def_readonly("momenta", &WignerTable::momenta)
      .def_readonly("values", &WignerTable::values)
      .def("mass", &WignerTable::mass);
  py::class_<WignerTable4>(m, "WignerTable4")
      .def_readonly("grid1", &WignerTable4::grid1)
      .def_readonly("grid2", &WignerTable4::grid2)
      .def_readonly("momenta1", &WignerTable4::momenta1)
      .def_readonly("momenta2", &WignerTable4::momenta2)
      .def("values", &wigner4_values)
      .def("mass", &WignerTable4::mass);
  py::class_<WeylCharacteristic>(m, "WeylCharacteristic")
      .def_readonly("u", &WeylCharacteristic::u)
      .def_readonly("v", &WeylCharacteristic::v)
      .def_readonly("values", &WeylCharacteristic::values);
  py::class_<WignerMarginals>(m, "WignerMarginals")
      .def_readonly("position", &WignerMarginals::position)
      .def_readonly("momentum", &WignerMarginals::momentum);
  m.def("wigner_from_density", &wigner_from_density);
  m.def("joint_wigner", &joint_wigner, py::arg("phi"), py::arg("entry_cap") = kJointWignerEntryCap);
  m.def("marginalize_wigner", &marginalize_wigner);
  m.def("wigner_marginals", &wigner_marginals);
  m.def("momentum_density", &momentum_density);
  m.def("weyl_characteristic", &weyl_characteristic, py::arg("rho"), py::arg("u_count") = 0,
        py::arg("v_count") = 0);
  m.def("characteristic_to_wigner", &characteristic_to_wigner);
  m.def("spectral_upsample2x", &spectral_upsample2x);
  m.def("wigner_overlap", &wigner_overlap);

  py::class_<GaussianStateMeasure>(m, "GaussianStateMeasure")
      .def_readonly("grid", &GaussianStateMeasure::grid)
      .def_readonly("eigenvalues", &GaussianStateMeasure::eigenvalues)
      .def_readonly("eigenvectors", &GaussianStateMeasure::eigenvectors);
  m.def("from_density", &from_density);
  m.def(
      "sample_states",
      [](const GaussianStateMeasure& measure, std::uint64_t seed, Eigen::Index count,
         std::uint64_t stream_base) {
        return sample_states(measure, RngFactory{seed}, count, stream_base);
      },
      py::arg("measure"), py::arg("seed"), py::arg("count"), py::arg("stream_base") = 0);
  m.def("empirical_covariance", &empirical_covariance);
  py::class_<CovarianceResidual>(m, "CovarianceResidual")
      .def_readonly("time", &CovarianceResidual::time)
      .def_readonly("samples", &CovarianceResidual::samples)
      .def_readonly("frobenius_residual", &CovarianceResidual::frobenius_residual)
      .def_readonly("purity_exact", &CovarianceResidual::purity_exact);
  m.def(
      "track_evolution",
      [](const std::vector<std::pair<double, DensityOperator>>& trajectory, std::uint64_t seed,
         Eigen::Index count) { return track_evolution(trajectory, RngFactory{seed}, count); },
      py::arg("trajectory"), py::arg("seed"), py::arg("count"));
}
