#include "oqsim/unravel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oqsim/lattice.hpp"

namespace oqsim {

namespace {

// Cumulative probabilities of a lattice distribution; total must be 1.
Eigen::VectorXd cumulative(const MarginalDensity& dist) {
  const double total = dist.weights.sum() * dist.grid.step;
  if (std::abs(total - 1.0) > kNormDriftTolerance) {
    throw DomainError("sample_environment: distribution mass " + std::to_string(total) +
                      " is not 1");
  }
  if (dist.weights.minCoeff() < 0.0) {
    throw DomainError("sample_environment: negative weight");
  }
  Eigen::VectorXd cdf(dist.weights.size());
  double acc = 0.0;
  for (Eigen::Index l = 0; l < dist.weights.size(); ++l) {
    acc += dist.weights(l) * dist.grid.step;
    cdf(l) = acc;
  }
  return cdf;
}

Eigen::Index draw_index(const Eigen::VectorXd& cdf, const Eigen::VectorXd& weights, double u) {
  // First index with cdf >= u; ties at a boundary land on the lower side.
  const double* begin = cdf.data();
  const double* end = begin + cdf.size();
  Eigen::Index idx = std::lower_bound(begin, end, u) - begin;
  if (idx >= cdf.size()) idx = cdf.size() - 1;  // u beyond the fp-rounded total
  // Never emit a zero-weight point (can only be hit at exact boundaries).
  while (idx < cdf.size() - 1 && !(weights(idx) > 0.0)) ++idx;
  while (idx > 0 && !(weights(idx) > 0.0)) --idx;
  return idx;
}

}  // namespace

MarginalDensity environment_distribution(const CompositeState& phi) {
  return marginal_density_2(phi);
}

std::vector<Eigen::Index> sample_environment(const MarginalDensity& dist, StreamRng& rng,
                                             Eigen::Index count) {
  if (count < 0) throw DomainError("sample_environment: negative count");
  const Eigen::VectorXd cdf = cumulative(dist);
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    out.push_back(draw_index(cdf, dist.weights, rng.uniform()));
  }
  return out;
}

Eigen::VectorXcd random_pure_state(const CompositeState& phi, Eigen::Index env_index) {
  return conditional_state(phi, env_index).state;
}

CompositeState momentum_environment_view(const CompositeState& phi) {
  CompositeState out = phi;
  for (Eigen::Index k = 0; k < phi.grid1.n; ++k) {
    out.amplitudes.row(k) = to_momentum(phi.amplitudes.row(k).transpose(), phi.grid2).transpose();
  }
  return out;
}

McDensity mc_density_estimate(const CompositeState& phi, const RngFactory& rng,
                              Eigen::Index count, std::uint64_t stream_base) {
  if (count < 1) throw DomainError("mc_density_estimate: count must be >= 1");
  const MarginalDensity dist = environment_distribution(phi);
  const Eigen::VectorXd cdf = cumulative(dist);
  const Eigen::Index n1 = phi.grid1.n;

  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(n1, n1);
  // |P_i(k,k')|^2 factorizes as |psi(k)|^2 |psi(k')|^2, so the second moment
  // accumulates as an outer product of the pointwise densities.
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n1, n1);
  for (Eigen::Index i = 0; i < count; ++i) {
    StreamRng stream = rng.stream(stream_base + static_cast<std::uint64_t>(i));
    const Eigen::Index idx = draw_index(cdf, dist.weights, stream.uniform());
    const Eigen::VectorXcd psi = random_pure_state(phi, idx);
    const Eigen::VectorXd density = psi.cwiseAbs2();
    mean.noalias() += psi * psi.adjoint();
    second.noalias() += density * density.transpose();
  }
  mean /= static_cast<double>(count);
  second /= static_cast<double>(count);

  McDensity result;
  result.samples = count;
  result.estimate = make_density(phi.grid1, std::move(mean));
  if (count > 1) {
    const Eigen::MatrixXd variance =
        (second - result.estimate.kernel.cwiseAbs2()).cwiseMax(0.0) *
        (static_cast<double>(count) / static_cast<double>(count - 1));
    result.stderr_kernel = (variance / static_cast<double>(count)).cwiseSqrt();
  } else {
    result.stderr_kernel = Eigen::MatrixXd::Zero(n1, n1);
  }
  return result;
}

McScalar mc_expectation(const CompositeState& phi, const Eigen::MatrixXcd& observable,
                        const RngFactory& rng, Eigen::Index count, std::uint64_t stream_base) {
  if (count < 1) throw DomainError("mc_expectation: count must be >= 1");
  if (observable.rows() != phi.grid1.n || observable.cols() != phi.grid1.n) {
    throw ShapeError("mc_expectation: observable shape does not match the system grid");
  }
  if ((observable - observable.adjoint()).cwiseAbs().maxCoeff() > kHermiticityTolerance) {
    throw DomainError("mc_expectation: observable is not Hermitian");
  }
  const MarginalDensity dist = environment_distribution(phi);
  const Eigen::VectorXd cdf = cumulative(dist);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    StreamRng stream = rng.stream(stream_base + static_cast<std::uint64_t>(i));
    const Eigen::Index idx = draw_index(cdf, dist.weights, stream.uniform());
    const Eigen::VectorXcd psi = random_pure_state(phi, idx);
    const double value = (psi.dot(observable * psi)).real() * phi.grid1.step;
    sum += value;
    sum_sq += value * value;
  }
  McScalar out;
  out.estimate = sum / static_cast<double>(count);
  if (count > 1) {
    const double var =
        std::max(0.0, (sum_sq - sum * sum / static_cast<double>(count)) /
                          static_cast<double>(count - 1));
    out.std_error = std::sqrt(var / static_cast<double>(count));
  }
  return out;
}

TrajectoryEnsemble process_snapshot(const std::vector<Snapshot>& trajectory,
                                    const std::vector<double>& times, const RngFactory& rng,
                                    Eigen::Index count) {
  if (count < 1) throw DomainError("process_snapshot: count must be >= 1");
  TrajectoryEnsemble ensemble;
  ensemble.seed = rng.seed;
  ensemble.count = count;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const Snapshot* snap = nullptr;
    for (const Snapshot& candidate : trajectory) {
      if (std::abs(candidate.time - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
        snap = &candidate;
        break;
      }
    }
    if (snap == nullptr) {
      throw DomainError("process_snapshot: no snapshot at time " + std::to_string(t));
    }
    const MarginalDensity dist = environment_distribution(snap->state);
    const Eigen::VectorXd cdf = cumulative(dist);
    std::vector<EnvironmentSample> row;
    std::vector<Eigen::VectorXcd> states;
    row.reserve(static_cast<std::size_t>(count));
    states.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) {
      const std::uint64_t stream_id =
          (static_cast<std::uint64_t>(ti + 1) << 32) | static_cast<std::uint64_t>(j);
      StreamRng stream = rng.stream(stream_id);
      const Eigen::Index idx = draw_index(cdf, dist.weights, stream.uniform());
      row.push_back(EnvironmentSample{snap->time, idx,
                                      dist.weights(idx) * dist.grid.step, stream_id});
      states.push_back(random_pure_state(snap->state, idx));
    }
    ensemble.times.push_back(snap->time);
    ensemble.samples.push_back(std::move(row));
    ensemble.states.push_back(std::move(states));
  }
  return ensemble;
}

}  // namespace oqsim
