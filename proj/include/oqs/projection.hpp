#pragma once

// Projection-operator (Nakajima-Zwanzig) machinery on joint densities.
//
// P keeps the rows of a joint density whose environment index lies in the
// kept set: P rho = (I (x) Pi_kept) rho. This is a one-sided projection, so
// P rho is not Hermitian in general; every norm here is Frobenius on the raw
// matrix. All environment indices refer to the H_E eigenbasis, and the model
// is rotated into that basis before use.

#include "oqs/divisibility.hpp"
#include "oqs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace oqs {

inline constexpr double kProjectedDriftWarning = 1e-6;
inline constexpr double kTimeLocalTolerance = 1e-6;
/// Largest (step x spectral spread of H) used by the RK4 integrators.
inline constexpr double kMaxPhasePerStep = 0.01;

class ProjectorPair {
public:
  ProjectorPair(HilbertSpec spec, std::vector<Index> kept)
      : spec_(spec), kept_(std::move(kept)), mask_(static_cast<std::size_t>(spec.env_dim()), false) {
    if (kept_.empty())
      throw ParameterError("projector: kept set is empty");
    for (Index k : kept_) {
      if (k < 0 || k >= spec_.env_dim())
        throw ParameterError("projector: kept index " + std::to_string(k) +
                             " outside 0.." + std::to_string(spec_.env_dim() - 1));
      if (mask_[static_cast<std::size_t>(k)])
        throw ParameterError("projector: kept index " + std::to_string(k) + " listed twice");
      mask_[static_cast<std::size_t>(k)] = true;
    }
  }

  const HilbertSpec &spec() const noexcept { return spec_; }
  const std::vector<Index> &kept() const noexcept { return kept_; }
  bool keeps(Index env_index) const { return mask_[static_cast<std::size_t>(env_index)]; }

  ComplexMatrix apply_p(const ComplexMatrix &rho) const { return select_rows(rho, true); }
  ComplexMatrix apply_q(const ComplexMatrix &rho) const { return select_rows(rho, false); }

  /// I (x) Pi_kept as a joint-space matrix.
  ComplexMatrix p_matrix() const { return apply_p(identity(spec_.joint_dim())); }
  ComplexMatrix q_matrix() const { return apply_q(identity(spec_.joint_dim())); }

private:
  ComplexMatrix select_rows(const ComplexMatrix &rho, bool kept_rows) const {
    require_joint(rho, spec_, "projector");
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (Index i = 0; i < spec_.system_dim(); ++i)
      for (Index a = 0; a < spec_.env_dim(); ++a)
        if (keeps(a) == kept_rows)
          out.row(spec_.joint_index(i, a)) = rho.row(spec_.joint_index(i, a));
    return out;
  }

  HilbertSpec spec_;
  std::vector<Index> kept_;
  std::vector<bool> mask_;
};

inline ProjectorPair build_projectors(const HilbertSpec &spec, std::vector<Index> kept) {
  return ProjectorPair(spec, std::move(kept));
}

/// L rho = -i (H rho - rho H).
inline ComplexMatrix liouville_rhs(const ComplexMatrix &h_total, const ComplexMatrix &rho) {
  require_same_square(h_total, rho, "liouville_rhs");
  return -kI * (h_total * rho - rho * h_total);
}

inline ComplexMatrix liouville_rhs(const HamiltonianTriple &model, const ComplexMatrix &rho) {
  require_joint(rho, model.spec(), "liouville_rhs");
  return liouville_rhs(model.total(), rho);
}

/// ||P H_SE Q||_F in the H_E eigenbasis.
inline double projected_coupling_norm(const HamiltonianTriple &model, const ProjectorPair &pair) {
  const HamiltonianTriple rotated = to_environment_eigenbasis(model).model;
  return (pair.apply_p(rotated.coupling()) * pair.q_matrix()).norm();
}

namespace detail {

/// Number of RK4 sub-steps per interval so that h * spread <= kMaxPhasePerStep.
inline int rk4_substeps(double interval, double spread) {
  const double needed = std::ceil(std::abs(interval) * spread / kMaxPhasePerStep);
  return std::max(1, static_cast<int>(needed));
}

template <class Rhs>
ComplexMatrix rk4_step(const Rhs &rhs, const ComplexMatrix &x, double h) {
  const ComplexMatrix k1 = rhs(x);
  const ComplexMatrix k2 = rhs(ComplexMatrix(x + 0.5 * h * k1));
  const ComplexMatrix k3 = rhs(ComplexMatrix(x + 0.5 * h * k2));
  const ComplexMatrix k4 = rhs(ComplexMatrix(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// The model and initial state re-expressed in the H_E eigenbasis.
struct RotatedProblem {
  HamiltonianTriple model;
  InitialState state;
};

inline RotatedProblem rotate_problem(const HamiltonianTriple &model, const InitialState &state,
                                     const ProjectorPair &pair) {
  state.require_compatible(model.spec());
  if (!(pair.spec() == model.spec()))
    throw DimensionError("projector built for a different Hilbert space");
  EnvironmentEigenbasis basis = to_environment_eigenbasis(model);
  ComplexMatrix d = basis.rotate_weights(state.env_weights());
  d = 0.5 * (d + d.adjoint());
  InitialState rotated = state.is_pure() ? InitialState::pure(*state.amplitudes(), std::move(d))
                                         : InitialState::mixed(state.system_density(), std::move(d));
  return {std::move(basis.model), std::move(rotated)};
}

} // namespace detail

struct ProjectedTrajectory {
  std::vector<double> times;
  std::vector<ComplexMatrix> p; ///< P rho(t_k)
  std::vector<ComplexMatrix> q; ///< Q rho(t_k)
  double drift = 0.0;           ///< max_k ||P rho + Q rho - U rho0 U^dag||_F
  int substeps = 1;             ///< RK4 steps per grid interval

  bool accuracy_warning() const { return drift > kProjectedDriftWarning; }
};

/// RK4 integration of
///   d(P rho)/dt = PL(P rho) + PL(Q rho),  d(Q rho)/dt = QL(Q rho) + QL(P rho),
/// checked against exact unitary evolution at every grid point.
inline ProjectedTrajectory propagate_projected(const HamiltonianTriple &model,
                                               const InitialState &state,
                                               const ProjectorPair &pair, const TimeGrid &grid) {
  grid.validate();
  const detail::RotatedProblem problem = detail::rotate_problem(model, state, pair);
  const ComplexMatrix &h = problem.model.total();
  const JointPropagator exact(problem.model);
  const double spread = exact.spectrum().spread();

  ProjectedTrajectory out;
  out.substeps = detail::rk4_substeps(grid.dt, spread);
  const double h_step = grid.dt / out.substeps;
  out.times = grid.points();

  const ComplexMatrix rho0 = problem.state.joint_density();
  ComplexMatrix p = pair.apply_p(rho0);
  ComplexMatrix q = pair.apply_q(rho0);

  // The pair is integrated as one stacked state so RK4 stages stay coupled.
  auto rhs_p = [&](const ComplexMatrix &pp, const ComplexMatrix &qq) {
    return ComplexMatrix(pair.apply_p(liouville_rhs(h, pp)) + pair.apply_p(liouville_rhs(h, qq)));
  };
  auto rhs_q = [&](const ComplexMatrix &pp, const ComplexMatrix &qq) {
    return ComplexMatrix(pair.apply_q(liouville_rhs(h, qq)) + pair.apply_q(liouville_rhs(h, pp)));
  };

  for (std::size_t k = 0; k < out.times.size(); ++k) {
    if (k > 0)
      for (int s = 0; s < out.substeps; ++s) {
        const ComplexMatrix kp1 = rhs_p(p, q), kq1 = rhs_q(p, q);
        const ComplexMatrix p2 = p + 0.5 * h_step * kp1, q2 = q + 0.5 * h_step * kq1;
        const ComplexMatrix kp2 = rhs_p(p2, q2), kq2 = rhs_q(p2, q2);
        const ComplexMatrix p3 = p + 0.5 * h_step * kp2, q3 = q + 0.5 * h_step * kq2;
        const ComplexMatrix kp3 = rhs_p(p3, q3), kq3 = rhs_q(p3, q3);
        const ComplexMatrix p4 = p + h_step * kp3, q4 = q + h_step * kq3;
        const ComplexMatrix kp4 = rhs_p(p4, q4), kq4 = rhs_q(p4, q4);
        p += (h_step / 6.0) * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
        q += (h_step / 6.0) * (kq1 + 2.0 * kq2 + 2.0 * kq3 + kq4);
      }
    const ComplexMatrix reference = exact.evolve_density(rho0, out.times[k] - grid.t0);
    out.drift = std::max(out.drift, (p + q - reference).norm());
    out.p.push_back(p);
    out.q.push_back(q);
  }
  return out;
}

/// ||M(t_k)||_F on every grid point, where
///   M(t) = int_{t0}^{t} dt' e^{QL (t - t')} QL P rho(t')
/// by the trapezoid rule on the grid. With E = e^{QL dt} (applied by RK4
/// sub-steps, never formed) and f_k = QL P rho(t_k):
///   G_k = E G_{k-1} + f_k,   M_k = dt (G_k - f_k/2 - E^k f_0 / 2).
inline std::vector<double> memory_term_series(const HamiltonianTriple &model,
                                              const ProjectorPair &pair,
                                              const InitialState &state, const TimeGrid &grid) {
  grid.validate();
  const detail::RotatedProblem problem = detail::rotate_problem(model, state, pair);
  const ComplexMatrix &h = problem.model.total();
  const JointPropagator exact(problem.model);
  const int substeps = detail::rk4_substeps(grid.dt, exact.spectrum().spread());
  const double h_step = grid.dt / substeps;

  auto ql = [&](const ComplexMatrix &x) { return pair.apply_q(liouville_rhs(h, x)); };
  auto propagate_q = [&](ComplexMatrix x) {
    for (int s = 0; s < substeps; ++s)
      x = detail::rk4_step(ql, x, h_step);
    return x;
  };
  const ComplexMatrix rho0 = problem.state.joint_density();
  auto source = [&](double t) {
    return ql(pair.apply_p(exact.evolve_density(rho0, t - grid.t0)));
  };

  std::vector<double> out;
  out.reserve(grid.size());
  const ComplexMatrix f0 = source(grid.t0);
  ComplexMatrix accumulated = f0;  // G_k
  ComplexMatrix transported = f0;  // E^k f_0
  out.push_back(0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const ComplexMatrix fk = source(grid.at(k));
    accumulated = propagate_q(accumulated) + fk;
    transported = propagate_q(transported);
    out.push_back((grid.dt * (accumulated - 0.5 * fk - 0.5 * transported)).norm());
  }
  return out;
}

/// Memory term at a grid time t; integrates only up to t.
inline double memory_term(const HamiltonianTriple &model, const ProjectorPair &pair,
                          const InitialState &state, double t, const TimeGrid &grid) {
  grid.validate();
  const double steps = (t - grid.t0) / grid.dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 || rounded < 0.0 || rounded > grid.steps)
    throw ParameterError("memory_term: t = " + std::to_string(t) + " is not a grid point");
  if (rounded == 0.0)
    return 0.0;
  const TimeGrid truncated(grid.t0, grid.dt, static_cast<int>(rounded));
  return memory_term_series(model, pair, state, truncated).back();
}

struct TimeLocalResult {
  bool local = true;
  double max_deviation = 0.0;
};

/// Compares d(P rho)/dt (central differences) with i P [P rho, H] along the
/// exact trajectory; the difference is the P L Q rho term.
inline TimeLocalResult time_local_check(const HamiltonianTriple &model, const ProjectorPair &pair,
                                        const InitialState &state, const TimeGrid &grid,
                                        double tolerance = kTimeLocalTolerance) {
  grid.validate();
  const detail::RotatedProblem problem = detail::rotate_problem(model, state, pair);
  const ComplexMatrix &h = problem.model.total();
  const JointPropagator exact(problem.model);
  const ComplexMatrix rho0 = problem.state.joint_density();
  const double step = kFiniteDifferenceStep;

  TimeLocalResult out;
  for (double t : grid.points()) {
    const double elapsed = t - grid.t0;
    const ComplexMatrix p_now = pair.apply_p(exact.evolve_density(rho0, elapsed));
    const ComplexMatrix derivative = (pair.apply_p(exact.evolve_density(rho0, elapsed + step)) -
                                      pair.apply_p(exact.evolve_density(rho0, elapsed - step))) /
                                     (2.0 * step);
    const ComplexMatrix local = kI * pair.apply_p(ComplexMatrix(p_now * h - h * p_now));
    out.max_deviation = std::max(out.max_deviation, (derivative - local).norm());
  }
  out.local = out.max_deviation < tolerance;
  return out;
}

} // namespace oqs
