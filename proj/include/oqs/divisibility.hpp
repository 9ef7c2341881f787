#pragma once

// Divisibility of the reduced map, commutator diagnostics, Markov time
// scales and the per-environment-state decomposition of rho_S.

#include "oqs/dynamics.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace oqs {

inline constexpr double kDefaultDivisibilityTolerance = 1e-9;
/// Residuals between the tolerance and this bound are reported as inconclusive.
inline constexpr double kInconclusiveCeiling = 1e-6;
inline constexpr double kMarkovPhaseThreshold = 0.1;
/// Off-diagonal entries of d above this (after rotation) count as coherences.
inline constexpr double kDiagonalTolerance = 1e-12;
inline constexpr double kFiniteDifferenceStep = 1e-5;

struct SplitTriple {
  double t0 = 0.0;
  double ts = 0.0;
  double t = 0.0;
};

inline void require_ordered(const SplitTriple &s) {
  if (!(s.t0 < s.ts && s.ts < s.t))
    throw ParameterError("split times must satisfy t0 < ts < t (got " + std::to_string(s.t0) +
                         ", " + std::to_string(s.ts) + ", " + std::to_string(s.t) + ")");
}

/// max |C(t,t0) - C(t,ts) o C(ts,t0)| over all index quadruples; every map
/// is built from the same environment weights d.
inline double composition_residual(const SuperMapBuilder &builder, const SplitTriple &s) {
  require_ordered(s);
  const SuperMap direct = builder.build(s.t, s.t0);
  const SuperMap split = compose(builder.build(s.t, s.ts), builder.build(s.ts, s.t0));
  return max_abs(direct.matrix() - split.matrix());
}

inline double composition_residual(const HamiltonianTriple &model, const ComplexMatrix &d,
                                   double t0, double ts, double t) {
  return composition_residual(SuperMapBuilder(model, d), SplitTriple{t0, ts, t});
}

/// ||rho_S(t) - Phi(t,ts) Phi(ts,t0) rho_S(t0)||_F.
inline double state_divisibility_residual(const SuperMapBuilder &builder,
                                          const InitialState &state, const SplitTriple &s) {
  require_ordered(s);
  const ComplexMatrix exact = builder.propagator().reduced_state(state, s.t - s.t0);
  const ComplexMatrix intermediate = apply_map(builder.build(s.ts, s.t0), state.system_density());
  return (exact - apply_map(builder.build(s.t, s.ts), intermediate)).norm();
}

inline double state_divisibility_residual(const HamiltonianTriple &model,
                                          const InitialState &state, double t0, double ts,
                                          double t) {
  state.require_compatible(model.spec());
  return state_divisibility_residual(SuperMapBuilder(model, state.env_weights()), state,
                                     SplitTriple{t0, ts, t});
}

/// Model re-expressed in a basis where H_E is diagonal. `rotation` holds
/// the eigenvectors of H_E as columns (identity if H_E was already diagonal).
struct EnvironmentEigenbasis {
  HamiltonianTriple model;
  ComplexMatrix rotation;

  ComplexMatrix rotate_weights(const ComplexMatrix &d) const {
    return rotation.adjoint() * d * rotation;
  }
};

inline bool is_diagonal(const ComplexMatrix &a, double tol = 0.0) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (i != j && std::abs(a(i, j)) > tol)
        return false;
  return true;
}

inline EnvironmentEigenbasis to_environment_eigenbasis(const HamiltonianTriple &model) {
  const Index env = model.spec().env_dim();
  if (is_diagonal(model.environment()))
    return {model, identity(env)};
  const HermitianSpectrum spectrum(model.environment());
  const ComplexMatrix &w = spectrum.eigenvectors();
  const ComplexMatrix lifted = lift_env(w, model.spec());
  ComplexMatrix h_e = ComplexMatrix::Zero(env, env);
  h_e.diagonal() = spectrum.eigenvalues().cast<Complex>();
  ComplexMatrix h_se = lifted.adjoint() * model.coupling() * lifted;
  h_se = 0.5 * (h_se + h_se.adjoint());
  return {HamiltonianTriple::assemble(model.system(), std::move(h_e), std::move(h_se)), w};
}

struct CommutatorDiagnostics {
  double comm_es = 0.0; ///< ||[I (x) H_E, H_SE]||_F
  double comm_ss = 0.0; ///< ||[H_S (x) I, H_SE]||_F
};

/// Both norms evaluated in the H_E eigenbasis.
inline CommutatorDiagnostics commutator_diagnostics(const HamiltonianTriple &model) {
  const EnvironmentEigenbasis basis = to_environment_eigenbasis(model);
  const HamiltonianTriple &m = basis.model;
  return {commutator_norm(m.lifted_environment(), m.coupling()),
          commutator_norm(m.lifted_system(), m.coupling())};
}

struct TimescaleEstimate {
  double delta_e = 0.0;
  double tau_e = 0.0;
  double coupling_norm = 0.0;
  double tau_s = 0.0;
  double phase = 0.0;
  double tau_ratio = 0.0; ///< tau_E / tau_S = phase^2
  bool markov_flag = false;
};

inline TimescaleEstimate markov_timescales(const HamiltonianTriple &model) {
  TimescaleEstimate out;
  out.delta_e = HermitianSpectrum(model.environment()).spread();
  if (!(out.delta_e > 0.0))
    throw DegenerateEnvironment("H_E has zero spectral spread; tau_E is undefined");
  out.tau_e = 1.0 / out.delta_e;
  out.coupling_norm = hermitian_operator_norm(model.coupling());
  out.tau_s = out.coupling_norm > 0.0
                  ? 1.0 / (out.coupling_norm * out.coupling_norm * out.tau_e)
                  : std::numeric_limits<double>::infinity();
  out.phase = out.coupling_norm * out.tau_e;
  out.tau_ratio = out.phase * out.phase;
  out.markov_flag = out.phase < kMarkovPhaseThreshold;
  return out;
}

namespace detail {

inline ComplexMatrix diagonal_weights_or_throw(const EnvironmentEigenbasis &basis,
                                               const ComplexMatrix &d, const char *what) {
  const ComplexMatrix rotated = basis.rotate_weights(d);
  if (!is_diagonal(rotated, kDiagonalTolerance))
    throw UnsupportedInput(std::string(what) +
                           ": environment weights are not diagonal in the H_E eigenbasis");
  return rotated;
}

/// <gamma| rho |gamma> for each environment basis state, from pure components.
inline std::vector<ComplexMatrix> env_blocks(const PureComponents &components,
                                             const HilbertSpec &spec) {
  std::vector<ComplexMatrix> blocks(static_cast<std::size_t>(spec.env_dim()),
                                    ComplexMatrix::Zero(spec.system_dim(), spec.system_dim()));
  for (std::size_t k = 0; k < components.weights.size(); ++k) {
    const ComplexMatrix phi = as_system_env_matrix(components.vectors[k], spec);
    for (Index g = 0; g < spec.env_dim(); ++g)
      blocks[static_cast<std::size_t>(g)].noalias() +=
          components.weights[k] * phi.col(g) * phi.col(g).adjoint();
  }
  return blocks;
}

/// n x n block <gamma| A |gamma> of a joint operator.
inline ComplexMatrix env_diagonal_block(const ComplexMatrix &a, const HilbertSpec &spec,
                                        Index gamma) {
  const Index n = spec.system_dim();
  ComplexMatrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = a(spec.joint_index(i, gamma), spec.joint_index(j, gamma));
  return out;
}

} // namespace detail

struct GammaBlock {
  Index gamma = 0;
  ComplexMatrix rho;     ///< <gamma| rho(t) |gamma>
  double residual = 0.0; ///< ||rho - d_gg U_g rho_S0 U_g^dag||_F
};

/// Splits rho_S(t) into the contributions with environment bra and ket fixed
/// to each H_E eigenstate gamma; the blocks sum to rho_S(t).
inline std::vector<GammaBlock> gamma_block_decompose(const HamiltonianTriple &model,
                                                     const InitialState &state, double t) {
  state.require_compatible(model.spec());
  const EnvironmentEigenbasis basis = to_environment_eigenbasis(model);
  const ComplexMatrix d = detail::diagonal_weights_or_throw(basis, state.env_weights(),
                                                            "gamma_block_decompose");
  const InitialState rotated = InitialState::mixed(state.system_density(), d);
  const HamiltonianTriple &m = basis.model;
  const HilbertSpec &spec = m.spec();
  const JointPropagator prop(m);
  const std::vector<ComplexMatrix> blocks =
      detail::env_blocks(prop.evolve_components(rotated.joint_components(), t), spec);

  std::vector<GammaBlock> out;
  for (Index g = 0; g < spec.env_dim(); ++g) {
    const ComplexMatrix h_gamma = detail::env_diagonal_block(m.total(), spec, g);
    const ComplexMatrix u = unitary_from_hamiltonian(h_gamma, t);
    const ComplexMatrix expected = d(g, g).real() * u * state.system_density() * u.adjoint();
    const ComplexMatrix &rho = blocks[static_cast<std::size_t>(g)];
    out.push_back({g, rho, (rho - expected).norm()});
  }
  return out;
}

/// ||R_gamma(t)||_F per environment eigenstate, where
/// R_gamma = d rho_Sgamma/dt + i [H_d^gamma + H_S + E_gamma I, rho_Sgamma]
/// and H_d^gamma = <gamma|H_SE|gamma>. The derivative is a central difference.
struct NonlocalDecomposition {
  std::vector<double> times;
  std::vector<std::vector<double>> remainder; ///< [gamma][time index]

  double max_remainder() const {
    double worst = 0.0;
    for (const auto &series : remainder)
      for (double r : series)
        worst = std::max(worst, r);
    return worst;
  }
};

inline NonlocalDecomposition nonlocal_decomposition(const HamiltonianTriple &model,
                                                    const InitialState &state,
                                                    const TimeGrid &grid) {
  state.require_compatible(model.spec());
  grid.validate();
  const EnvironmentEigenbasis basis = to_environment_eigenbasis(model);
  const ComplexMatrix d = detail::diagonal_weights_or_throw(basis, state.env_weights(),
                                                            "nonlocal_decomposition");
  const PureComponents initial = InitialState::mixed(state.system_density(), d).joint_components();
  const HamiltonianTriple &m = basis.model;
  const HilbertSpec &spec = m.spec();
  const Index env = spec.env_dim();
  const JointPropagator prop(m);

  std::vector<ComplexMatrix> local_generator;
  for (Index g = 0; g < env; ++g)
    local_generator.push_back(detail::env_diagonal_block(m.coupling(), spec, g) + m.system() +
                              m.environment()(g, g) * identity(spec.system_dim()));

  const double h = kFiniteDifferenceStep;
  NonlocalDecomposition out;
  out.times = grid.points();
  out.remainder.assign(static_cast<std::size_t>(env), {});
  for (double t : out.times) {
    const double elapsed = t - grid.t0;
    const auto now = detail::env_blocks(prop.evolve_components(initial, elapsed), spec);
    const auto ahead = detail::env_blocks(prop.evolve_components(initial, elapsed + h), spec);
    const auto behind = detail::env_blocks(prop.evolve_components(initial, elapsed - h), spec);
    for (std::size_t g = 0; g < now.size(); ++g) {
      const ComplexMatrix derivative = (ahead[g] - behind[g]) / (2.0 * h);
      const ComplexMatrix r = derivative + kI * commutator(local_generator[g], now[g]);
      out.remainder[g].push_back(r.norm());
    }
  }
  return out;
}

enum class Verdict { divisible, non_divisible, inconclusive };

inline const char *to_string(Verdict v) {
  switch (v) {
  case Verdict::divisible:
    return "divisible";
  case Verdict::non_divisible:
    return "non-divisible";
  case Verdict::inconclusive:
    return "inconclusive";
  }
  return "?";
}

/// divisible below `tolerance`; inconclusive up to 1e-6 when the tolerance
/// is tighter than that; non-divisible above.
inline Verdict classify_divisibility(double max_residual, double tolerance) {
  if (max_residual < tolerance)
    return Verdict::divisible;
  if (max_residual < kInconclusiveCeiling)
    return Verdict::inconclusive;
  return Verdict::non_divisible;
}

struct DivisibilityReport {
  std::vector<SplitTriple> splits;
  std::vector<double> residuals;
  double comm_es = 0.0;
  double comm_ss = 0.0;
  Verdict verdict = Verdict::divisible;
  double tolerance = kDefaultDivisibilityTolerance;

  double max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
  }
};

/// Three evenly spaced splits of each of a few windows inside [t0, t_end].
inline std::vector<SplitTriple> default_splits(double t0, double t_end) {
  std::vector<SplitTriple> out;
  const double span = t_end - t0;
  for (double end_fraction : {0.25, 0.5, 1.0})
    for (double split_fraction : {0.25, 0.5, 0.75}) {
      const double t = t0 + end_fraction * span;
      out.push_back({t0, t0 + split_fraction * (t - t0), t});
    }
  return out;
}

inline DivisibilityReport analyze_divisibility(const HamiltonianTriple &model,
                                               const ComplexMatrix &d,
                                               const std::vector<SplitTriple> &splits,
                                               double tolerance = kDefaultDivisibilityTolerance) {
  if (splits.empty())
    throw ParameterError("analyze_divisibility: no split triples given");
  if (!(tolerance > 0.0))
    throw ParameterError("analyze_divisibility: tolerance must be > 0");
  const SuperMapBuilder builder(model, d);
  DivisibilityReport report;
  report.splits = splits;
  report.tolerance = tolerance;
  for (const SplitTriple &s : splits)
    report.residuals.push_back(composition_residual(builder, s));
  const CommutatorDiagnostics comm = commutator_diagnostics(model);
  report.comm_es = comm.comm_es;
  report.comm_ss = comm.comm_ss;
  report.verdict = classify_divisibility(report.max_residual(), tolerance);
  return report;
}

} // namespace oqs
