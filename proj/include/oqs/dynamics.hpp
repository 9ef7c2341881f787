#pragma once

// Exact joint evolution, reduced states and the super-matrix dynamical map.
//
// The initial joint state rho_S0 (x) d is kept as a short list of weighted
// pure components; each is propagated through the eigendecomposition of
// H_total, so nothing of size (nN)^2 x (nN)^2 is ever formed.

#include "oqs/linalg.hpp"
#include "oqs/models.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oqs {

inline constexpr double kStateTolerance = 1e-12;
/// Eigen-weights below this are dropped from low-rank decompositions.
inline constexpr double kNegligibleWeight = 1e-15;

/// Uniform grid t_k = t0 + k dt, k = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.02;
  int steps = 1000;

  TimeGrid() = default;
  TimeGrid(double start, double step, int count) : t0(start), dt(step), steps(count) {
    validate();
  }

  /// Grid on [start, stop] with the step count rounded to the nearest integer.
  static TimeGrid spanning(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop > start))
      throw ParameterError("TimeGrid: need stop > start and dt > 0");
    const double count = std::round((stop - start) / step);
    return TimeGrid(start, step, static_cast<int>(std::max(1.0, count)));
  }

  void validate() const {
    if (!std::isfinite(t0))
      throw ParameterError("TimeGrid: t0 must be finite");
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw ParameterError("TimeGrid: dt must be > 0");
    if (steps < 1)
      throw ParameterError("TimeGrid: steps must be >= 1");
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(steps) + 1; }
  double at(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  double end() const noexcept { return at(static_cast<std::size_t>(steps)); }

  std::vector<double> points() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = at(k);
    return out;
  }
};

/// Weighted pure components of a density matrix: rho = sum_k w_k v_k v_k^dag.
struct PureComponents {
  std::vector<double> weights;
  std::vector<ComplexVector> vectors;
};

inline PureComponents spectral_components(const ComplexMatrix &rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho);
  PureComponents out;
  for (Index k = rho.rows() - 1; k >= 0; --k) {
    const double w = solver.eigenvalues()(k);
    if (w > kNegligibleWeight) {
      out.weights.push_back(w);
      out.vectors.emplace_back(solver.eigenvectors().col(k));
    }
  }
  return out;
}

namespace detail {

inline void validate_density(const ComplexMatrix &rho, const char *name) {
  if (!is_square(rho) || rho.rows() < 1)
    throw ValidationError(std::string(name) + " must be a non-empty square matrix");
  const double defect = hermiticity_defect(rho);
  if (!(defect < kStateTolerance))
    throw ValidationError(std::string(name) + " is not Hermitian (defect " +
                          std::to_string(defect) + ")");
  const double trace = rho.trace().real();
  if (!(std::abs(trace - 1.0) < kStateTolerance))
    throw ValidationError(std::string(name) + " does not have unit trace (trace " +
                          std::to_string(trace) + ")");
  const double lowest = min_eigenvalue(rho);
  if (lowest < -kStateTolerance)
    throw ValidationError(std::string(name) + " is not positive semidefinite (min eigenvalue " +
                          std::to_string(lowest) + ")");
}

} // namespace detail

/// rho(t0) = rho_S0 (x) d, with rho_S0 = c c^dag for a pure system state.
class InitialState {
public:
  static InitialState pure(ComplexVector amplitudes, ComplexMatrix env_weights) {
    if (amplitudes.size() < 1)
      throw ValidationError("amplitudes must be non-empty");
    const double norm = amplitudes.squaredNorm();
    if (!(std::abs(norm - 1.0) < kStateTolerance))
      throw ValidationError("amplitudes not normalized (sum |c|^2 = " +
                            std::to_string(norm) + ")");
    detail::validate_density(env_weights, "environment weights d");
    ComplexMatrix rho_s = amplitudes * amplitudes.adjoint();
    return InitialState(std::move(rho_s), std::move(env_weights), std::move(amplitudes));
  }

  static InitialState mixed(ComplexMatrix system_density, ComplexMatrix env_weights) {
    detail::validate_density(system_density, "system density");
    detail::validate_density(env_weights, "environment weights d");
    return InitialState(std::move(system_density), std::move(env_weights), std::nullopt);
  }

  Index system_dim() const noexcept { return rho_s_.rows(); }
  Index env_dim() const noexcept { return d_.rows(); }
  HilbertSpec spec() const { return HilbertSpec(system_dim(), env_dim()); }

  const ComplexMatrix &system_density() const noexcept { return rho_s_; }
  const ComplexMatrix &env_weights() const noexcept { return d_; }
  const std::optional<ComplexVector> &amplitudes() const noexcept { return amplitudes_; }
  bool is_pure() const noexcept { return amplitudes_.has_value(); }

  ComplexMatrix joint_density() const { return kron(rho_s_, d_); }

  /// Product components (system eigvec (x) environment eigvec) of rho(t0).
  PureComponents joint_components() const {
    PureComponents system;
    if (amplitudes_) {
      system.weights = {1.0};
      system.vectors = {*amplitudes_};
    } else {
      system = spectral_components(rho_s_);
    }
    const PureComponents env = spectral_components(d_);
    PureComponents out;
    for (std::size_t a = 0; a < system.weights.size(); ++a)
      for (std::size_t b = 0; b < env.weights.size(); ++b) {
        out.weights.push_back(system.weights[a] * env.weights[b]);
        out.vectors.push_back(kron_vector(system.vectors[a], env.vectors[b]));
      }
    return out;
  }

  void require_compatible(const HilbertSpec &model_spec) const {
    if (!(spec() == model_spec))
      throw DimensionError("initial state (n=" + std::to_string(system_dim()) +
                           ", N=" + std::to_string(env_dim()) +
                           ") does not match model (n=" +
                           std::to_string(model_spec.system_dim()) + ", N=" +
                           std::to_string(model_spec.env_dim()) + ")");
  }

private:
  InitialState(ComplexMatrix rho_s, ComplexMatrix d, std::optional<ComplexVector> c)
      : rho_s_(std::move(rho_s)), d_(std::move(d)), amplitudes_(std::move(c)) {}

  ComplexMatrix rho_s_;
  ComplexMatrix d_;
  std::optional<ComplexVector> amplitudes_;
};

/// |0><0| on N levels (boson vacuum, or the first basis state).
inline ComplexMatrix ground_weights(Index env_dim) {
  ComplexMatrix d = ComplexMatrix::Zero(env_dim, env_dim);
  d(0, 0) = 1.0;
  return d;
}

inline ComplexMatrix maximally_mixed(Index dim) {
  return identity(dim) / static_cast<double>(dim);
}

/// c_i = 1/sqrt(n).
inline ComplexVector maximally_coherent_amplitudes(Index n) {
  return ComplexVector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

/// Reshape a joint vector into the n x N matrix Phi[i, alpha].
inline ComplexMatrix as_system_env_matrix(const ComplexVector &psi, const HilbertSpec &spec) {
  ComplexMatrix phi(spec.system_dim(), spec.env_dim());
  for (Index i = 0; i < spec.system_dim(); ++i)
    for (Index a = 0; a < spec.env_dim(); ++a)
      phi(i, a) = psi(spec.joint_index(i, a));
  return phi;
}

/// Time evolution under a fixed H_total, diagonalized once.
class JointPropagator {
public:
  explicit JointPropagator(const HamiltonianTriple &model)
      : spec_(model.spec()), spectrum_(model.total()) {}

  const HilbertSpec &spec() const noexcept { return spec_; }
  const HermitianSpectrum &spectrum() const noexcept { return spectrum_; }

  ComplexMatrix unitary(double elapsed) const { return spectrum_.propagator(elapsed); }

  /// U(elapsed) psi at O(D^2) cost.
  ComplexVector evolve_vector(const ComplexVector &psi, double elapsed) const {
    if (elapsed == 0.0)
      return psi;
    const ComplexMatrix &v = spectrum_.eigenvectors();
    ComplexVector coeffs = v.adjoint() * psi;
    coeffs = coeffs.cwiseProduct(spectrum_.phases(elapsed));
    return v * coeffs;
  }

  ComplexMatrix evolve_density(const ComplexMatrix &rho, double elapsed) const {
    require_joint(rho, spec_, "evolve_joint");
    if (elapsed == 0.0)
      return rho;
    const ComplexMatrix u = unitary(elapsed);
    return u * rho * u.adjoint();
  }

  /// Evolved components of rho(t0); weights are unchanged.
  PureComponents evolve_components(const PureComponents &initial, double elapsed) const {
    PureComponents out;
    out.weights = initial.weights;
    out.vectors.reserve(initial.vectors.size());
    for (const ComplexVector &psi : initial.vectors)
      out.vectors.push_back(evolve_vector(psi, elapsed));
    return out;
  }

  ComplexMatrix joint_state(const InitialState &state, double elapsed) const {
    state.require_compatible(spec_);
    return density_from(evolve_components(state.joint_components(), elapsed));
  }

  ComplexMatrix reduced_state(const InitialState &state, double elapsed) const {
    state.require_compatible(spec_);
    return system_marginal(evolve_components(state.joint_components(), elapsed));
  }

  ComplexMatrix density_from(const PureComponents &components) const {
    ComplexMatrix rho = ComplexMatrix::Zero(spec_.joint_dim(), spec_.joint_dim());
    for (std::size_t k = 0; k < components.weights.size(); ++k)
      rho.noalias() += components.weights[k] * components.vectors[k] *
                       components.vectors[k].adjoint();
    return rho;
  }

  /// Tr_E of sum_k w_k |phi_k><phi_k|, via Phi Phi^dag per component.
  ComplexMatrix system_marginal(const PureComponents &components) const {
    const Index n = spec_.system_dim();
    ComplexMatrix rho_s = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < components.weights.size(); ++k) {
      const ComplexMatrix phi = as_system_env_matrix(components.vectors[k], spec_);
      rho_s.noalias() += components.weights[k] * phi * phi.adjoint();
    }
    return rho_s;
  }

  /// Tr_S of sum_k w_k |phi_k><phi_k|.
  ComplexMatrix env_marginal(const PureComponents &components) const {
    const Index env = spec_.env_dim();
    ComplexMatrix rho_e = ComplexMatrix::Zero(env, env);
    for (std::size_t k = 0; k < components.weights.size(); ++k) {
      const ComplexMatrix phi = as_system_env_matrix(components.vectors[k], spec_);
      rho_e.noalias() += components.weights[k] * phi.transpose() * phi.conjugate();
    }
    return rho_e;
  }

private:
  HilbertSpec spec_;
  HermitianSpectrum spectrum_;
};

/// U(t - t0) rho0 U^dag(t - t0); t0 = 0 unless given.
inline ComplexMatrix evolve_joint(const HamiltonianTriple &model, const ComplexMatrix &rho0,
                                  double t, double t0 = 0.0) {
  require_joint(rho0, model.spec(), "evolve_joint");
  return JointPropagator(model).evolve_density(rho0, t - t0);
}

inline ComplexMatrix reduced_state(const HamiltonianTriple &model, const InitialState &state,
                                   double t, double t0 = 0.0) {
  return JointPropagator(model).reduced_state(state, t - t0);
}

/// C[(i1,i2),(j1,j2)] stored as an n^2 x n^2 matrix, row i1*n + i2 and
/// column j1*n + j2.
class SuperMap {
public:
  SuperMap(double t0, double t, ComplexMatrix tensor) : t0_(t0), t_(t), c_(std::move(tensor)) {
    require_square(c_, "SuperMap");
    const double root = std::round(std::sqrt(static_cast<double>(c_.rows())));
    n_ = static_cast<Index>(root);
    if (n_ < 1 || n_ * n_ != c_.rows())
      throw DimensionError("SuperMap: tensor size " + std::to_string(c_.rows()) +
                           " is not a perfect square");
  }

  static SuperMap identity_map(Index n, double t0) {
    return SuperMap(t0, t0, ComplexMatrix::Identity(n * n, n * n));
  }

  double t0() const noexcept { return t0_; }
  double t() const noexcept { return t_; }
  Index system_dim() const noexcept { return n_; }
  const ComplexMatrix &matrix() const noexcept { return c_; }

  Complex operator()(Index i1, Index i2, Index j1, Index j2) const {
    return c_(i1 * n_ + i2, j1 * n_ + j2);
  }

private:
  double t0_;
  double t_;
  Index n_ = 0;
  ComplexMatrix c_;
};

/// out[j1,j2] = sum_{i1,i2} rho[i1,i2] C[(i1,i2),(j1,j2)].
inline ComplexMatrix apply_map(const SuperMap &map, const ComplexMatrix &rho_s0) {
  const Index n = map.system_dim();
  if (rho_s0.rows() != n || rho_s0.cols() != n)
    throw DimensionError("apply_map: state is " + std::to_string(rho_s0.rows()) + "x" +
                         std::to_string(rho_s0.cols()) + ", map acts on " +
                         std::to_string(n) + "x" + std::to_string(n));
  const ComplexMatrix &c = map.matrix();
  ComplexMatrix out(n, n);
  for (Index j1 = 0; j1 < n; ++j1)
    for (Index j2 = 0; j2 < n; ++j2) {
      Complex acc{0.0, 0.0};
      for (Index i1 = 0; i1 < n; ++i1)
        for (Index i2 = 0; i2 < n; ++i2)
          acc += rho_s0(i1, i2) * c(i1 * n + i2, j1 * n + j2);
      out(j1, j2) = acc;
    }
  return out;
}

inline ComplexMatrix apply_map(const SuperMap &map, const ComplexVector &amplitudes) {
  return apply_map(map, ComplexMatrix(amplitudes * amplitudes.adjoint()));
}

/// Map of applying `earlier` and then `later`; the contraction over the
/// intermediate (j1,j2) is a plain matrix product.
inline SuperMap compose(const SuperMap &later, const SuperMap &earlier) {
  if (later.system_dim() != earlier.system_dim())
    throw DimensionError("compose: maps act on different system dimensions");
  return SuperMap(earlier.t0(), later.t(), earlier.matrix() * later.matrix());
}

/// Builds C(t, t0) for a fixed model and environment weights d.
///
/// C[(i1,i2),(j1,j2)] = sum_k w_k sum_gamma A_{k,i1}[j1,gamma] conj(A_{k,i2}[j2,gamma])
/// where d = sum_k w_k v_k v_k^dag and A_{k,i} is U (|i> (x) v_k) reshaped
/// to n x N. Only the n * rank(d) columns of U that d touches are computed.
class SuperMapBuilder {
public:
  SuperMapBuilder(const HamiltonianTriple &model, const ComplexMatrix &env_weights)
      : propagator_(model), env_(validated_components(model.spec(), env_weights)) {}

  const JointPropagator &propagator() const noexcept { return propagator_; }

  SuperMap build(double t, double t0) const {
    const HilbertSpec &spec = propagator_.spec();
    const Index n = spec.system_dim();
    if (t == t0)
      return SuperMap::identity_map(n, t0);

    std::vector<std::vector<ComplexMatrix>> blocks(env_.weights.size());
    for (std::size_t k = 0; k < env_.weights.size(); ++k)
      for (Index i = 0; i < n; ++i) {
        ComplexVector basis = ComplexVector::Zero(n);
        basis(i) = 1.0;
        const ComplexVector evolved =
            propagator_.evolve_vector(kron_vector(basis, env_.vectors[k]), t - t0);
        blocks[k].push_back(as_system_env_matrix(evolved, spec));
      }

    ComplexMatrix c = ComplexMatrix::Zero(n * n, n * n);
    for (std::size_t k = 0; k < env_.weights.size(); ++k)
      for (Index i1 = 0; i1 < n; ++i1)
        for (Index i2 = 0; i2 < n; ++i2) {
          const ComplexMatrix block =
              env_.weights[k] * blocks[k][i1] * blocks[k][i2].adjoint();
          for (Index j1 = 0; j1 < n; ++j1)
            for (Index j2 = 0; j2 < n; ++j2)
              c(i1 * n + i2, j1 * n + j2) += block(j1, j2);
        }
    return SuperMap(t0, t, std::move(c));
  }

private:
  static PureComponents validated_components(const HilbertSpec &spec,
                                             const ComplexMatrix &env_weights) {
    detail::validate_density(env_weights, "environment weights d");
    if (env_weights.rows() != spec.env_dim())
      throw DimensionError("super_matrix: d is " + std::to_string(env_weights.rows()) +
                           "-dimensional, environment has N = " +
                           std::to_string(spec.env_dim()));
    return spectral_components(env_weights);
  }

  JointPropagator propagator_;
  PureComponents env_;
};

inline SuperMap super_matrix(const HamiltonianTriple &model, const ComplexMatrix &env_weights,
                             double t, double t0 = 0.0) {
  return SuperMapBuilder(model, env_weights).build(t, t0);
}

/// Tr[rho(t0) H~_SE(t) H~_SE(t')] with H~_SE(tau) = e^{i H0 tau} H_SE e^{-i H0 tau}
/// and H0 the free part; evaluated in the eigenbasis of H0.
class EnvCorrelation {
public:
  EnvCorrelation(const HamiltonianTriple &model, const InitialState &state)
      : free_(model.free_part()) {
    state.require_compatible(model.spec());
    const ComplexMatrix &w = free_.eigenvectors();
    coupling_ = w.adjoint() * model.coupling() * w;
    const PureComponents components = state.joint_components();
    weights_ = components.weights;
    for (const ComplexVector &psi : components.vectors)
      vectors_.push_back(w.adjoint() * psi);
  }

  Complex operator()(double t, double t_prime) const {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < weights_.size(); ++k)
      acc += weights_[k] * interaction_image(vectors_[k], t).dot(interaction_image(vectors_[k], t_prime));
    return acc;
  }

private:
  /// H~_SE(tau) x in the H0 eigenbasis.
  ComplexVector interaction_image(const ComplexVector &x, double tau) const {
    ComplexVector y = coupling_ * x.cwiseProduct(free_.phases(tau));
    return y.cwiseProduct(free_.phases(-tau));
  }

  HermitianSpectrum free_;
  ComplexMatrix coupling_;
  std::vector<double> weights_;
  std::vector<ComplexVector> vectors_;
};

inline Complex env_correlation(const HamiltonianTriple &model, const InitialState &state,
                               double t, double t_prime) {
  return EnvCorrelation(model, state)(t, t_prime);
}

struct MarkovCheck {
  double correlation_ratio = 0.0; ///< ||rho_SE - rho_S (x) rho_E||_F / ||rho_SE||_F
  double env_drift = 0.0;         ///< ||rho_E(t) - rho_E(t0)||_F
};

inline MarkovCheck markov_condition_check(const JointPropagator &propagator,
                                          const InitialState &state, double elapsed) {
  state.require_compatible(propagator.spec());
  const PureComponents evolved =
      propagator.evolve_components(state.joint_components(), elapsed);
  const ComplexMatrix joint = propagator.density_from(evolved);
  const ComplexMatrix rho_s = propagator.system_marginal(evolved);
  const ComplexMatrix rho_e = propagator.env_marginal(evolved);
  MarkovCheck out;
  out.correlation_ratio = (joint - kron(rho_s, rho_e)).norm() / joint.norm();
  out.env_drift = (rho_e - state.env_weights()).norm();
  return out;
}

inline MarkovCheck markov_condition_check(const HamiltonianTriple &model,
                                          const InitialState &state, double t,
                                          double t0 = 0.0) {
  return markov_condition_check(JointPropagator(model), state, t - t0);
}

/// The two contributions to d rho_S / dt: -i Tr_E[H rho(t)] and +i Tr_E[rho(t) H].
struct ReducedDerivative {
  ComplexMatrix first;
  ComplexMatrix second;
  ComplexMatrix total() const { return first + second; }
};

inline ReducedDerivative reduced_state_derivative(const HamiltonianTriple &model,
                                                  const JointPropagator &propagator,
                                                  const InitialState &state,
                                                  double elapsed) {
  const ComplexMatrix rho = propagator.joint_state(state, elapsed);
  const ComplexMatrix &h = model.total();
  return {partial_trace_env(ComplexMatrix(-kI * (h * rho)), model.spec()),
          partial_trace_env(ComplexMatrix(kI * (rho * h)), model.spec())};
}

} // namespace oqs
