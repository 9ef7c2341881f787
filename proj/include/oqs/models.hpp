#pragma once

// Hamiltonian triples (H_S, H_E, H_SE) for the pure-dephasing spin-boson
// model, the J^2-coupled oscillator model, and user-supplied matrices.

#include "oqs/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace oqs {

/// H_S, H_E, H_SE and the assembled H = H_S (x) I + I (x) H_E + H_SE.
/// Only constructible through assemble(), which validates every part.
class HamiltonianTriple {
public:
  static HamiltonianTriple assemble(ComplexMatrix h_s, ComplexMatrix h_e,
                                    ComplexMatrix h_se) {
    require_hermitian_part(h_s, "H_S");
    require_hermitian_part(h_e, "H_E");
    require_hermitian_part(h_se, "H_SE");
    const HilbertSpec spec(h_s.rows(), h_e.rows());
    if (h_se.rows() != spec.joint_dim())
      throw ValidationError("H_SE has dimension " +
                            std::to_string(h_se.rows()) + ", expected n*N = " +
                            std::to_string(spec.joint_dim()));
    ComplexMatrix total = lift_system(h_s, spec) + lift_env(h_e, spec) + h_se;
    return HamiltonianTriple(spec, std::move(h_s), std::move(h_e),
                             std::move(h_se), std::move(total));
  }

  const HilbertSpec &spec() const noexcept { return spec_; }
  const ComplexMatrix &system() const noexcept { return h_s_; }
  const ComplexMatrix &environment() const noexcept { return h_e_; }
  const ComplexMatrix &coupling() const noexcept { return h_se_; }
  const ComplexMatrix &total() const noexcept { return h_total_; }

  ComplexMatrix lifted_system() const { return lift_system(h_s_, spec_); }
  ComplexMatrix lifted_environment() const { return lift_env(h_e_, spec_); }
  /// H_S (x) I + I (x) H_E.
  ComplexMatrix free_part() const { return lifted_system() + lifted_environment(); }

private:
  HamiltonianTriple(HilbertSpec spec, ComplexMatrix h_s, ComplexMatrix h_e,
                    ComplexMatrix h_se, ComplexMatrix h_total)
      : spec_(spec), h_s_(std::move(h_s)), h_e_(std::move(h_e)),
        h_se_(std::move(h_se)), h_total_(std::move(h_total)) {}

  static void require_hermitian_part(const ComplexMatrix &h, const char *name) {
    if (!is_square(h) || h.rows() < 1)
      throw ValidationError(std::string(name) + " must be a non-empty square matrix (got " +
                            std::to_string(h.rows()) + "x" +
                            std::to_string(h.cols()) + ")");
    const double defect = hermiticity_defect(h);
    if (!(defect < kHermitianTolerance))
      throw ValidationError(std::string(name) + " is not Hermitian (defect " +
                            std::to_string(defect) + ")");
  }

  HilbertSpec spec_;
  ComplexMatrix h_s_;
  ComplexMatrix h_e_;
  ComplexMatrix h_se_;
  ComplexMatrix h_total_;
};

struct SpinOperators {
  ComplexMatrix jz;  ///< diag(j, j-1, ..., -j)
  ComplexMatrix jsq; ///< j(j+1) I
};

inline bool is_half_integer_spin(double j) {
  const double twice = 2.0 * j;
  return std::isfinite(j) && j >= 0.5 && std::abs(twice - std::round(twice)) < 1e-12;
}

/// Spin-j operators in the |j m> basis ordered m = j, j-1, ..., -j.
inline SpinOperators spin_ops(double j) {
  if (!is_half_integer_spin(j))
    throw ParameterError("spin_ops: j must be one of 1/2, 1, 3/2, ... (got " +
                         std::to_string(j) + ")");
  const Index twice = static_cast<Index>(std::llround(2.0 * j));
  const Index dim = twice + 1;
  const double jj = 0.5 * static_cast<double>(twice);
  ComplexMatrix jz = ComplexMatrix::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k)
    jz(k, k) = jj - static_cast<double>(k);
  return {std::move(jz), jj * (jj + 1.0) * identity(dim)};
}

/// m quantum number of row k of spin_ops(j).
inline double spin_projection(double j, Index k) {
  return 0.5 * std::round(2.0 * j) - static_cast<double>(k);
}

struct BosonOperators {
  ComplexMatrix a;
  ComplexMatrix a_dag;
  ComplexMatrix number;
};

/// Oscillator truncated to levels 0..n_max; matrix elements to n_max + 1
/// are dropped.
inline BosonOperators boson_ops(int n_max) {
  if (n_max < 1)
    throw ParameterError("boson_ops: n_max must be >= 1 (got " +
                         std::to_string(n_max) + ")");
  const Index dim = n_max + 1;
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (Index n = 1; n <= n_max; ++n)
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  ComplexMatrix a_dag = a.adjoint();
  ComplexMatrix number = a_dag * a;
  return {std::move(a), std::move(a_dag), std::move(number)};
}

struct BosonMode {
  double frequency = 1.0;
  Complex coupling{0.4, 0.0};
};

enum class ModelVariant { dephasing, jsquared, custom };

inline const char *to_string(ModelVariant v) {
  switch (v) {
  case ModelVariant::dephasing:
    return "dephasing";
  case ModelVariant::jsquared:
    return "jsquared";
  case ModelVariant::custom:
    return "custom";
  }
  return "?";
}

/// Parameters of the two built-in models. `omega` is omega_0 for the
/// dephasing model and omega for the J^2 model.
struct ModelParams {
  ModelVariant variant = ModelVariant::dephasing;
  double j = 0.5;
  double omega = 1.0;
  std::vector<BosonMode> modes;
  double beta = 1.0;
  double eta = 0.3;
  int n_max = 6;

  /// Three incommensurate modes {1, sqrt 2, sqrt 5}, g = 0.4, n_max = 6.
  static ModelParams dephasing_defaults() {
    ModelParams p;
    p.variant = ModelVariant::dephasing;
    p.modes = {{1.0, {0.4, 0.0}}, {std::sqrt(2.0), {0.4, 0.0}}, {std::sqrt(5.0), {0.4, 0.0}}};
    p.n_max = 6;
    return p;
  }

  static ModelParams jsquared_defaults() {
    ModelParams p;
    p.variant = ModelVariant::jsquared;
    p.omega = 1.0;
    p.beta = 1.0;
    p.eta = 0.3;
    p.n_max = 8;
    return p;
  }
};

namespace detail {

inline void require_real(double value, const char *name) {
  if (!std::isfinite(value))
    throw ParameterError(std::string(name) + " must be a finite real number");
}

/// Embed a single-mode operator at position `mode` of a K-mode register.
inline ComplexMatrix embed_mode(const ComplexMatrix &op, std::size_t mode,
                                std::size_t mode_count) {
  const Index level_count = op.rows();
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < mode_count; ++k)
    out = kron(out, k == mode ? op : identity(level_count));
  return out;
}

} // namespace detail

/// H_S = omega0 J_z, H_E = sum_k omega_k a_k^dag a_k,
/// H_SE = J_z (x) sum_k (g_k a_k + g_k^* a_k^dag).
/// One J_z is shared by every mode, so [H_S, H_SE] = 0 by construction.
inline HamiltonianTriple build_dephasing_model(const ModelParams &params) {
  if (params.modes.empty())
    throw ParameterError("dephasing model needs at least one boson mode");
  detail::require_real(params.omega, "omega0");
  const SpinOperators spin = spin_ops(params.j);
  const BosonOperators boson = boson_ops(params.n_max);
  const std::size_t count = params.modes.size();

  Index env_dim = 1;
  for (std::size_t k = 0; k < count; ++k)
    env_dim *= boson.a.rows();

  ComplexMatrix h_e = ComplexMatrix::Zero(env_dim, env_dim);
  ComplexMatrix bath = ComplexMatrix::Zero(env_dim, env_dim);
  for (std::size_t k = 0; k < count; ++k) {
    const BosonMode &mode = params.modes[k];
    detail::require_real(mode.frequency, "mode frequency");
    if (!std::isfinite(mode.coupling.real()) || !std::isfinite(mode.coupling.imag()))
      throw ParameterError("mode coupling must be finite");
    h_e += mode.frequency * detail::embed_mode(boson.number, k, count);
    const ComplexMatrix local =
        mode.coupling * boson.a + std::conj(mode.coupling) * boson.a_dag;
    bath += detail::embed_mode(local, k, count);
  }
  return HamiltonianTriple::assemble(params.omega * spin.jz, std::move(h_e),
                                     kron(spin.jz, bath));
}

/// H_S = omega J_z, H_E = beta b^dag b, H_SE = eta J^2 (x) (b^dag + b).
inline HamiltonianTriple build_jsquared_model(const ModelParams &params) {
  detail::require_real(params.omega, "omega");
  detail::require_real(params.beta, "beta");
  detail::require_real(params.eta, "eta");
  const SpinOperators spin = spin_ops(params.j);
  const BosonOperators boson = boson_ops(params.n_max);
  return HamiltonianTriple::assemble(params.omega * spin.jz,
                                     params.beta * boson.number,
                                     params.eta * kron(spin.jsq, boson.a_dag + boson.a));
}

inline HamiltonianTriple build_custom_model(ComplexMatrix h_s, ComplexMatrix h_e,
                                            ComplexMatrix h_se) {
  return HamiltonianTriple::assemble(std::move(h_s), std::move(h_e), std::move(h_se));
}

/// Built-in variants only; custom triples go through build_custom_model.
inline HamiltonianTriple build_model(const ModelParams &params) {
  switch (params.variant) {
  case ModelVariant::dephasing:
    return build_dephasing_model(params);
  case ModelVariant::jsquared:
    return build_jsquared_model(params);
  case ModelVariant::custom:
    break;
  }
  throw ParameterError("build_model: custom variant requires explicit matrices");
}

namespace pauli {

inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

} // namespace pauli

/// Qubit-qubit model with H_S = 0, H_E = sigma_z and
/// H_SE = 0.4 sigma_x (x) sigma_x; [H_E, H_SE] != 0.
inline HamiltonianTriple build_counterexample_model(double coupling = 0.4,
                                                    double system_splitting = 0.0) {
  return build_custom_model(system_splitting * pauli::z(), pauli::z(),
                            coupling * kron(pauli::x(), pauli::x()));
}

} // namespace oqs
