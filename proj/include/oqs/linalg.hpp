#pragma once

// Dense complex linear algebra shared by every module.
//
// Conventions: hbar = 1, so an energy times a time is a phase in radians.
// Joint system-environment vectors use system-major ordering, i.e. the basis
// state |i>|alpha> sits at index i * N + alpha.

#include "oqs/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace oqs {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kHermitianTolerance = 1e-12;

/// Dimensions of the system (n) and environment (N) factors.
class HilbertSpec {
public:
  HilbertSpec(Index system_dim, Index env_dim)
      : system_dim_(system_dim), env_dim_(env_dim) {
    if (system_dim < 1 || env_dim < 1)
      throw ParameterError("HilbertSpec: dimensions must be >= 1 (got n=" +
                           std::to_string(system_dim) +
                           ", N=" + std::to_string(env_dim) + ")");
  }

  Index system_dim() const noexcept { return system_dim_; }
  Index env_dim() const noexcept { return env_dim_; }
  Index joint_dim() const noexcept { return system_dim_ * env_dim_; }

  /// Joint index of |i>|alpha>.
  Index joint_index(Index i, Index alpha) const noexcept {
    return i * env_dim_ + alpha;
  }

  friend bool operator==(const HilbertSpec &, const HilbertSpec &) = default;

private:
  Index system_dim_;
  Index env_dim_;
};

inline bool is_square(const ComplexMatrix &a) { return a.rows() == a.cols(); }

inline void require_square(const ComplexMatrix &a, const char *what) {
  if (!is_square(a))
    throw DimensionError(std::string(what) + ": matrix is " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
}

inline void require_same_square(const ComplexMatrix &a, const ComplexMatrix &b,
                                const char *what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows())
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()) + ")");
}

/// max_ij |A_ij - conj(A_ji)|; zero for an exactly Hermitian matrix.
inline double hermiticity_defect(const ComplexMatrix &a) {
  require_square(a, "hermiticity_defect");
  double worst = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = i; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

inline bool is_hermitian(const ComplexMatrix &a,
                         double tol = kHermitianTolerance) {
  return is_square(a) && hermiticity_defect(a) < tol;
}

inline ComplexMatrix identity(Index dim) {
  return ComplexMatrix::Identity(dim, dim);
}

/// Kronecker product of square matrices:
/// (A (x) B)[i*p + k, j*p + l] = A[i,j] * B[k,l].
inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
  require_square(a, "kron");
  require_square(b, "kron");
  const Index m = a.rows();
  const Index p = b.rows();
  ComplexMatrix out(m * p, m * p);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < p; ++k)
        for (Index l = 0; l < p; ++l)
          out(i * p + k, j * p + l) = a(i, j) * b(k, l);
  return out;
}

/// Kronecker product of column vectors, same ordering as kron().
inline ComplexVector kron_vector(const ComplexVector &a,
                                 const ComplexVector &b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    for (Index k = 0; k < b.size(); ++k)
      out(i * b.size() + k) = a(i) * b(k);
  return out;
}

/// A (x) I_N.
inline ComplexMatrix lift_system(const ComplexMatrix &a,
                                 const HilbertSpec &spec) {
  if (a.rows() != spec.system_dim())
    throw DimensionError("lift_system: operator has dimension " +
                         std::to_string(a.rows()) + ", system has " +
                         std::to_string(spec.system_dim()));
  return kron(a, identity(spec.env_dim()));
}

/// I_n (x) B.
inline ComplexMatrix lift_env(const ComplexMatrix &b, const HilbertSpec &spec) {
  if (b.rows() != spec.env_dim())
    throw DimensionError("lift_env: operator has dimension " +
                         std::to_string(b.rows()) + ", environment has " +
                         std::to_string(spec.env_dim()));
  return kron(identity(spec.system_dim()), b);
}

inline void require_joint(const ComplexMatrix &rho, const HilbertSpec &spec,
                          const char *what) {
  require_square(rho, what);
  if (rho.rows() != spec.joint_dim())
    throw DimensionError(std::string(what) + ": matrix dimension " +
                         std::to_string(rho.rows()) +
                         " does not match joint dimension " +
                         std::to_string(spec.joint_dim()));
}

/// Tr_E: out[i1,i2] = sum_gamma rho[i1*N + gamma, i2*N + gamma].
inline ComplexMatrix partial_trace_env(const ComplexMatrix &rho,
                                       const HilbertSpec &spec) {
  require_joint(rho, spec, "partial_trace_env");
  const Index n = spec.system_dim();
  const Index env = spec.env_dim();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index i1 = 0; i1 < n; ++i1)
    for (Index i2 = 0; i2 < n; ++i2) {
      Complex acc{0.0, 0.0};
      for (Index g = 0; g < env; ++g)
        acc += rho(i1 * env + g, i2 * env + g);
      out(i1, i2) = acc;
    }
  return out;
}

/// Tr_S: out[a1,a2] = sum_i rho[i*N + a1, i*N + a2].
inline ComplexMatrix partial_trace_system(const ComplexMatrix &rho,
                                          const HilbertSpec &spec) {
  require_joint(rho, spec, "partial_trace_system");
  const Index n = spec.system_dim();
  const Index env = spec.env_dim();
  ComplexMatrix out = ComplexMatrix::Zero(env, env);
  for (Index i = 0; i < n; ++i)
    out += rho.block(i * env, i * env, env, env);
  return out;
}

inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) {
  require_same_square(a, b, "commutator");
  return a * b - b * a;
}

/// Frobenius norm of AB - BA.
inline double commutator_norm(const ComplexMatrix &a, const ComplexMatrix &b) {
  return commutator(a, b).norm();
}

/// Eigendecomposition of a Hermitian generator H = V diag(lambda) V^dagger,
/// reused for every evolution time.
class HermitianSpectrum {
public:
  explicit HermitianSpectrum(const ComplexMatrix &h) {
    require_square(h, "HermitianSpectrum");
    const double defect = hermiticity_defect(h);
    if (!(defect < kHermitianTolerance))
      throw ContractViolation("generator is not Hermitian (defect " +
                              std::to_string(defect) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
      throw Error("Hermitian eigendecomposition did not converge");
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  Index dim() const noexcept { return values_.size(); }
  const RealVector &eigenvalues() const noexcept { return values_; }
  const ComplexMatrix &eigenvectors() const noexcept { return vectors_; }

  /// max - min eigenvalue.
  double spread() const noexcept {
    return values_.size() ? values_.maxCoeff() - values_.minCoeff() : 0.0;
  }

  /// e^{-i lambda_k dt}.
  ComplexVector phases(double dt) const {
    ComplexVector out(values_.size());
    for (Index k = 0; k < values_.size(); ++k)
      out(k) = std::exp(-kI * values_(k) * dt);
    return out;
  }

  /// U(dt) = V diag(e^{-i lambda dt}) V^dagger.
  ComplexMatrix propagator(double dt) const {
    return vectors_ * phases(dt).asDiagonal() * vectors_.adjoint();
  }

  /// f(H) for a real scalar function f applied to the spectrum.
  template <class F> ComplexMatrix apply_function(F &&f) const {
    ComplexVector mapped(values_.size());
    for (Index k = 0; k < values_.size(); ++k)
      mapped(k) = f(values_(k));
    return vectors_ * mapped.asDiagonal() * vectors_.adjoint();
  }

private:
  RealVector values_;
  ComplexMatrix vectors_;
};

/// e^{-i H dt} through the Hermitian eigendecomposition of H.
inline ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix &h,
                                              double dt) {
  return HermitianSpectrum(h).propagator(dt);
}

/// Matrix exponential of an arbitrary square matrix (Pade, scaling and
/// squaring). Only needed where the exponent is not a Hermitian generator.
inline ComplexMatrix expm(const ComplexMatrix &a) {
  require_square(a, "expm");
  return a.exp();
}

/// Smallest eigenvalue of a Hermitian matrix (PSD checks).
inline double min_eigenvalue(const ComplexMatrix &a) {
  require_square(a, "min_eigenvalue");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Operator 2-norm of a Hermitian matrix: largest |eigenvalue|.
inline double hermitian_operator_norm(const ComplexMatrix &a) {
  require_square(a, "hermitian_operator_norm");
  if (a.rows() == 0)
    return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Largest absolute entry.
inline double max_abs(const ComplexMatrix &a) {
  return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

inline double purity(const ComplexMatrix &rho) {
  return (rho * rho).trace().real();
}

} // namespace oqs
