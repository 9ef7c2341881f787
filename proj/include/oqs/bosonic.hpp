#pragma once

// Closed-form bosonic sector of the J^2 model (H_S = omega J_z,
// H_E = beta b^dag b, H_SE = eta J^2 (b^dag + b)) and a harness comparing
// it against exact numerical evolution.

#include "oqs/dynamics.hpp"
#include "oqs/errors.hpp"
#include "oqs/models.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace oqs {

/// Factorials are tabulated in double precision up to this bound.
inline constexpr int kMaxPolynomialOrder = 6;
inline constexpr double kAppendixETolerance = 1e-9;

struct KinematicFactors {
  double alpha = 0.0;
  double zeta = 0.0;
  double gamma = 0.0; ///< eta j (j + 1)
  double psi1 = 0.0;
};

/// alpha = gamma sin(beta t) / beta, zeta = beta (1 - cos(gamma t)) / gamma,
/// psi1 = -(alpha^2 + zeta^2) / 2. The removable singularities are taken as
/// limits: alpha -> gamma t at beta = 0, zeta -> 0 at gamma = 0.
inline KinematicFactors kinematic_factors(double j, double beta, double eta, double t) {
  detail::require_real(j, "j");
  detail::require_real(beta, "beta");
  detail::require_real(eta, "eta");
  detail::require_real(t, "t");
  KinematicFactors k;
  k.gamma = eta * j * (j + 1.0);
  k.alpha = beta == 0.0 ? k.gamma * t : k.gamma * std::sin(beta * t) / beta;
  if (k.gamma != 0.0) {
    // 1 - cos(x) = 2 sin^2(x/2) avoids cancellation for small gamma t.
    const double s = std::sin(0.5 * k.gamma * t);
    k.zeta = 2.0 * beta * s * s / k.gamma;
  }
  k.psi1 = -0.5 * (k.alpha * k.alpha + k.zeta * k.zeta);
  return k;
}

namespace detail {

inline constexpr std::array<double, kMaxPolynomialOrder + 1> kFactorial{1, 1, 2, 6, 24, 120, 720};

inline void require_polynomial_order(int n_max) {
  if (n_max < 0 || n_max > kMaxPolynomialOrder)
    throw ParameterError("bosonic polynomials: n_max must be in 0.." +
                         std::to_string(kMaxPolynomialOrder) + " (got " + std::to_string(n_max) + ")");
}

inline void require_level(int n, int n_max, const char *name) {
  if (n < 0 || n > n_max)
    throw ParameterError(std::string("bosonic polynomials: ") + name + " = " + std::to_string(n) +
                         " outside 0.." + std::to_string(n_max));
}

inline Complex ipow(Complex base, int power) {
  Complex out = 1.0;
  for (int k = 0; k < power; ++k)
    out *= base;
  return out;
}

inline double sign_power(int power) { return power % 2 == 0 ? 1.0 : -1.0; }

} // namespace detail

/// E_{n,n'}(j, t): sum over n3 in 0..n_max, n2 <= min(n, n3), n4 <= min(n3, n') of
/// (-i)^{n+n3} (-1)^{n'+n2-n4} n! n'! (n3!)^2 alpha^{n+n3-2n2} zeta^{n3+n'-2n4}
/// / [(n-n2)! (n3-n4)! (n3-n2)! (n'-n4)!], times e^{-i beta t} e^{psi1}.
inline Complex boson_polynomial(int n, int n_prime, double j, double beta, double eta, double t,
                                int n_max) {
  detail::require_polynomial_order(n_max);
  detail::require_level(n, n_max, "n");
  detail::require_level(n_prime, n_max, "n'");
  const KinematicFactors k = kinematic_factors(j, beta, eta, t);
  const auto &f = detail::kFactorial;
  Complex sum = 0.0;
  for (int n3 = 0; n3 <= n_max; ++n3)
    for (int n2 = 0; n2 <= std::min(n, n3); ++n2)
      for (int n4 = 0; n4 <= std::min(n3, n_prime); ++n4) {
        const double magnitude = f[n] * f[n_prime] * f[n3] * f[n3] /
                                 (f[n - n2] * f[n3 - n4] * f[n3 - n2] * f[n_prime - n4]) *
                                 std::pow(k.alpha, n + n3 - 2 * n2) *
                                 std::pow(k.zeta, n3 + n_prime - 2 * n4);
        sum += detail::ipow(-kI, n + n3) * detail::sign_power(n_prime + n2 - n4) * magnitude;
      }
  return std::exp(-kI * beta * t) * sum * std::exp(k.psi1);
}

/// E*_{n'',n}(j, t): the second family, summed as printed with i^{n''+n3},
/// (-1)^{n+n2-n4}, e^{+i beta t} and psi2 = psi1 (equal spins on both sides).
inline Complex boson_polynomial_conjugate(int n_second, int n, double j, double beta, double eta,
                                          double t, int n_max) {
  detail::require_polynomial_order(n_max);
  detail::require_level(n_second, n_max, "n''");
  detail::require_level(n, n_max, "n");
  const KinematicFactors k = kinematic_factors(j, beta, eta, t);
  const auto &f = detail::kFactorial;
  Complex sum = 0.0;
  for (int n3 = 0; n3 <= n_max; ++n3)
    for (int n2 = 0; n2 <= std::min(n_second, n3); ++n2)
      for (int n4 = 0; n4 <= std::min(n3, n); ++n4) {
        const double magnitude = f[n_second] * f[n] * f[n3] * f[n3] /
                                 (f[n_second - n2] * f[n3 - n2] * f[n3 - n4] * f[n - n4]) *
                                 std::pow(k.alpha, n_second + n3 - 2 * n2) *
                                 std::pow(k.zeta, n + n3 - 2 * n4);
        sum += detail::ipow(kI, n_second + n3) * detail::sign_power(n + n2 - n4) * magnitude;
      }
  return std::exp(kI * beta * t) * sum * std::exp(k.psi1);
}

/// Omega_E(j, j, t) = sum_n (1/n!) sum_{n', n''} E_{n,n'} E*_{n'',n} / sqrt(n'! n''!).
inline Complex omega_env(double j, double beta, double eta, double t, int n_max) {
  detail::require_polynomial_order(n_max);
  const auto &f = detail::kFactorial;
  std::vector<Complex> e(static_cast<std::size_t>((n_max + 1) * (n_max + 1)));
  std::vector<Complex> e_conj(e.size());
  const auto at = [n_max](int a, int b) { return static_cast<std::size_t>(a * (n_max + 1) + b); };
  for (int a = 0; a <= n_max; ++a)
    for (int b = 0; b <= n_max; ++b) {
      e[at(a, b)] = boson_polynomial(a, b, j, beta, eta, t, n_max);
      e_conj[at(a, b)] = boson_polynomial_conjugate(a, b, j, beta, eta, t, n_max);
    }
  Complex total = 0.0;
  for (int n = 0; n <= n_max; ++n)
    for (int n1 = 0; n1 <= n_max; ++n1)
      for (int n2 = 0; n2 <= n_max; ++n2)
        total += e[at(n, n1)] * e_conj[at(n2, n)] / (f[n] * std::sqrt(f[n1] * f[n2]));
  return total;
}

namespace detail {

/// Row index of m in the |j m> basis ordered m = j, ..., -j.
inline Index spin_row(double j, double m) {
  const Index dim = static_cast<Index>(std::llround(2.0 * j)) + 1;
  const double row = std::round(2.0 * j) / 2.0 - m;
  if (!(std::abs(m) <= j + 1e-12) || std::abs(row - std::round(row)) > 1e-12)
    throw ParameterError("m = " + std::to_string(m) + " is not a projection of j = " +
                         std::to_string(j));
  const Index k = static_cast<Index>(std::llround(row));
  if (k < 0 || k >= dim)
    throw ParameterError("m = " + std::to_string(m) + " out of range for j = " + std::to_string(j));
  return k;
}

} // namespace detail

/// e^{-i omega (m1 - m2) t} / (2j + 1) * Omega_E(j, j, t).
inline Complex analytic_reduced_element(double j, double m1, double m2, double omega, double beta,
                                        double eta, double t, int n_max) {
  if (!is_half_integer_spin(j))
    throw ParameterError("analytic_reduced_element: j must be one of 1/2, 1, 3/2, ...");
  detail::spin_row(j, m1);
  detail::spin_row(j, m2);
  return std::exp(-kI * omega * (m1 - m2) * t) / (2.0 * j + 1.0) *
         omega_env(j, beta, eta, t, n_max);
}

struct AppendixERow {
  double t = 0.0;
  Complex analytic;
  Complex numeric;
  double abs_deviation = 0.0;   ///< |analytic - numeric|
  double omega_analytic = 0.0;  ///< |Omega_E| from the closed form
  double omega_numeric = 0.0;   ///< (2j+1) |rho_num|
  double phase_deviation = 0.0; ///< |rho_num / |rho_num| - e^{-i omega (m1-m2) t}|
};

struct AppendixEReport {
  double j = 0.5;
  double m1 = 0.5;
  double m2 = -0.5;
  int polynomial_order = kMaxPolynomialOrder;
  std::vector<AppendixERow> rows;
  double t0_deviation = 0.0;        ///< |analytic - numeric| at t = 0, always evaluated
  double max_phase_deviation = 0.0;
  double max_omega_deviation = 0.0; ///< max | |Omega_analytic| - |Omega_numeric| |
  double tolerance = kAppendixETolerance;

  bool t0_pass() const { return t0_deviation < tolerance; }
  bool phase_pass() const { return max_phase_deviation < tolerance; }
};

/// Analytic vs exact numerics for the J^2 model: boson vacuum, maximally
/// coherent spin state (every element 1/(2j+1)). `params` fixes the
/// numerical model and its truncation; `polynomial_order` bounds the sums.
inline AppendixEReport appendix_e_compare(const ModelParams &params, double m1, double m2,
                                          const std::vector<double> &times,
                                          int polynomial_order = kMaxPolynomialOrder) {
  if (params.variant != ModelVariant::jsquared)
    throw ParameterError("appendix_e_compare: requires the jsquared model");
  if (times.empty())
    throw ParameterError("appendix_e_compare: no comparison times");
  detail::require_polynomial_order(polynomial_order);
  const HamiltonianTriple model = build_jsquared_model(params);
  const Index row = detail::spin_row(params.j, m1);
  const Index col = detail::spin_row(params.j, m2);
  const Index n = model.spec().system_dim();
  const InitialState state =
      InitialState::pure(maximally_coherent_amplitudes(n), ground_weights(model.spec().env_dim()));
  const JointPropagator prop(model);
  const double hat_j = 2.0 * params.j + 1.0;

  AppendixEReport report;
  report.j = params.j;
  report.m1 = m1;
  report.m2 = m2;
  report.polynomial_order = polynomial_order;
  const auto evaluate = [&](double t) {
    AppendixERow r;
    r.t = t;
    const Complex omega = omega_env(params.j, params.beta, params.eta, t, polynomial_order);
    const Complex phase = std::exp(-kI * params.omega * (m1 - m2) * t);
    r.analytic = phase / hat_j * omega;
    r.numeric = prop.reduced_state(state, t)(row, col);
    r.abs_deviation = std::abs(r.analytic - r.numeric);
    r.omega_analytic = std::abs(omega);
    r.omega_numeric = hat_j * std::abs(r.numeric);
    r.phase_deviation = std::abs(r.numeric / std::abs(r.numeric) - phase);
    return r;
  };

  report.t0_deviation = evaluate(0.0).abs_deviation;
  for (double t : times) {
    const AppendixERow r = evaluate(t);
    report.max_phase_deviation = std::max(report.max_phase_deviation, r.phase_deviation);
    report.max_omega_deviation =
        std::max(report.max_omega_deviation, std::abs(r.omega_analytic - r.omega_numeric));
    report.rows.push_back(r);
  }
  return report;
}

} // namespace oqs
