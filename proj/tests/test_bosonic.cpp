#include "support/oracles.hpp"

#include "oqs/bosonic.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace oqs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double fact(int n) { return std::tgamma(n + 1.0); }

/// Brute force over every (n2, n3, n4) in 0..n_max, keeping admissible ones,
/// with alpha, zeta and psi1 from the unsimplified printed forms.
Complex polynomial_oracle(int n, int np, double j, double beta, double eta, double t, int n_max) {
  const double gamma = eta * j * (j + 1.0);
  const double alpha = gamma * std::sin(beta * t) / beta;
  const double zeta = beta * (1.0 - std::cos(gamma * t)) / gamma;
  const double psi1 = -0.5 * (gamma * gamma * std::pow(std::sin(beta * t), 2) / (beta * beta) +
                              beta * beta * std::pow(1.0 - std::cos(gamma * t), 2) / (gamma * gamma));
  Complex sum = 0.0;
  for (int n2 = 0; n2 <= n_max; ++n2)
    for (int n3 = 0; n3 <= n_max; ++n3)
      for (int n4 = 0; n4 <= n_max; ++n4) {
        if (n2 > n || n2 > n3 || n4 > n3 || n4 > np)
          continue;
        const Complex phase = std::pow(Complex(0.0, -1.0), n + n3) * std::pow(-1.0, np + n2 - n4);
        sum += phase * fact(n) * fact(np) * fact(n3) * fact(n3) /
               (fact(n - n2) * fact(n3 - n4) * fact(n3 - n2) * fact(np - n4)) *
               std::pow(alpha, n + n3 - 2 * n2) * std::pow(zeta, n3 + np - 2 * n4);
      }
  return std::exp(Complex(0.0, -beta * t)) * sum * std::exp(psi1);
}

double sum_factorial_sixth(int n_max) {
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n)
    total += std::pow(fact(n), 6);
  return total;
}

} // namespace

TEST_CASE("kinematic_factors") {
  const KinematicFactors zero = kinematic_factors(0.5, 1.0, 0.3, 0.0);
  CHECK(zero.alpha == 0.0);
  CHECK(zero.zeta == 0.0);
  CHECK(zero.psi1 == 0.0);
  CHECK_THAT(zero.gamma, WithinAbs(0.225, 1e-15));
  CHECK_THAT(kinematic_factors(1.5, 1.0, 0.3, 0.0).gamma, WithinAbs(1.125, 1e-15));

  oracle::Generator gen(501);
  for (int trial = 0; trial < 50; ++trial) {
    const double j = 0.5 * static_cast<double>(gen.integer(1, 3));
    const double beta = gen.uniform(0.3, 2.0);
    const double eta = gen.uniform(0.1, 1.0);
    const double t = gen.uniform(0.0, 20.0);
    const KinematicFactors k = kinematic_factors(j, beta, eta, t);
    CHECK(k.psi1 <= 0.0);
    const double gamma = eta * j * (j + 1.0);
    CHECK_THAT(k.alpha, WithinAbs(gamma * std::sin(beta * t) / beta, 1e-12));
    CHECK_THAT(k.zeta, WithinAbs(beta * (1.0 - std::cos(gamma * t)) / gamma, 1e-12));

    const KinematicFactors shifted_alpha = kinematic_factors(j, beta, eta, t + 2.0 * std::numbers::pi / beta);
    CHECK_THAT(shifted_alpha.alpha, WithinAbs(k.alpha, 1e-11));
    const KinematicFactors shifted_zeta = kinematic_factors(j, beta, eta, t + 2.0 * std::numbers::pi / gamma);
    CHECK_THAT(shifted_zeta.zeta, WithinAbs(k.zeta, 1e-11));
  }

  SECTION("removable singularities") {
    const KinematicFactors no_beta = kinematic_factors(0.5, 0.0, 0.3, 2.0);
    CHECK_THAT(no_beta.alpha, WithinAbs(0.45, 1e-15));
    CHECK_THAT(kinematic_factors(0.5, 1e-9, 0.3, 2.0).alpha, WithinAbs(0.45, 1e-12));
    CHECK(no_beta.zeta == 0.0);

    const KinematicFactors no_gamma = kinematic_factors(0.5, 1.0, 0.0, 2.0);
    CHECK(no_gamma.zeta == 0.0);
    CHECK(no_gamma.alpha == 0.0);
    // Leading term beta gamma t^2 / 2 for small gamma.
    const KinematicFactors small = kinematic_factors(0.5, 1.0, 4e-9, 2.0);
    CHECK_THAT(small.zeta, WithinRel(1.0 * small.gamma * 4.0 / 2.0, 1e-9));
  }

  CHECK_THROWS_AS(kinematic_factors(0.5, std::nan(""), 0.3, 1.0), ParameterError);
}

TEST_CASE("boson polynomials") {
  SECTION("t = 0: E_{n,n'} = delta (n!)^4") {
    for (int n_max : {0, 3, 6})
      for (int n = 0; n <= n_max; ++n)
        for (int np = 0; np <= n_max; ++np) {
          const Complex e = boson_polynomial(n, np, 0.5, 1.0, 0.3, 0.0, n_max);
          CHECK(std::abs(e - (n == np ? std::pow(fact(n), 4) : 0.0)) < 1e-9 * std::max(1.0, std::abs(e)));
        }
  }

  SECTION("matches the brute-force sum") {
    oracle::Generator gen(511);
    for (int trial = 0; trial < 40; ++trial) {
      const int n_max = static_cast<int>(gen.integer(0, 6));
      const int n = static_cast<int>(gen.integer(0, n_max));
      const int np = static_cast<int>(gen.integer(0, n_max));
      const double j = 0.5 * static_cast<double>(gen.integer(1, 3));
      const double t = gen.uniform(0.0, 10.0);
      const Complex expected = polynomial_oracle(n, np, j, 1.0, 0.3, t, n_max);
      const Complex got = boson_polynomial(n, np, j, 1.0, 0.3, t, n_max);
      CHECK(std::abs(got - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
    }
  }

  SECTION("second family is the complex conjugate of the first") {
    oracle::Generator gen(512);
    for (int trial = 0; trial < 40; ++trial) {
      const int a = static_cast<int>(gen.integer(0, 6));
      const int b = static_cast<int>(gen.integer(0, 6));
      const double t = gen.uniform(0.0, 20.0);
      const Complex e = boson_polynomial(a, b, 1.0, 1.0, 0.3, t, 6);
      const Complex e_conj = boson_polynomial_conjugate(a, b, 1.0, 1.0, 0.3, t, 6);
      CHECK(std::abs(e_conj - std::conj(e)) <= 1e-12 * std::max(1.0, std::abs(e)));
    }
  }

  SECTION("finite over the documented range") {
    for (double j : {0.5, 1.0, 1.5})
      for (double t = 0.0; t <= 20.0; t += 0.25) {
        CHECK(std::isfinite(std::abs(omega_env(j, 1.0, 0.3, t, 6))));
        for (int n = 0; n <= 6; ++n)
          CHECK(std::isfinite(std::abs(boson_polynomial(n, 6 - n, j, 1.0, 0.3, t, 6))));
      }
  }

  SECTION("errors") {
    CHECK_THROWS_AS(boson_polynomial(0, 0, 0.5, 1.0, 0.3, 1.0, 7), ParameterError);
    CHECK_THROWS_AS(boson_polynomial(0, 0, 0.5, 1.0, 0.3, 1.0, -1), ParameterError);
    CHECK_THROWS_AS(boson_polynomial(4, 0, 0.5, 1.0, 0.3, 1.0, 3), ParameterError);
    CHECK_THROWS_AS(boson_polynomial_conjugate(0, -1, 0.5, 1.0, 0.3, 1.0, 3), ParameterError);
  }
}

TEST_CASE("omega_env") {
  SECTION("t = 0 evaluates to sum_n (n!)^6") {
    for (int n_max = 0; n_max <= 6; ++n_max)
      CHECK_THAT(omega_env(0.5, 1.0, 0.3, 0.0, n_max).real(), WithinRel(sum_factorial_sixth(n_max), 1e-12));
    CHECK(omega_env(0.5, 1.0, 0.3, 0.0, 0) == Complex(1.0, 0.0));
  }

  SECTION("equals the direct double sum") {
    const double t = 1.3;
    const int n_max = 4;
    Complex expected = 0.0;
    for (int n = 0; n <= n_max; ++n)
      for (int a = 0; a <= n_max; ++a)
        for (int b = 0; b <= n_max; ++b)
          expected += polynomial_oracle(n, a, 1.0, 1.0, 0.3, t, n_max) *
                      std::conj(polynomial_oracle(b, n, 1.0, 1.0, 0.3, t, n_max)) /
                      (fact(n) * std::sqrt(fact(a) * fact(b)));
    const Complex got = omega_env(1.0, 1.0, 0.3, t, n_max);
    CHECK(std::abs(got - expected) <= 1e-10 * std::abs(expected));
  }
}

TEST_CASE("analytic_reduced_element") {
  const double hat_j = 2.0;
  const Complex diag0 = analytic_reduced_element(0.5, 0.5, 0.5, 1.0, 1.0, 0.3, 0.0, 6);
  CHECK(std::abs(diag0 - omega_env(0.5, 1.0, 0.3, 0.0, 6) / hat_j) < 1e-6);

  for (double t : {0.5, 2.0, 7.0}) {
    const Complex omega = omega_env(1.0, 1.0, 0.3, t, 5);
    const Complex diag = analytic_reduced_element(1.0, 0.0, 0.0, 2.0, 1.0, 0.3, t, 5);
    CHECK_THAT(std::abs(diag), WithinRel(std::abs(omega) / 3.0, 1e-12));
    const Complex off = analytic_reduced_element(1.0, 1.0, -1.0, 2.0, 1.0, 0.3, t, 5);
    CHECK(std::abs(off - std::exp(Complex(0.0, -4.0 * t)) * omega / 3.0) < 1e-9 * std::abs(omega));
  }

  CHECK_THROWS_AS(analytic_reduced_element(0.5, 1.5, 0.5, 1.0, 1.0, 0.3, 1.0, 3), ParameterError);
  CHECK_THROWS_AS(analytic_reduced_element(1.0, 0.5, 0.0, 1.0, 1.0, 0.3, 1.0, 3), ParameterError);
  CHECK_THROWS_AS(analytic_reduced_element(0.7, 0.7, 0.7, 1.0, 1.0, 0.3, 1.0, 3), ParameterError);
}

TEST_CASE("closed-form versus numeric comparison harness") {
  ModelParams params = ModelParams::jsquared_defaults();
  const std::vector<double> times{0.0, 0.5, 1.0, 2.0, 5.0};

  SECTION("j = 1/2 table") {
    const AppendixEReport report = appendix_e_compare(params, 0.5, -0.5, times);
    REQUIRE(report.rows.size() == times.size());
    for (const AppendixERow &row : report.rows) {
      CHECK_THAT(row.omega_numeric, WithinAbs(1.0, 1e-9));
      CHECK(row.phase_deviation < 1e-9);
      CHECK_THAT(row.abs_deviation, WithinAbs(std::abs(row.analytic - row.numeric), 0.0));
    }
    CHECK(report.phase_pass());
    // Closed form at t = 0 is sum_n (n!)^6 / 2, the numerics give 1/2.
    CHECK_THAT(report.t0_deviation, WithinRel((sum_factorial_sixth(6) - 1.0) / 2.0, 1e-12));
    CHECK_FALSE(report.t0_pass());
  }

  SECTION("zeroth-order sums agree at t = 0") {
    const AppendixEReport report = appendix_e_compare(params, 0.5, -0.5, {0.0, 1.0}, 0);
    CHECK(report.t0_deviation < 1e-12);
    CHECK(report.t0_pass());
  }

  SECTION("t = 0 is checked even when absent from the list") {
    const AppendixEReport report = appendix_e_compare(params, 0.5, -0.5, {1.0});
    CHECK(report.t0_deviation > 1.0);
  }

  SECTION("larger spin") {
    params.j = 1.0;
    const AppendixEReport report = appendix_e_compare(params, 1.0, -1.0, times, 4);
    CHECK(report.phase_pass());
    for (const AppendixERow &row : report.rows)
      CHECK_THAT(row.omega_numeric, WithinAbs(1.0, 1e-9));
  }

  SECTION("errors") {
    CHECK_THROWS_AS(appendix_e_compare(params, 0.5, -0.5, {}), ParameterError);
    CHECK_THROWS_AS(appendix_e_compare(params, 0.5, 0.0, times), ParameterError);
    CHECK_THROWS_AS(appendix_e_compare(ModelParams::dephasing_defaults(), 0.5, -0.5, times), ParameterError);
  }
}
