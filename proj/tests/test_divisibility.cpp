#include "support/oracles.hpp"

#include "oqs/divisibility.hpp"

#include <catch_amalgamated.hpp>

using namespace oqs;
using Catch::Matchers::WithinAbs;

namespace {

ComplexMatrix projector(Index dim, Index k) {
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  p(k, k) = 1.0;
  return p;
}

/// H_E diagonal and non-degenerate, H_SE = sum_gamma A_gamma (x) |gamma><gamma|.
HamiltonianTriple random_commuting_model(oracle::Generator &gen, Index n, Index env) {
  ComplexMatrix h_e = ComplexMatrix::Zero(env, env);
  for (Index g = 0; g < env; ++g)
    h_e(g, g) = static_cast<double>(g) + gen.uniform(0.0, 0.5);
  ComplexMatrix h_se = ComplexMatrix::Zero(n * env, n * env);
  for (Index g = 0; g < env; ++g)
    h_se += kron(gen.hermitian(n, 0.5), projector(env, g));
  const ComplexMatrix h_s = gen.hermitian(n);
  return build_custom_model(h_s, h_e, h_se);
}

HamiltonianTriple zz_model(double g = 0.5) {
  return build_custom_model(ComplexMatrix::Zero(2, 2), pauli::z(),
                            g * kron(pauli::z(), pauli::z()));
}

ComplexVector generic_qubit() {
  ComplexVector c(2);
  c << 0.8, 0.6;
  return c;
}

ModelParams small_jsquared() {
  ModelParams p = ModelParams::jsquared_defaults();
  p.n_max = 4;
  return p;
}

} // namespace

TEST_CASE("composition_residual") {
  oracle::Generator gen(101);

  SECTION("single environment state") {
    for (int trial = 0; trial < 5; ++trial) {
      const HamiltonianTriple model = gen.model(gen.integer(1, 3), 1);
      const auto s = gen.split_triple(5.0);
      CHECK(composition_residual(model, identity(1), s[0], s[1], s[2]) < 1e-10);
    }
  }

  SECTION("jsquared model, vacuum and mixed environments") {
    for (double j : {0.5, 1.0}) {
      ModelParams p = small_jsquared();
      p.j = j;
      const HamiltonianTriple model = build_jsquared_model(p);
      const Index env = model.spec().env_dim();
      for (const ComplexMatrix &d : {ground_weights(env), maximally_mixed(env), gen.density(env)}) {
        const auto s = gen.split_triple(6.0);
        CHECK(composition_residual(model, d, s[0], s[1], s[2]) < 1e-9);
      }
    }
  }

  SECTION("sigma_x sigma_x counterexample") {
    const HamiltonianTriple model = build_counterexample_model();
    CHECK(composition_residual(model, maximally_mixed(2), 0.0, 0.7, 1.4) > 1e-3);
  }

  SECTION("agrees with the oracle maps") {
    const HamiltonianTriple model = gen.model(2, 3);
    const ComplexMatrix d = gen.density(3);
    const ComplexMatrix direct = oracle::super_matrix(model, d, 2.0, 0.0);
    const ComplexMatrix split =
        oracle::super_matrix(model, d, 0.8, 0.0) * oracle::super_matrix(model, d, 2.0, 0.8);
    CHECK_THAT(composition_residual(model, d, 0.0, 0.8, 2.0),
               WithinAbs(oracle::max_abs(direct - split), 1e-11));
  }

  SECTION("out-of-order times") {
    const HamiltonianTriple model = zz_model();
    CHECK_THROWS_AS(composition_residual(model, maximally_mixed(2), 0.0, 1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(composition_residual(model, maximally_mixed(2), 1.0, 1.0, 2.0), ParameterError);
  }
}

TEST_CASE("commuting models with a definite environment state are divisible") {
  oracle::Generator gen(111);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = gen.integer(1, 3);
    const Index env = gen.integer(2, 4);
    const HamiltonianTriple model = random_commuting_model(gen, n, env);
    REQUIRE(commutator_diagnostics(model).comm_es < 1e-12);
    const ComplexMatrix d = projector(env, gen.integer(0, static_cast<int>(env) - 1));
    for (int k = 0; k < 3; ++k) {
      const auto s = gen.split_triple(4.0);
      CHECK(composition_residual(model, d, s[0], s[1], s[2]) < 1e-9);
    }
  }
}

TEST_CASE("commuting model with mixed diagonal weights is a random-unitary channel") {
  // H_S = 0, H_E = sigma_z, H_SE = g sigma_z sigma_z and d = I/2: the
  // coherence is multiplied by cos(2 g t), so the composition defect of the
  // (0,1) -> (0,1) entry is |cos(2g t) - cos(2g (t - ts)) cos(2g ts)|.
  const double g = 0.5;
  const HamiltonianTriple model = zz_model(g);
  for (auto [ts, t] : {std::pair{0.3, 0.9}, {0.7, 1.4}, {1.0, 2.5}}) {
    const double expected =
        std::abs(std::cos(2 * g * t) - std::cos(2 * g * (t - ts)) * std::cos(2 * g * ts));
    CHECK_THAT(composition_residual(model, maximally_mixed(2), 0.0, ts, t),
               WithinAbs(expected, 1e-12));
  }
}

TEST_CASE("state_divisibility_residual") {
  oracle::Generator gen(121);

  SECTION("maximally coherent system, maximally mixed environment") {
    // Models where the reduced map of this state is divisible: a system
    // with no free Hamiltonian against the counterexample coupling, and the
    // jsquared model.
    const HamiltonianTriple counter = build_counterexample_model();
    const InitialState s = InitialState::pure(maximally_coherent_amplitudes(2), maximally_mixed(2));
    CHECK(state_divisibility_residual(counter, s, 0.0, 0.7, 1.4) < 1e-10);

    const HamiltonianTriple js = build_jsquared_model(small_jsquared());
    const InitialState sj = InitialState::pure(maximally_coherent_amplitudes(2),
                                               maximally_mixed(js.spec().env_dim()));
    CHECK(state_divisibility_residual(js, sj, 0.0, 1.1, 3.0) < 1e-10);
  }

  SECTION("maximally mixed system and environment on random models") {
    // rho(t0) = I/(nN) is stationary, so every intermediate state is I/n.
    for (int trial = 0; trial < 6; ++trial) {
      const Index n = gen.integer(1, 3);
      const Index env = gen.integer(1, 4);
      const HamiltonianTriple model = gen.model(n, env);
      const InitialState s = InitialState::mixed(maximally_mixed(n), maximally_mixed(env));
      const auto t = gen.split_triple(5.0);
      CHECK(state_divisibility_residual(model, s, t[0], t[1], t[2]) < 1e-10);
    }
  }

  SECTION("single environment state") {
    const HamiltonianTriple model = gen.model(3, 1);
    const InitialState s = InitialState::pure(gen.amplitudes(3), identity(1));
    CHECK(state_divisibility_residual(model, s, 0.2, 1.0, 3.0) < 1e-10);
  }

  SECTION("generic non-commuting model") {
    const HamiltonianTriple model = build_counterexample_model(0.4, 1.0);
    const InitialState s = InitialState::pure(generic_qubit(), maximally_mixed(2));
    CHECK(state_divisibility_residual(model, s, 0.0, 0.7, 1.4) > 1e-4);
  }

  SECTION("bounded by n^2 times the composition residual") {
    for (int trial = 0; trial < 10; ++trial) {
      const Index n = gen.integer(1, 3);
      const Index env = gen.integer(1, 3);
      const HamiltonianTriple model = gen.model(n, env);
      const InitialState s = InitialState::pure(gen.amplitudes(n), gen.density(env));
      const auto t = gen.split_triple(4.0);
      const double state_res = state_divisibility_residual(model, s, t[0], t[1], t[2]);
      const double map_res = composition_residual(model, s.env_weights(), t[0], t[1], t[2]);
      CHECK(state_res <= static_cast<double>(n * n) * map_res + 1e-13);
    }
  }
}

TEST_CASE("gamma_block_decompose") {
  oracle::Generator gen(131);

  SECTION("jsquared blocks sum to rho_S") {
    const HamiltonianTriple model = build_jsquared_model(small_jsquared());
    const InitialState s = InitialState::pure(gen.amplitudes(2), ground_weights(model.spec().env_dim()));
    for (double t : {0.5, 2.0}) {
      ComplexMatrix total = ComplexMatrix::Zero(2, 2);
      for (const GammaBlock &b : gamma_block_decompose(model, s, t))
        total += b.rho;
      CHECK(max_abs(total - reduced_state(model, s, t)) < 1e-10);
    }
  }

  SECTION("commuting coupling: every block evolves unitarily") {
    const InitialState s = InitialState::pure(gen.amplitudes(2), gen.diagonal_density(2));
    for (const GammaBlock &b : gamma_block_decompose(zz_model(), s, 1.3))
      CHECK(b.residual < 1e-9);
  }

  SECTION("commuting coupling with a rotated H_E") {
    const ComplexMatrix h_e = gen.hermitian(3);
    const HermitianSpectrum spectrum(h_e);
    const ComplexMatrix &w = spectrum.eigenvectors();
    const ComplexMatrix f = spectrum.apply_function([](double x) { return std::sin(x) + 0.3 * x * x; });
    const HamiltonianTriple model = build_custom_model(gen.hermitian(2), h_e,
                                                       0.7 * kron(pauli::x(), f));
    const ComplexMatrix d = w * gen.diagonal_density(3) * w.adjoint();
    const InitialState s = InitialState::pure(gen.amplitudes(2), 0.5 * (d + d.adjoint()));
    const auto blocks = gamma_block_decompose(model, s, 0.9);
    ComplexMatrix total = ComplexMatrix::Zero(2, 2);
    for (const GammaBlock &b : blocks) {
      CHECK(b.residual < 1e-9);
      total += b.rho;
    }
    CHECK(max_abs(total - reduced_state(model, s, 0.9)) < 1e-10);
  }

  SECTION("sigma_x sigma_x coupling") {
    // |+> is a sigma_x eigenstate and would not move; use a generic state.
    const HamiltonianTriple model = build_counterexample_model();
    const InitialState s = InitialState::pure(generic_qubit(), maximally_mixed(2));
    double worst = 0.0;
    for (const GammaBlock &b : gamma_block_decompose(model, s, 1.0))
      worst = std::max(worst, b.residual);
    CHECK(worst > 1e-3);
  }

  SECTION("non-diagonal weights are rejected") {
    ComplexMatrix d = maximally_mixed(2);
    d(0, 1) = d(1, 0) = 0.25;
    const InitialState s = InitialState::pure(maximally_coherent_amplitudes(2), d);
    CHECK_THROWS_AS(gamma_block_decompose(zz_model(), s, 1.0), UnsupportedInput);
  }
}

TEST_CASE("commutator_diagnostics") {
  ModelParams dp = ModelParams::dephasing_defaults();
  dp.n_max = 2;
  CHECK(commutator_diagnostics(build_dephasing_model(dp)).comm_ss < 1e-12);

  const CommutatorDiagnostics js = commutator_diagnostics(build_jsquared_model(small_jsquared()));
  CHECK(js.comm_ss < 1e-12);
  CHECK(js.comm_es > 0.0);

  oracle::Generator gen(141);
  const CommutatorDiagnostics zero = commutator_diagnostics(
      build_custom_model(gen.hermitian(2), gen.hermitian(3), ComplexMatrix::Zero(6, 6)));
  CHECK(zero.comm_es == 0.0);
  CHECK(zero.comm_ss == 0.0);

  // Frobenius norms do not depend on the environment basis.
  const HamiltonianTriple m = gen.model(2, 3);
  CHECK_THAT(commutator_diagnostics(m).comm_es,
             WithinAbs(commutator_norm(m.lifted_environment(), m.coupling()), 1e-12));
}

TEST_CASE("markov_timescales") {
  ComplexMatrix h_e = ComplexMatrix::Zero(2, 2);
  h_e(1, 1) = 10.0;
  const TimescaleEstimate a =
      markov_timescales(build_custom_model(pauli::z(), h_e, 0.5 * kron(pauli::z(), identity(2))));
  CHECK_THAT(a.delta_e, WithinAbs(10.0, 1e-14));
  CHECK_THAT(a.tau_e, WithinAbs(0.1, 1e-15));
  CHECK_THAT(a.coupling_norm, WithinAbs(0.5, 1e-14));
  CHECK_THAT(a.tau_s, WithinAbs(40.0, 1e-12));
  CHECK_THAT(a.phase, WithinAbs(0.05, 1e-15));
  CHECK(a.markov_flag);
  CHECK(a.tau_ratio == a.phase * a.phase);
  CHECK_THAT(a.tau_e / a.tau_s, WithinAbs(a.tau_ratio, 1e-15));

  h_e(1, 1) = 1.0;
  const TimescaleEstimate b =
      markov_timescales(build_custom_model(pauli::z(), h_e, 2.0 * kron(pauli::z(), identity(2))));
  CHECK_THAT(b.phase, WithinAbs(2.0, 1e-14));
  CHECK_FALSE(b.markov_flag);

  CHECK_THROWS_AS(markov_timescales(build_custom_model(pauli::z(), identity(2), identity(4))),
                  DegenerateEnvironment);
}

TEST_CASE("nonlocal_decomposition") {
  const TimeGrid grid(0.0, 0.1, 30);
  oracle::Generator gen(151);

  SECTION("environment-block-diagonal coupling") {
    const InitialState s = InitialState::pure(gen.amplitudes(2), gen.diagonal_density(2));
    CHECK(nonlocal_decomposition(zz_model(), s, grid).max_remainder() < 1e-6);
  }
  SECTION("sigma_x sigma_x coupling") {
    const InitialState s = InitialState::pure(generic_qubit(), maximally_mixed(2));
    CHECK(nonlocal_decomposition(build_counterexample_model(), s, grid).max_remainder() > 1e-3);
  }
  SECTION("no coupling") {
    const HamiltonianTriple free = build_custom_model(gen.hermitian(2), gen.hermitian(3),
                                                      ComplexMatrix::Zero(6, 6));
    const HermitianSpectrum spectrum(free.environment());
    const ComplexMatrix &w = spectrum.eigenvectors();
    const ComplexMatrix d = w * gen.diagonal_density(3) * w.adjoint();
    const InitialState s = InitialState::pure(gen.amplitudes(2), 0.5 * (d + d.adjoint()));
    const NonlocalDecomposition out = nonlocal_decomposition(free, s, grid);
    CHECK(out.remainder.size() == 3);
    CHECK(out.times.size() == grid.size());
    CHECK(out.max_remainder() < 1e-8);
  }
}

TEST_CASE("analyze_divisibility verdicts") {
  const HamiltonianTriple js = build_jsquared_model(small_jsquared());
  const DivisibilityReport ok =
      analyze_divisibility(js, ground_weights(js.spec().env_dim()), default_splits(0.0, 5.0));
  CHECK(ok.verdict == Verdict::divisible);
  CHECK(ok.residuals.size() == ok.splits.size());
  for (double r : ok.residuals)
    CHECK(r >= 0.0);

  const DivisibilityReport bad = analyze_divisibility(
      build_counterexample_model(), maximally_mixed(2), {{0.0, 0.7, 1.4}});
  CHECK(bad.verdict == Verdict::non_divisible);
  CHECK(bad.comm_es > 0.1);

  CHECK(classify_divisibility(1e-12, 1e-9) == Verdict::divisible);
  CHECK(classify_divisibility(1e-8, 1e-9) == Verdict::inconclusive);
  CHECK(classify_divisibility(1e-3, 1e-9) == Verdict::non_divisible);
  CHECK(classify_divisibility(1e-3, 1e-2) == Verdict::divisible);
  CHECK_THROWS_AS(analyze_divisibility(js, ground_weights(js.spec().env_dim()), {}), ParameterError);
}
