#include "support/oracles.hpp"

#include "oqs/models.hpp"

#include <catch_amalgamated.hpp>

using namespace oqs;
using Catch::Matchers::WithinAbs;

TEST_CASE("spin operators") {
  const SpinOperators half = spin_ops(0.5);
  CHECK(half.jz.rows() == 2);
  CHECK(half.jz(0, 0) == 0.5);
  CHECK(half.jz(1, 1) == -0.5);
  CHECK(half.jsq == 0.75 * identity(2));

  const SpinOperators one = spin_ops(1.0);
  ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
  expected.diagonal() << 1.0, 0.0, -1.0;
  CHECK(one.jz == expected);
  CHECK(one.jsq == 2.0 * identity(3));

  for (double j : {0.5, 1.0, 1.5, 2.0, 3.5}) {
    const SpinOperators s = spin_ops(j);
    CHECK(s.jz.rows() == static_cast<Index>(2 * j + 1));
    CHECK(commutator_norm(s.jz, s.jsq) == 0.0);
  }

  CHECK_THROWS_AS(spin_ops(0.0), ParameterError);
  CHECK_THROWS_AS(spin_ops(0.3), ParameterError);
  CHECK_THROWS_AS(spin_ops(-1.0), ParameterError);
}

TEST_CASE("truncated boson operators") {
  const BosonOperators b = boson_ops(4);
  CHECK(b.a.rows() == 5);
  CHECK(b.a(0, 1) == 1.0);
  CHECK_THAT(b.a(2, 3).real(), WithinAbs(std::sqrt(3.0), 1e-15));
  CHECK(b.a_dag == b.a.adjoint());
  for (Index n = 0; n <= 4; ++n)
    CHECK_THAT(b.number(n, n).real(), WithinAbs(static_cast<double>(n), 1e-14));

  const ComplexMatrix comm = commutator(b.a, b.a_dag);
  for (Index n = 0; n < 4; ++n)
    CHECK_THAT(comm(n, n).real(), WithinAbs(1.0, 1e-14));
  CHECK_THAT(comm(4, 4).real(), WithinAbs(-4.0, 1e-14));

  CHECK_THROWS_AS(boson_ops(0), ParameterError);
}

TEST_CASE("dephasing model") {
  SECTION("decoupled") {
    ModelParams p = ModelParams::dephasing_defaults();
    p.n_max = 2;
    for (auto &mode : p.modes)
      mode.coupling = 0.0;
    const HamiltonianTriple m = build_dephasing_model(p);
    CHECK(m.coupling().norm() == 0.0);
    CHECK(commutator_norm(m.lifted_system(), m.coupling()) == 0.0);
  }
  SECTION("dimension arithmetic") {
    ModelParams p;
    p.modes = {{1.0, {0.4, 0.0}}};
    p.n_max = 3;
    CHECK(build_dephasing_model(p).spec().joint_dim() == 8);
  }
  SECTION("[H_S, H_SE] = 0 for random parameters") {
    oracle::Generator gen(21);
    for (int trial = 0; trial < 8; ++trial) {
      ModelParams p;
      p.j = 0.5 * gen.integer(1, 3);
      p.omega = gen.uniform(-2.0, 2.0);
      p.n_max = gen.integer(1, 3);
      const int count = gen.integer(1, 2);
      for (int k = 0; k < count; ++k)
        p.modes.push_back({gen.uniform(0.1, 3.0), gen.gaussian_complex()});
      const HamiltonianTriple m = build_dephasing_model(p);
      CHECK(commutator_norm(m.lifted_system(), m.coupling()) < 1e-12);
    }
  }
  SECTION("errors") {
    ModelParams p;
    CHECK_THROWS_AS(build_dephasing_model(p), ParameterError);
    p.modes = {{std::nan(""), {0.1, 0.0}}};
    CHECK_THROWS_AS(build_dephasing_model(p), ParameterError);
  }
  SECTION("defaults") {
    const ModelParams p = ModelParams::dephasing_defaults();
    REQUIRE(p.modes.size() == 3);
    CHECK(p.modes[1].frequency == std::sqrt(2.0));
    CHECK(p.modes[2].frequency == std::sqrt(5.0));
    CHECK(p.n_max == 6);
  }
}

TEST_CASE("jsquared model") {
  ModelParams p = ModelParams::jsquared_defaults();
  p.n_max = 2;

  SECTION("commutators") {
    const HamiltonianTriple m = build_jsquared_model(p);
    CHECK(commutator_norm(m.lifted_system(), m.coupling()) < 1e-12);
    CHECK(commutator_norm(m.lifted_environment(), m.coupling()) > 1e-6);
  }
  SECTION("eta = 0 decouples") {
    p.eta = 0.0;
    CHECK(build_jsquared_model(p).coupling().norm() == 0.0);
  }
  SECTION("S-diagonal blocks equal omega m + beta b^dag b + eta j(j+1)(b^dag + b)") {
    for (double j : {0.5, 1.0}) {
      p.j = j;
      const HamiltonianTriple m = build_jsquared_model(p);
      const BosonOperators b = boson_ops(p.n_max);
      const Index env = m.spec().env_dim();
      for (Index k = 0; k < m.spec().system_dim(); ++k) {
        const double mz = spin_projection(j, k);
        const ComplexMatrix expected = p.omega * mz * identity(env) + p.beta * b.number +
                                       p.eta * j * (j + 1.0) * (b.a_dag + b.a);
        CHECK(max_abs(m.total().block(k * env, k * env, env, env) - expected) < 1e-14);
        for (Index l = 0; l < m.spec().system_dim(); ++l)
          if (l != k)
            CHECK(max_abs(m.total().block(k * env, l * env, env, env)) == 0.0);
      }
    }
  }
  SECTION("commutators stay positive for eta, beta >= 0.1") {
    oracle::Generator gen(4);
    for (int trial = 0; trial < 6; ++trial) {
      p.eta = gen.uniform(0.1, 1.0);
      p.beta = gen.uniform(0.1, 2.0);
      const HamiltonianTriple m = build_jsquared_model(p);
      CHECK(commutator_norm(m.lifted_environment(), m.coupling()) > 1e-6);
      CHECK(commutator_norm(m.lifted_system(), m.coupling()) < 1e-12);
    }
  }
  SECTION("non-finite parameters") {
    p.eta = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(build_jsquared_model(p), ParameterError);
  }
}

TEST_CASE("custom model validation names the offending part") {
  const HamiltonianTriple ok = build_counterexample_model();
  CHECK(commutator_norm(ok.lifted_environment(), ok.coupling()) > 0.1);
  CHECK(max_abs(ok.total() - (kron(identity(2), pauli::z()) +
                              0.4 * kron(pauli::x(), pauli::x()))) == 0.0);

  ComplexMatrix bad = 0.4 * kron(pauli::x(), pauli::x());
  bad(0, 1) = 1.0;
  try {
    build_custom_model(ComplexMatrix::Zero(2, 2), pauli::z(), bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("H_SE") != std::string::npos);
  }
  try {
    build_custom_model(ComplexMatrix::Zero(2, 2), pauli::z(), identity(3));
    FAIL("expected ValidationError");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("H_SE") != std::string::npos);
  }
  try {
    build_custom_model(pauli::y() * kI, pauli::z(), identity(4));
    FAIL("expected ValidationError");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("H_S ") != std::string::npos);
  }

  const ComplexMatrix scalar = ComplexMatrix::Constant(1, 1, 2.0);
  const HamiltonianTriple tiny = build_custom_model(scalar, scalar, scalar);
  CHECK(commutator_norm(tiny.lifted_environment(), tiny.coupling()) == 0.0);
  CHECK(commutator_norm(tiny.lifted_system(), tiny.coupling()) == 0.0);
}
