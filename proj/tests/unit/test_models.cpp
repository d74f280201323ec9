#include "doctest.h"
#include "generators.hpp"

#include "esurf/eigensystem.hpp"
#include "esurf/models.hpp"

#include <cmath>

using namespace esurf;

TEST_CASE("Gell-Mann matrices are traceless, Hermitian and orthonormal") {
  for (int i = 1; i <= 8; ++i) {
    const Mat3& a = gell_mann(i);
    CHECK(std::abs(a.trace()) < 1e-15);
    CHECK((a - a.adjoint()).norm() < 1e-15);
    for (int j = 1; j <= 8; ++j) {
      const double want = i == j ? 2.0 : 0.0;
      CHECK(std::abs((a * gell_mann(j)).trace() - want) < 1e-14);
    }
  }
  CHECK_THROWS_AS(gell_mann(0), std::out_of_range);
  CHECK_THROWS_AS(gell_mann(9), std::out_of_range);
}

TEST_CASE("Gell-Mann structure constants") {
  // f_123 = 1, f_458 = f_678 = sqrt3/2
  CHECK((commutator(gell_mann(1), gell_mann(2)) - 2.0 * kI * gell_mann(3)).norm() < 1e-14);
  const Mat3 c45 = commutator(gell_mann(4), gell_mann(5));
  CHECK(std::abs((c45 * gell_mann(8)).trace() / (4.0 * kI) - kSqrt3 / 2.0) < 1e-14);
  const Mat3 c67 = commutator(gell_mann(6), gell_mann(7));
  CHECK(std::abs((c67 * gell_mann(8)).trace() / (4.0 * kI) - kSqrt3 / 2.0) < 1e-14);
}

TEST_CASE("ES Hamiltonian: explicit entries, linear derivatives, Hermitian limit") {
  testing::Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ESPoint p = gen.es_point(gen.uniform(0.0, 2.0));
    const Mat3 h = build_h_es(p);
    const double r3 = 1.0 / kSqrt3;
    Mat3 want;
    want << cplx(0, p.kappa * r3), cplx(p.q1, -p.q2), 0.0,
        cplx(p.q1, p.q2), cplx(0, p.kappa * r3), cplx(p.q3, -p.q4),
        0.0, cplx(p.q3, p.q4), cplx(0, -2.0 * p.kappa * r3);
    CHECK((h - want).norm() < 1e-14);
    CHECK(std::abs(h.trace()) < 1e-14);

    const double step = 0.37;
    ESPoint q = p;
    q.q3 += step;
    CHECK((build_h_es(q) - h - step * dh_es(Direction::q3)).norm() < 1e-13);

    ESPoint herm = p;
    herm.kappa = 0.0;
    const Mat3 hh = build_h_es(herm);
    CHECK((hh - hh.adjoint()).norm() < 1e-15);
  }
}

TEST_CASE("characteristic polynomial matches det(E - H)") {
  testing::Gen gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const ESPoint p = gen.es_point(gen.uniform(0.0, 2.0));
    const CubicInvariants inv = cubic_invariants(p);
    const Mat3 h = build_h_es(p);
    const cplx e = gen.complex_normal();
    const cplx direct = (e * Mat3::Identity() - h).determinant();
    const cplx poly = e * e * e - inv.b * e - inv.det;
    CHECK(std::abs(direct - poly) < 1e-11 * (1.0 + std::abs(direct)));
    CHECK(std::abs(inv.det - h.determinant()) < 1e-12 * (1.0 + std::abs(inv.det)));
  }
}

TEST_CASE("Berry loop Hamiltonian") {
  BerryLoopSpec spec;
  const Mat3 h = build_h_berry(spec, 0.3);
  CHECK(std::abs(h(0, 1) - spec.kappa / 3.0) < 1e-15);
  CHECK(std::abs(h(1, 2) - spec.q3(0.3)) < 1e-15);
  CHECK(std::abs(h(2, 2) - h(0, 0) - cplx(-kSqrt3 * spec.q_perp(0.3), -kSqrt3 * spec.kappa)) < 1e-14);
  CHECK(std::abs(spec.ring_ratio() - (spec.offset - spec.radius) / kExceptionalRingRadius) < 1e-15);
}

TEST_CASE("two-level model eigenvalues") {
  testing::Gen gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    TwoLevelParams p{gen.uniform(0.1, 2.0), gen.uniform(0.0, kPi), gen.uniform(0.0, kTwoPi),
                     gen.uniform(0.0, 1.5)};
    const Mat2 h = build_h_twolevel(p, true);
    const cplx e2 = p.amplitude * p.amplitude - p.gamma * p.gamma +
                    2.0 * kI * p.gamma * p.amplitude * std::cos(p.theta);
    CHECK(std::abs(h.trace()) < 1e-14);
    CHECK(std::abs(h.determinant() + e2) < 1e-12);
    const Mat2 hh = build_h_twolevel(p, false);
    CHECK((hh - hh.adjoint()).norm() < 1e-15);
  }
}

TEST_CASE("SSH3 chain is built from the Bloch blocks") {
  for (SSH3Model model : {SSH3Model::one, SSH3Model::two}) {
    SSH3Params p;
    p.model = model;
    p.t1 = 0.7;
    p.w1 = 0.4;
    const SSH3Blocks b = ssh3_blocks(p);
    for (double k : {0.0, 0.4, 2.9}) {
      const Mat3 want = b.onsite + b.forward * std::polar(1.0, -k) + b.backward * std::polar(1.0, k);
      CHECK((build_ssh3_bloch(p, k) - want).norm() < 1e-14);
    }
    p.cells = 5;
    p.bc = Boundary::open;
    const MatX open = build_ssh3_chain(p);
    p.bc = Boundary::periodic;
    const MatX ring = build_ssh3_chain(p);
    CHECK(open.rows() == 15);
    // Periodic and open chains differ only in the wrap-around blocks.
    MatX diff = ring - open;
    CHECK(diff.block(3, 3, 9, 9).norm() == 0.0);
    CHECK(diff.norm() > 0.0);
    p.cells = 1;
    CHECK_THROWS_AS(build_ssh3_chain(p), NumericalError);
  }
  const auto ks = ssh3_momenta(4);
  REQUIRE(ks.size() == 4);
  CHECK(std::abs(ks[1] - kPi / 2.0) < 1e-15);
}
