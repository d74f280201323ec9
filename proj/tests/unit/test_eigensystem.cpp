#include "doctest.h"
#include "generators.hpp"

#include "esurf/eigensystem.hpp"

#include <algorithm>
#include <cmath>

using namespace esurf;

namespace {

// Largest distance between the closed-form roots and the general solver's,
// after optimal matching.
double root_mismatch(const std::array<cplx, 3>& roots, const Mat3& h) {
  const Eigen::ComplexEigenSolver<Mat3> es(h, false);
  VecX a(3), b = es.eigenvalues();
  for (int i = 0; i < 3; ++i) a(i) = roots[static_cast<std::size_t>(i)];
  const Permutation perm = match_values(a, b);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(a(i) - b(perm[static_cast<std::size_t>(i)])));
  return worst;
}

}  // namespace

TEST_CASE("depressed cubic with known roots") {
  // (E - 1)(E - 2)(E + 3) = E^3 - 7E + 6
  auto r = solve_depressed_cubic(-7.0, 6.0, 7.0);
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  CHECK(std::abs(r[0] + 3.0) < 1e-13);
  CHECK(std::abs(r[1] - 1.0) < 1e-13);
  CHECK(std::abs(r[2] - 2.0) < 1e-13);
  const auto triple = solve_depressed_cubic(0.0, 0.0, 1.0);
  for (cplx z : triple) CHECK(z == cplx(0.0));
}

TEST_CASE("closed form agrees with the general eigensolver") {
  testing::Gen gen(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const ESPoint p = gen.es_point(trial % 2 == 0 ? 0.0 : gen.uniform(0.1, 2.0));
    const Mat3 h = build_h_es(p);
    CHECK(root_mismatch(eig_closed_form_3x3(p), h) < 1e-9 * (1.0 + h.norm()));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 m = gen.matrix(3);
    CHECK(root_mismatch(eig_closed_form_3x3(m), m) < 1e-9 * (1.0 + m.norm()));
  }
}

TEST_CASE("Hermitian limit spectrum") {
  testing::Gen gen(22);
  for (int trial = 0; trial < 100; ++trial) {
    const ESPoint p = gen.es_point(0.0);
    const double r = std::sqrt(std::norm(p.omega1()) + std::norm(p.omega2()));
    const BiorthEigensystem es = eig_biorthogonal(build_h_es(p));
    CHECK(std::abs(es.values(0) + r) < 1e-10);
    CHECK(std::abs(es.values(1)) < 1e-10);
    CHECK(std::abs(es.values(2) - r) < 1e-10);
  }
}

TEST_CASE("biorthonormal frames reconstruct H") {
  testing::Gen gen(23);
  for (int n : {2, 3, 6, 12}) {
    for (int trial = 0; trial < 20; ++trial) {
      const MatX h = gen.matrix(n);
      const BiorthEigensystem es = eig_biorthogonal(h);
      CHECK((es.left * es.right - MatX::Identity(n, n)).norm() < 1e-10);
      CHECK((es.right * es.values.asDiagonal() * es.left - h).norm() < 1e-9 * h.norm());
      for (int k = 0; k < n; ++k) CHECK(std::abs(es.right.col(k).norm() - 1.0) < 1e-12);
      for (int k = 1; k < n; ++k) {
        const cplx a = es.values(k - 1), b = es.values(k);
        CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
      }
    }
  }
}

TEST_CASE("degenerate but diagonalisable matrices keep a biorthonormal frame") {
  testing::Gen gen(24);
  for (int trial = 0; trial < 20; ++trial) {
    const MatX s = gen.matrix(4);
    VecX d(4);
    d << 1.0, 1.0, cplx(0.0, 2.0), -1.0;
    const MatX h = s * d.asDiagonal() * s.inverse();
    const BiorthEigensystem es = eig_biorthogonal(h);
    CHECK((es.left * es.right - MatX::Identity(4, 4)).norm() < 1e-8);
  }
}

TEST_CASE("exceptional points") {
  const ESPoint ep3{1.0 / 3.0, 0.0, 2.0 * kSqrt2 / 3.0, 0.0, 1.0};
  for (cplx z : eig_closed_form_3x3(ep3)) CHECK(std::abs(z) < 1e-9);
  CHECK_THROWS_AS(eig_biorthogonal(build_h_es(ep3)), NumericalError);
  try {
    eig_biorthogonal(build_h_es(ep3));
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::defective_pair);
  }
  Mat2 jordan;
  jordan << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(eig_biorthogonal(jordan), NumericalError);
}

TEST_CASE("band matching follows a permutation") {
  testing::Gen gen(25);
  const MatX h = gen.matrix(5);
  const BiorthEigensystem a = eig_biorthogonal(h);
  const MatX pert = h + 1e-6 * gen.matrix(5);
  const BiorthEigensystem b = eig_biorthogonal(pert);
  const Permutation perm = match_bands(a, b);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(a.values(i) - b.values(perm[static_cast<std::size_t>(i)])) < 1e-4);
  }
  VecX prev(2), next(2);
  prev << 0.0, 1.0;
  next << 0.5, 0.5;
  CHECK_THROWS_AS(match_values(prev, next), NumericalError);
}

TEST_CASE("permutation helpers") {
  const Permutation cycle{1, 2, 0};
  CHECK(permutation_order(cycle) == 3);
  CHECK(compose(cycle, cycle) == Permutation{2, 0, 1});
  CHECK(is_identity(compose(compose(cycle, cycle), cycle)));
  CHECK(permutation_order(identity_permutation(4)) == 1);
  CHECK(permutation_order(Permutation{1, 0, 3, 4, 2}) == 6);
}
