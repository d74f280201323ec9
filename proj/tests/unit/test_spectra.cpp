#include "doctest.h"
#include "generators.hpp"

#include "esurf/spectra.hpp"

#include <algorithm>
#include <cmath>

using namespace esurf;

namespace {

// Largest distance from a point of one spectrum to its nearest unused partner
// in the other (greedy; spectra may contain exact duplicates).
double spectrum_mismatch(const VecX& a, const VecX& b) {
  std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (best < 0 || std::abs(a(i) - b(j)) < std::abs(a(i) - b(best))) best = j;
    }
    used[static_cast<std::size_t>(best)] = true;
    worst = std::max(worst, std::abs(a(i) - b(best)));
  }
  return worst;
}

// |O2| of the EP2 at O1 = 0, kappa = 1, found by bisection on the discriminant.
double ep2_omega2() {
  auto disc = [](double x) { return cubic_invariants({0.0, 0.0, x, 0.0, 1.0}).disc.real(); };
  double lo = std::sqrt(2.0 / 3.0), hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (disc(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("point classification") {
  CHECK(classify_point({1.0 / 3.0, 0.0, 2.0 * kSqrt2 / 3.0, 0.0, 1.0}).kind == PointKind::ep3);
  // Rotating the phases of the couplings keeps the point on the surface.
  const ESPoint rotated = ESPoint::from_couplings(std::polar(1.0 / 3.0, 0.8),
                                                  std::polar(2.0 * kSqrt2 / 3.0, -2.1), 1.0);
  CHECK(classify_point(rotated).kind == PointKind::ep3);
  CHECK(classify_point({0.0, 0.0, ep2_omega2(), 0.0, 1.0}).kind == PointKind::ep2);
  CHECK(classify_point({0.0, 0.0, std::sqrt(2.0 / 3.0), 0.0, 1.0}).kind == PointKind::fermi_arc_interior);
  CHECK(classify_point({0.3, 0.2, 1.5, 0.0, 1.0}).kind == PointKind::regular);
  CHECK(classify_point({1.0 / 3.0, 0.0, 2.0 * kSqrt2 / 3.0, 0.0, 0.0}).kind == PointKind::regular);
  CHECK(to_string(PointKind::ep3) == "EP3");
}

TEST_CASE("disc < 0 means purely imaginary spectrum") {
  testing::Gen gen(51);
  int seen = 0;
  for (int trial = 0; trial < 4000 && seen < 30; ++trial) {
    const ESPoint p = gen.es_point(1.0, 1.0);
    if (cubic_invariants(p).disc.real() > -1e-3) continue;
    ++seen;
    for (cplx z : eig_closed_form_3x3(p)) CHECK(std::abs(z.real()) < 1e-9);
    CHECK(classify_point(p).kind == PointKind::fermi_arc_interior);
  }
  CHECK(seen > 5);
}

TEST_CASE("ES scan") {
  const Axis q1{1.0 / 3.0, 1.0 / 3.0, 1};
  const Axis q2{0.0, 0.0, 1};
  const Axis q3{0.0, 2.0 * kSqrt2 / 3.0, 5};
  const auto rows = es_scan(q1, q2, q3, 0.0, 1.0);
  CHECK(rows.size() == 15);
  CHECK(rows.back().kind == PointKind::ep3);
  CHECK(rows.front().kind != PointKind::ep3);
}

TEST_CASE("Riemann track closes after three loops") {
  BerryLoopSpec spec;
  PathOptions opts;
  opts.steps_per_loop = 600;
  const RiemannTrack tr = riemann_track([&](double t) { return MatX(build_h_berry(spec, t)); }, opts);
  CHECK(tr.loops_to_close == 3);
  CHECK(tr.closure_residual < 1e-8);
  CHECK(tr.samples.back().theta == doctest::Approx(3.0 * kTwoPi));
}

TEST_CASE("periodic ring spectrum equals the Bloch union") {
  testing::Gen gen(52);
  for (SSH3Model model : {SSH3Model::one, SSH3Model::two}) {
    for (int trial = 0; trial < 5; ++trial) {
      SSH3Params p;
      p.model = model;
      p.t1 = gen.uniform(0.0, 1.5);
      p.t2 = gen.uniform(0.0, 1.0);
      p.w1 = gen.uniform(0.0, 1.0);
      p.w2 = gen.uniform(0.0, 1.0);
      p.gamma = gen.uniform(0.0, 1.5);
      p.cells = gen.integer(3, 12);
      p.bc = Boundary::periodic;
      CHECK(spectrum_mismatch(ssh3_chain_spectrum(p), ssh3_bloch_union(p)) < 1e-8);
    }
  }
}

TEST_CASE("skin effect in model one") {
  SSH3Params p;
  p.model = SSH3Model::one;
  p.t1 = p.gamma = 1.0;
  p.t2 = 0.25;
  p.w1 = 1.0;
  p.w2 = 0.25;
  p.bc = Boundary::open;
  const NHSEMetrics on = nhse_metrics(ssh3_chain_eigensystem(p), p.cells);
  p.gamma = 0.0;
  const NHSEMetrics off = nhse_metrics(ssh3_chain_eigensystem(p), p.cells);
  CHECK(on.boundary_weight > 0.5);
  CHECK(off.boundary_weight < 0.3);
  CHECK(on.mean_ipr > off.mean_ipr);
}

TEST_CASE("triple-coalescence measure") {
  VecX a(4);
  a << 0.0, 0.0, 0.0, 5.0;
  CHECK(ep3_measure(a) == 0.0);
  VecX b(3);
  b << 0.0, 1.0, 2.0;
  CHECK(ep3_measure(b) == doctest::Approx(2.0));
}

TEST_CASE("model two at its EP3 point") {
  SSH3Params p;
  p.model = SSH3Model::two;
  p.gamma = 1.0;
  p.t1 = 0.0;
  p.w1 = 1.0 / 3.0;
  p.t2 = 2.0 * kSqrt2 / 3.0;
  p.bc = Boundary::periodic;
  const double pbc = ep3_measure(ssh3_bloch_union(p));
  p.bc = Boundary::open;
  const double obc = ep3_measure(ssh3_chain_spectrum(p));
  CHECK(pbc < 1e-6);
  CHECK(obc > 10.0 * pbc);
  CHECK(obc > 1e-3);
}

TEST_CASE("t1 sweep rows") {
  SSH3Params p;
  p.cells = 4;
  const auto rows = ssh3_t1_sweep(p, {0.0, 1.0, 3});
  CHECK(rows.size() == 3 * 2 * 12);
}
