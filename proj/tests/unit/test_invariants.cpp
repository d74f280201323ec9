#include "doctest.h"
#include "generators.hpp"

#include "esurf/invariants.hpp"

#include <cmath>

using namespace esurf;

namespace {

DDRequest small_grid(double radius, double kappa, int n = 16) {
  DDRequest r;
  r.radius = radius;
  r.kappa = kappa;
  r.n_alpha = r.n_beta = r.n_phi = n;
  return r;
}

}  // namespace

TEST_CASE("ES distance") {
  CHECK(es_distance(1.0) == doctest::Approx(1.0));
  CHECK(es_distance(2.5) == doctest::Approx(2.5));
}

TEST_CASE("band plan follows the discriminant profile") {
  CHECK(dd_band_plan(1.0, 0.0).policy == BandPolicy::lowest_real);
  const DDBandPlan far = dd_band_plan(8.0, 1.0);
  CHECK_FALSE(far.touches_ep3);
  CHECK(far.policy == BandPolicy::lowest_real);
  const DDBandPlan inner = dd_band_plan(0.5, 1.0);
  CHECK_FALSE(inner.touches_ep3);
  CHECK(dd_band_plan(1.0, 1.0).touches_ep3);
}

TEST_CASE("Hermitian DD is one for any radius") {
  const DDResult a = dd_invariant(small_grid(1.0, 0.0, 24));
  CHECK(std::abs(a.dd - 1.0) < 0.02);
  const DDResult b = dd_invariant(small_grid(3.0, 0.0, 24));
  CHECK(std::abs(a.dd - b.dd) < 1e-10);
  CHECK(a.negative_det_nodes == 0);
}

TEST_CASE("DD is invariant under joint rescaling of radius and kappa") {
  testing::Gen gen(41);
  for (int trial = 0; trial < 3; ++trial) {
    const double ratio = trial == 0 ? 0.5 : gen.uniform(2.0, 8.0);
    const double s = gen.uniform(0.3, 3.0);
    const DDResult a = dd_invariant(small_grid(ratio, 1.0, 12));
    const DDResult b = dd_invariant(small_grid(ratio * s, s, 12));
    CHECK(std::abs(a.dd - b.dd) < 1e-9);
    CHECK(a.ratio == doctest::Approx(ratio));
  }
}

TEST_CASE("DD near and far from the exceptional surface") {
  CHECK(std::abs(dd_invariant(small_grid(8.0, 1.0, 24)).dd - 1.0) < 0.05);
  CHECK(std::abs(dd_invariant(small_grid(0.5, 1.0, 24)).dd) < 0.02);
  CHECK_THROWS_AS(dd_invariant(small_grid(1.0, 1.0)), NumericalError);
}

TEST_CASE("DD sweep flags the sphere through the EP3 manifold") {
  const auto rows = dd_sweep({0.5, 1.0, 8.0}, small_grid(1.0, 1.0, 12));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].status == "Ill-Defined");
  CHECK(rows[2].status == "ok");
}

TEST_CASE("nested loop: 2 pi over three loops") {
  BerryLoopSpec spec;
  const BraidResult r = berry_phase(spec);
  CHECK(std::abs(r.phase / kTwoPi - 1.0) < 0.01);
  CHECK(r.loops_to_close == 3);
  CHECK(permutation_order(r.permutation) == 3);
}

TEST_CASE("non-nested loop: zero phase, identity braid") {
  BerryLoopSpec spec;
  spec.offset = spec.radius + 1.5 * kExceptionalRingRadius;
  const BraidResult r = berry_phase(spec);
  CHECK(std::abs(r.phase) < 0.01 * kTwoPi);
  CHECK(r.loops_to_close == 1);
  CHECK(is_identity(r.permutation));
}

TEST_CASE("Berry phase mod 2 pi is unchanged by a fixed similarity transform") {
  testing::Gen gen(42);
  BerryLoopSpec spec;
  spec.steps_per_loop = 600;
  PathOptions opts;
  opts.steps_per_loop = 600;
  const double base = berry_phase([&](double t) { return MatX(build_h_berry(spec, t)); }, opts).phase;
  for (int trial = 0; trial < 3; ++trial) {
    const MatX s = gen.unitary(3) + 0.3 * gen.matrix(3);
    const MatX si = s.inverse();
    const auto family = [&](double t) { return MatX(s * build_h_berry(spec, t) * si); };
    const double diff = std::remainder(berry_phase(family, opts).phase - base, kTwoPi);
    CHECK(std::abs(diff) < 1e-6);
  }
}

TEST_CASE("closure needs enough loops") {
  PathOptions opts;
  opts.steps_per_loop = 400;
  opts.max_loops = 2;
  BerryLoopSpec spec;
  const TrackedLoop track = track_loop([&](double t) { return MatX(build_h_berry(spec, t)); }, opts);
  CHECK_THROWS_AS(braid_from_track(track, 0, 2), NumericalError);
  CHECK_NOTHROW(braid_from_track(track, 0, 3));
}

TEST_CASE("two-level control loop") {
  TwoLevelLoopSpec nested;
  const BraidResult a = berry_phase(nested);
  CHECK(std::abs(a.phase / kPi - 1.0) < 0.01);
  CHECK(a.loops_to_close == 2);
  TwoLevelLoopSpec outside;
  outside.offset = 2.5;
  const BraidResult b = berry_phase(outside);
  CHECK(std::abs(b.phase) < 0.01 * kPi);
  CHECK(b.loops_to_close == 1);
}

TEST_CASE("loop through the exceptional ring is rejected") {
  BerryLoopSpec spec;
  spec.offset = spec.radius + kExceptionalRingRadius;
  CHECK_THROWS_AS(berry_phase(spec), NumericalError);
}

TEST_CASE("transition sweep brackets the ring crossing") {
  BerryLoopSpec tmpl;
  tmpl.steps_per_loop = 1000;
  std::vector<double> deltas;
  for (double ratio : {0.6, 0.8, 1.2, 1.4}) deltas.push_back(tmpl.radius + ratio * kExceptionalRingRadius);
  const auto rows = berry_transition_sweep(deltas, tmpl);
  const auto bracket = locate_transition(rows);
  REQUIRE(bracket.has_value());
  CHECK(bracket->first == doctest::Approx(0.8));
  CHECK(bracket->second == doctest::Approx(1.2));
}

TEST_CASE("spectral winding") {
  SSH3Params p;
  p.model = SSH3Model::one;
  p.t1 = p.gamma = 1.0;
  const WindingResult in = spectral_winding(p, {0.1, 0.05}, 256);
  CHECK(std::abs(in.winding - std::round(in.winding)) < 1e-9);
  CHECK(std::abs(std::round(in.winding)) >= 1.0);
  const WindingResult out = spectral_winding(p, {100.0, 0.0}, 256);
  CHECK(std::abs(out.winding) < 1e-9);
  CHECK_THROWS_AS(spectral_winding(p, 0.0, 256), NumericalError);
}
