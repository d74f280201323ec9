// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "esurf/bessel.hpp"
#include "esurf/dynamics.hpp"
#include "esurf/eigensystem.hpp"
#include "esurf/geometry.hpp"
#include "esurf/invariants.hpp"
#include "esurf/spectra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace esurf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Report {
  std::ostringstream os;
  bool ok = true;

  template <class T>
  Report& add(const std::string& name, T value, bool pass) {
    os << name << "=" << value << (pass ? "" : "(!)") << " ";
    ok = ok && pass;
    return *this;
  }

  Outcome done() const { return {ok, os.str()}; }
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ESPoint random_point(std::mt19937_64& rng, double kappa) {
  return {uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2), kappa};
}

double min_gap(const VecX& v) {
  double g = 1e300;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (Eigen::Index j = i + 1; j < v.size(); ++j) g = std::min(g, std::abs(v(i) - v(j)));
  return g;
}

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

VecX as_vec(const std::array<cplx, 3>& r) { return Eigen::Map<const VecX>(r.data(), 3); }

Outcome a1() {
  const ESPoint p{1.0 / 3.0, 0.0, 2.0 * kSqrt2 / 3.0, 0.0, 1.0};
  const auto e = eig_closed_form_3x3(p);
  double spread = 0.0;
  for (cplx a : e)
    for (cplx b : e) spread = std::max(spread, std::abs(a - b));
  const PointKind kind = classify_point(p).kind;
  Report r;
  r.add("max_pairwise", spread, spread < 1e-9)
      .add("max_abs", std::max({std::abs(e[0]), std::abs(e[1]), std::abs(e[2])}), true)
      .add("class", to_string(kind), kind == PointKind::ep3);
  return r.done();
}

Outcome a2() {
  std::mt19937_64 rng(2002);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ESPoint p = random_point(rng, 0.0);
    const double s = std::sqrt(std::norm(p.omega1()) + std::norm(p.omega2()));
    VecX want(3);
    want << -s, 0.0, s;
    worst = std::max(worst, spectrum_mismatch(eig_biorthogonal(build_h_es(p)).values, want));
    worst = std::max(worst, spectrum_mismatch(as_vec(eig_closed_form_3x3(p)), want));
  }
  Report r;
  r.add("max_err", worst, worst < 1e-10);
  return r.done();
}

Outcome a3() {
  struct Case {
    const char* name;
    double radius, kappa, want, tol;
  };
  const Case cases[] = {{"k0_R1", 1.0, 0.0, 1.0, 0.01},
                        {"k1_ratio8", 8.0, 1.0, 1.0, 0.05},
                        {"k1_ratio0.5", 0.5, 1.0, 0.0, 0.02}};
  Report r;
  for (const auto& c : cases) {
    DDRequest req;
    req.radius = c.radius;
    req.kappa = c.kappa;
    const double coarse = dd_invariant(req).dd;
    req.n_alpha = req.n_beta = req.n_phi = 96;
    const double fine = dd_invariant(req).dd;
    r.add(std::string(c.name) + "_dd96", fine, std::abs(fine - c.want) <= c.tol);
    r.add(std::string(c.name) + "_drift", std::abs(fine - coarse), std::abs(fine - coarse) < 0.01);
  }
  return r.done();
}

Outcome a4() {
  BerryLoopSpec nested;
  const BraidResult a = berry_phase(nested);
  BerryLoopSpec outer;
  outer.offset = outer.radius + 1.5 * kExceptionalRingRadius;
  const BraidResult b = berry_phase(outer);
  const Permutation per_loop = a.permutation;
  Report r;
  r.add("nested_phase/2pi", a.phase / kTwoPi, std::abs(a.phase / kTwoPi - 1.0) <= 0.01)
      .add("nested_order", permutation_order(per_loop), permutation_order(per_loop) == 3)
      .add("nested_loops", a.loops_to_close, a.loops_to_close == 3)
      .add("outer_phase/2pi", b.phase / kTwoPi, std::abs(b.phase / kTwoPi) <= 0.01)
      .add("outer_identity", is_identity(b.permutation), is_identity(b.permutation));
  return r.done();
}

Outcome a5() {
  BerryLoopSpec tmpl;
  const double step = 0.1;
  std::vector<double> deltas;
  for (int i = 0; i <= 10; ++i) deltas.push_back(tmpl.radius + (0.5 + step * i) * kExceptionalRingRadius);
  const auto rows = berry_transition_sweep(deltas, tmpl);
  const auto bracket = locate_transition(rows);
  Report r;
  if (!bracket) {
    r.add("bracket", "none", false);
    return r.done();
  }
  std::ostringstream b;
  b << "[" << bracket->first << "," << bracket->second << "]";
  const bool within = bracket->first >= 1.0 - step - 1e-9 && bracket->second <= 1.0 + step + 1e-9;
  r.add("bracket", b.str(), within);
  return r.done();
}

Outcome a6() {
  TwoLevelLoopSpec nested;
  const BraidResult a = berry_phase(nested);
  TwoLevelLoopSpec outer;
  outer.offset = 2.5;
  const BraidResult b = berry_phase(outer);
  Report r;
  r.add("nested_phase/pi", a.phase / kPi, std::abs(a.phase / kPi - 1.0) <= 0.01)
      .add("nested_loops", a.loops_to_close, a.loops_to_close == 2)
      .add("outer_phase/pi", b.phase / kPi, std::abs(b.phase / kPi) <= 0.01);
  return r.done();
}

Outcome a7() {
  std::mt19937_64 rng(2007);
  Report r;
  for (double kappa : {0.0, 1.0}) {
    double worst = 0.0;
    int done = 0, skipped = 0;
    while (done < 1000) {
      const double radius = uniform(rng, 0.3, 4.0);
      const Chart3 chart = sphere_chart(radius, kappa);
      const Coords3 x{uniform(rng, 0.05, kPi / 2 - 0.05), uniform(rng, 0, kTwoPi), uniform(rng, 0, kTwoPi)};
      const MatX h = chart.h(x);
      const BiorthEigensystem es = eig_biorthogonal(h);
      if (min_gap(es.values) < 0.05 * h.norm()) {
        ++skipped;
        continue;
      }
      const int band = done % 3;
      const QGTResult s = qgt_sum(chart, x, band);
      const QGTResult f = qgt_fd(chart, x, band, 1e-5);
      worst = std::max(worst, (s.chi - f.chi).norm() / s.chi.norm());
      ++done;
    }
    std::ostringstream name;
    name << "k" << kappa << "_max_rel";
    r.add(name.str(), worst, worst < 1e-6);
    r.add(name.str().substr(0, 2) + "_skipped", skipped, true);
  }
  return r.done();
}

Outcome a8() {
  Report r;
  for (SSH3Model model : {SSH3Model::one, SSH3Model::two}) {
    SSH3Params p;
    p.model = model;
    p.t1 = 0.8;
    p.cells = 10;
    p.bc = Boundary::periodic;
    const double err = spectrum_mismatch(ssh3_chain_spectrum(p), ssh3_bloch_union(p));
    r.add(model == SSH3Model::one ? "ring_vs_bloch_1" : "ring_vs_bloch_2", err, err < 1e-8);
  }
  SSH3Params one;
  one.model = SSH3Model::one;
  one.gamma = one.t1 = 1.0;
  one.t2 = 0.25;
  one.w1 = 1.0;
  one.w2 = 0.25;
  one.bc = Boundary::open;
  const double bw = nhse_metrics(ssh3_chain_eigensystem(one), one.cells).boundary_weight;
  one.gamma = 0.0;
  const double bw0 = nhse_metrics(ssh3_chain_eigensystem(one), one.cells).boundary_weight;
  r.add("boundary_weight", bw, bw > 0.5).add("control_weight", bw0, bw0 < 0.3);

  SSH3Params two;
  two.model = SSH3Model::two;
  two.gamma = 1.0;
  two.t1 = 0.0;
  two.w1 = 1.0 / 3.0;
  two.t2 = 2.0 * kSqrt2 / 3.0;
  two.bc = Boundary::periodic;
  const double pbc = ep3_measure(ssh3_bloch_union(two));
  two.bc = Boundary::open;
  const double obc = ep3_measure(ssh3_chain_spectrum(two));
  r.add("pbc_measure", pbc, pbc < 1e-6).add("obc_measure", obc, obc >= 10.0 * pbc);
  return r.done();
}

Outcome a9() {
  Report r;
  std::mt19937_64 rng(2009);
  auto random_dissipative = [&] {
    Mat3 a, k;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        a(i, j) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
        k(i, j) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
      }
    return Mat3(0.5 * (k + k.adjoint()) - cplx(0.0, 0.3) * a * a.adjoint());
  };
  std::vector<double> times;
  for (int i = 0; i <= 10; ++i) times.push_back(0.2 * i);

  double expm_err = 0.0, norm_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Mat3 h = random_dissipative();
    const VecX psi0 = VecX::Unit(3, trial % 3);
    const Trajectory tr = evolve_conditional(h, psi0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const VecX want = Mat3(cplx(0.0, -times[i]) * h).exp() * psi0;
      expm_err = std::max(expm_err, (tr.states[i] - want).norm());
      norm_err = std::max(norm_err, std::abs(tr.norm[i] * tr.norm[i] + tr.jump_probability[i] - 1.0));
    }
  }
  r.add("expm_err", expm_err, expm_err < 1e-8).add("norm_identity_err", norm_err, norm_err < 1e-6);

  CircuitParams base;
  const double kappa = es_kappa(base.kappa_d2);
  BerryLoopSpec loop;
  const double omega2 = kappa * loop.q3(0.0), q_perp = kappa * loop.q_perp(0.0);
  const CircuitParams c = schedule_point(base, kappa / 3.0, omega2, q_perp);
  std::vector<double> fine;
  for (int i = 0; i <= 200; ++i) fine.push_back(0.2 * i / 200);
  const Trajectory lab = evolve_lab_frame(c, VecX::Unit(kLabDim, kE00), fine, LabMode::nojump);
  const Trajectory eff = evolve_conditional(
      conditional_hamiltonian(kappa / 3.0, omega2, base.kappa_d2, q_perp), VecX::Unit(3, 1), fine);
  double sum = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const auto& a = lab.populations[i];
    const auto& b = eff.populations[i];
    sum += std::pow(a.e00 - b.e00, 2) + std::pow(a.g10 - b.g10, 2) + std::pow(a.g01 - b.g01, 2);
  }
  const double rms = std::sqrt(sum / (3.0 * fine.size()));
  r.add("lab_vs_effective_rms", rms, rms < 0.05);

  double fit_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Mat3 h = random_dissipative();
    FitOptions fo;
    fo.n_base = 5;
    const auto ft = fit_sample_times(fo);
    std::array<std::vector<Vec3>, 3> data;
    for (int col = 0; col < 3; ++col) {
      for (const auto& s : evolve_conditional(h, VecX::Unit(3, col), ft).states)
        data[static_cast<std::size_t>(col)].push_back(s);
    }
    const VecX got = fit_eigensystem(data, fo).system.values;
    const VecX want = eig_biorthogonal(h).values;
    fit_err = std::max(fit_err, spectrum_mismatch(got, want) / want.cwiseAbs().maxCoeff());
  }
  r.add("fit_roundtrip_rel", fit_err, fit_err < 1e-6);

  ExperimentOptions eo;
  const ExperimentResult ex = berry_phase_experiment(base, loop, eo);
  const double ratio = ex.braid.phase / kTwoPi;
  r.add("pipeline_phase/2pi", ratio, std::abs(ratio - 1.0) <= 0.02)
      .add("pipeline_loops", ex.braid.loops_to_close, ex.braid.loops_to_close == 3);
  return r.done();
}

Outcome a10() {
  std::mt19937_64 rng(2010);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const ESPoint p = random_point(rng, uniform(rng, 0.0, 2.0));
    const Mat3 h = build_h_es(p);
    const Eigen::ComplexEigenSolver<Mat3> es(h, false);
    worst = std::max(worst, spectrum_mismatch(as_vec(eig_closed_form_3x3(p)), es.eigenvalues()));
  }
  Report r;
  r.add("max_err", worst, worst < 1e-9);
  return r.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%-4s %s  %s[%.1fs]\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
