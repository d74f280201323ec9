#include "esurf/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace esurf {
namespace {

VecX closed_form_values(const Mat3& h) {
  const auto e = eig_closed_form_3x3(h);
  return Eigen::Map<const VecX>(e.data(), 3);
}

bool re_im_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::ep3: return "EP3";
    case PointKind::ep2: return "EP2";
    case PointKind::fermi_arc_interior: return "FermiArcInterior";
    case PointKind::regular: return "Regular";
  }
  return "Regular";
}

PointClass classify_point(const ESPoint& p, double tol) {
  PointClass c;
  const double o1 = std::abs(p.omega1());
  const double o2 = std::abs(p.omega2());
  const double k = std::abs(p.kappa);
  const CubicInvariants inv = cubic_invariants(p);
  c.disc = inv.disc.real();
  c.b = inv.b;
  c.omega1_residual = std::abs(o1 - k / 3.0);
  c.omega2_residual = std::abs(o2 - 2.0 * kSqrt2 * k / 3.0);
  c.scale = std::sqrt(o1 * o1 + o2 * o2 + k * k);
  const auto e = eig_closed_form_3x3(p);
  double lo = e[0].real(), hi = e[0].real();
  for (const cplx& v : e) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  c.re_spread = hi - lo;
  if (k == 0.0 || c.scale == 0.0) return c;

  const double s = c.scale;
  if (c.omega1_residual < tol * s && c.omega2_residual < tol * s) {
    c.kind = PointKind::ep3;
  } else if (std::abs(c.disc) < tol * std::pow(s, 6)) {
    c.kind = PointKind::ep2;
  } else if (c.re_spread < tol * s) {
    c.kind = PointKind::fermi_arc_interior;
  }
  return c;
}

std::vector<ScanRow> es_scan(const Axis& q1, const Axis& q2, const Axis& q3, double q4,
                             double kappa, double tol) {
  std::vector<ScanRow> rows;
  rows.reserve(static_cast<std::size_t>(q1.n) * q2.n * q3.n * 3);
  for (int i = 0; i < q1.n; ++i) {
    for (int j = 0; j < q2.n; ++j) {
      for (int l = 0; l < q3.n; ++l) {
        const ESPoint p{q1.at(i), q2.at(j), q3.at(l), q4, kappa};
        auto e = eig_closed_form_3x3(p);
        std::sort(e.begin(), e.end(), re_im_less);
        const PointKind kind = classify_point(p, tol).kind;
        for (int b = 0; b < 3; ++b) rows.push_back({p, b, e[static_cast<std::size_t>(b)], kind});
      }
    }
  }
  return rows;
}

RiemannTrack riemann_track(const MatrixFamily& family, const PathOptions& options) {
  const TrackedLoop t = track_loop(family, options);
  RiemannTrack r;
  r.permutation = t.per_loop;
  const int order = permutation_order(t.per_loop);
  if (order > options.max_loops) {
    throw NumericalError(ErrorCode::no_closure,
                         "band permutation has order " + std::to_string(order));
  }
  r.loops_to_close = order;
  const int n = static_cast<int>(t.frames.front().size());
  const std::size_t steps = t.frames.size();
  for (int band = 0; band < n; ++band) {
    int cur = band;
    int before_end = band;
    for (int loop = 0; loop < order; ++loop) {
      for (std::size_t i = 0; i < steps; ++i) {
        r.samples.push_back({t.thetas[i] + kTwoPi * loop, band, t.frames[i].values(cur)});
        before_end = cur;
        cur = t.steps[i][static_cast<std::size_t>(cur)];
      }
    }
    // Continue the last sample onto a fresh evaluation at the end of the lift.
    const BiorthEigensystem end = eig_biorthogonal(family(kTwoPi * order), options.eig);
    const Permutation to_end = match_bands(t.frames.back(), end);
    const cplx e_end = end.values(to_end[static_cast<std::size_t>(before_end)]);
    r.samples.push_back({kTwoPi * order, band, e_end});
    r.closure_residual =
        std::max(r.closure_residual, std::abs(e_end - t.frames.front().values(band)));
  }
  return r;
}

VecX ssh3_bloch_union(const SSH3Params& p) {
  const auto ks = ssh3_momenta(p.cells);
  VecX out(3 * static_cast<Eigen::Index>(ks.size()));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out.segment<3>(3 * static_cast<Eigen::Index>(i)) = closed_form_values(build_ssh3_bloch(p, ks[i]));
  }
  return out;
}

VecX ssh3_chain_spectrum(const SSH3Params& p) {
  Eigen::ComplexEigenSolver<MatX> solver(build_ssh3_chain(p), false);
  return solver.eigenvalues();
}

ChainEigensystem ssh3_chain_eigensystem(const SSH3Params& p) {
  Eigen::ComplexEigenSolver<MatX> solver(build_ssh3_chain(p), true);
  ChainEigensystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index n = 0; n < out.right.cols(); ++n) out.right.col(n).normalize();
  return out;
}

std::vector<SSH3SweepRow> ssh3_t1_sweep(const SSH3Params& p, const Axis& t1) {
  std::vector<SSH3SweepRow> rows;
  for (int i = 0; i < t1.n; ++i) {
    SSH3Params q = p;
    q.t1 = t1.at(i);
    for (const Boundary bc : {Boundary::periodic, Boundary::open}) {
      q.bc = bc;
      VecX v = bc == Boundary::periodic ? ssh3_bloch_union(q) : ssh3_chain_spectrum(q);
      std::sort(v.begin(), v.end(), re_im_less);
      for (Eigen::Index n = 0; n < v.size(); ++n) {
        rows.push_back({q.t1, bc, static_cast<int>(n), v(n)});
      }
    }
  }
  return rows;
}

NHSEMetrics nhse_metrics(const ChainEigensystem& es, int cells) {
  NHSEMetrics m;
  const Eigen::Index dim = es.right.rows();
  const Eigen::Index count = es.right.cols();
  if (count == 0 || cells < 1 || dim != 3 * cells) {
    throw NumericalError(ErrorCode::invalid_argument, "eigenvectors do not match the chain size");
  }
  for (Eigen::Index n = 0; n < count; ++n) {
    const Eigen::VectorXd w = es.right.col(n).cwiseAbs2() / es.right.col(n).squaredNorm();
    double edge = w.head<3>().sum();
    if (cells > 1) edge += w.tail<3>().sum();
    m.boundary_weight += edge;
    m.mean_ipr += w.cwiseAbs2().sum();
  }
  m.boundary_weight /= static_cast<double>(count);
  m.mean_ipr /= static_cast<double>(count);
  return m;
}

double ep3_measure(const VecX& spectrum) {
  const Eigen::Index n = spectrum.size();
  if (n < 3) throw NumericalError(ErrorCode::invalid_argument, "need at least three eigenvalues");
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Eigen::Index>> d(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] = {std::abs(spectrum(i) - spectrum(j)), j};
    d[static_cast<std::size_t>(i)].first = std::numeric_limits<double>::infinity();
    std::partial_sort(d.begin(), d.begin() + 2, d.end());
    const cplx a = spectrum(d[0].second), b = spectrum(d[1].second);
    const double diam = std::max({d[0].first, d[1].first, std::abs(a - b)});
    best = std::min(best, diam);
  }
  return best;
}

}  // namespace esurf
