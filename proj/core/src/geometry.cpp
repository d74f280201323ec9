#include "esurf/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace esurf {
namespace {

double spectral_scale(const BiorthEigensystem& es) {
  const double s = es.values.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

std::string describe(const Coords3& x) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ")";
  return os.str();
}

void check_gap(const BiorthEigensystem& es, int band, double tol, double scale) {
  for (Eigen::Index n = 0; n < es.size(); ++n) {
    if (n == band) continue;
    const double gap = std::abs(es.values(band) - es.values(n));
    if (gap < tol * scale) {
      std::ostringstream os;
      os << "band " << band << " gap " << gap << " below " << tol * scale;
      throw NumericalError(ErrorCode::near_degenerate, os.str());
    }
  }
}

void finish(QGTResult& q) {
  const Eigen::Matrix3cd& chi = q.chi;
  q.g = 0.5 * (chi + chi.transpose()).real();
  q.f = (chi - chi.transpose()).imag();
}

// Right vector of `band` rescaled so that <ref_left|R> = 1, and the matching
// left vector with <L|R> = 1.
std::pair<VecX, RowVecX> gauged(const BiorthEigensystem& es, int band, const RowVecX& ref_left) {
  VecX r = es.right.col(band);
  const cplx c = (ref_left * r)(0);
  r /= c;
  RowVecX l = es.left.row(band) * c;
  return {r, l};
}

}  // namespace

ESPoint sphere_point(double radius, double kappa, const Coords3& x) {
  const cplx o1 = radius * std::cos(x[0]) * std::polar(1.0, x[1]);
  const cplx o2 = radius * std::sin(x[0]) * std::polar(1.0, x[2]);
  return ESPoint::from_couplings(o1, o2, kappa);
}

Chart3 sphere_chart(double radius, double kappa) {
  Chart3 c;
  c.names = {"alpha", "beta", "phi"};
  c.h = [radius, kappa](const Coords3& x) -> MatX {
    return build_h_es(sphere_point(radius, kappa, x));
  };
  c.dh = [radius](const Coords3& x) -> std::array<MatX, 3> {
    const double ca = std::cos(x[0]), sa = std::sin(x[0]);
    const double cb = std::cos(x[1]), sb = std::sin(x[1]);
    const double cf = std::cos(x[2]), sf = std::sin(x[2]);
    const Mat3& l1 = dh_es(Direction::q1);
    const Mat3& l2 = dh_es(Direction::q2);
    const Mat3& l6 = dh_es(Direction::q3);
    const Mat3& l7 = dh_es(Direction::q4);
    std::array<MatX, 3> d;
    d[0] = radius * (-sa * (cb * l1 + sb * l2) + ca * (cf * l6 + sf * l7));
    d[1] = radius * ca * (-sb * l1 + cb * l2);
    d[2] = radius * sa * (-sf * l6 + cf * l7);
    return d;
  };
  return c;
}

QGTResult qgt_sum(const BiorthEigensystem& es, const std::array<MatX, 3>& dh, int band,
                  const QGTOptions& options) {
  const Eigen::Index n = es.size();
  if (band < 0 || band >= n) {
    throw NumericalError(ErrorCode::invalid_argument, "band index out of range");
  }
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(es.values(i)));
  check_gap(es, band, options.gap_tol, scale > 0.0 ? scale : 1.0);

  // a[m](k) = <L_b|d_m H|R_k>, c[m](k) = <L_k|d_m H|R_b>
  std::array<RowVecX, 3> a;
  std::array<VecX, 3> c;
  for (int m = 0; m < 3; ++m) {
    a[m] = es.left.row(band) * dh[m] * es.right;
    c[m] = es.left * dh[m] * es.right.col(band);
  }
  QGTResult q;
  q.band = band;
  for (int mu = 0; mu < 3; ++mu) {
    for (int nu = 0; nu < 3; ++nu) {
      cplx s = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == band) continue;
        const cplx de = es.values(band) - es.values(k);
        if (options.verbatim_abs) {
          s += std::abs(a[mu](k)) * std::abs(a[nu](k)) / (de * de);
        } else {
          s += a[mu](k) * c[nu](k) / (de * de);
        }
      }
      q.chi(mu, nu) = s;
    }
  }
  finish(q);
  return q;
}

QGTResult qgt_sum(const Chart3& chart, const Coords3& x, int band, const QGTOptions& options) {
  const MatX h = chart.h(x);
  const BiorthEigensystem es = eig_biorthogonal(h, options.eig);
  QGTResult q = qgt_sum(es, chart.dh(x), band, options);
  q.at = x;
  return q;
}

QGTResult qgt_fd(const Chart3& chart, const Coords3& x, int band, double h,
                 const QGTOptions& options) {
  const MatX h0 = chart.h(x);
  const BiorthEigensystem es0 = eig_biorthogonal(h0, options.eig);
  if (band < 0 || band >= es0.size()) {
    throw NumericalError(ErrorCode::invalid_argument, "band index out of range");
  }
  check_gap(es0, band, options.gap_tol, spectral_scale(es0));
  const RowVecX ref_left = es0.left.row(band);

  std::array<VecX, 3> dr;
  std::array<RowVecX, 3> dl;
  for (int m = 0; m < 3; ++m) {
    std::array<VecX, 2> r;
    std::array<RowVecX, 2> l;
    for (int side = 0; side < 2; ++side) {
      Coords3 y = x;
      y[static_cast<std::size_t>(m)] += side == 0 ? h : -h;
      BiorthEigensystem es;
      Permutation perm;
      try {
        es = eig_biorthogonal(chart.h(y), options.eig);
        perm = match_bands(es0, es);
      } catch (const NumericalError& e) {
        throw NumericalError(ErrorCode::stencil_crosses_ep,
                             "at " + describe(x) + ": " + e.what());
      }
      const int b = perm[static_cast<std::size_t>(band)];
      const double jump = std::abs(es.values(b) - es0.values(band));
      const double gap = [&] {
        double g = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < es0.size(); ++k) {
          if (k != band) g = std::min(g, std::abs(es0.values(k) - es0.values(band)));
        }
        return g;
      }();
      if (jump > 0.5 * gap) {
        throw NumericalError(ErrorCode::stencil_crosses_ep,
                             "band jump inside stencil at " + describe(x));
      }
      std::tie(r[static_cast<std::size_t>(side)], l[static_cast<std::size_t>(side)]) =
          gauged(es, b, ref_left);
    }
    dr[static_cast<std::size_t>(m)] = (r[0] - r[1]) / (2.0 * h);
    dl[static_cast<std::size_t>(m)] = (l[0] - l[1]) / (2.0 * h);
  }
  const auto [r0, l0] = gauged(es0, band, ref_left);
  const MatX proj = MatX::Identity(h0.rows(), h0.cols()) - r0 * l0;

  QGTResult q;
  q.band = band;
  q.at = x;
  for (int mu = 0; mu < 3; ++mu) {
    for (int nu = 0; nu < 3; ++nu) {
      q.chi(mu, nu) = (dl[static_cast<std::size_t>(mu)] * proj * dr[static_cast<std::size_t>(nu)])(0);
    }
  }
  finish(q);
  return q;
}

ThreeForm three_form(const QGTResult& q, double negative_tol) {
  ThreeForm t;
  t.det_g = q.g.determinant();
  if (t.det_g < -negative_tol) {
    std::ostringstream os;
    os << "det g = " << t.det_g << " at " << describe(q.at);
    throw NumericalError(ErrorCode::negative_determinant, os.str());
  }
  t.m_metric = 4.0 * std::sqrt(std::max(t.det_g, 0.0));
  t.m_curv_paper = -0.5 * (q.f(0, 1) + q.f(2, 0));
  t.m_curv_sym = -0.5 * (q.f(0, 1) + q.f(1, 2) + q.f(2, 0));
  return t;
}

}  // namespace esurf
