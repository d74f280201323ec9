#include "esurf/eigensystem.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace esurf {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Rounding floor, in units of eps * scale^k, below which a polynomial
// coefficient is indistinguishable from zero.
constexpr double kSnapFactor = 64.0;

cplx cube_root(cplx z) {
  if (z == cplx(0.0)) return 0.0;
  return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

cplx polish_root(cplx e, cplx p, cplx q) {
  auto f = [&](cplx x) { return (x * x + p) * x + q; };
  cplx fe = f(e);
  for (int it = 0; it < 3; ++it) {
    const cplx df = 3.0 * e * e + p;
    if (std::abs(df) == 0.0) break;
    const cplx cand = e - fe / df;
    const cplx fc = f(cand);
    if (!(std::abs(fc) < std::abs(fe))) break;
    e = cand;
    fe = fc;
  }
  return e;
}

// Dense Hungarian algorithm (rows assigned to columns), O(n^3).
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n);
  for (int j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

struct Assignment {
  Permutation perm;
  double cost = 0.0;
  double overlap = 0.0;
};

// Shared assignment logic. `overlap` may be empty (no tie-break available).
Permutation solve_assignment(const Eigen::MatrixXd& cost, const Eigen::MatrixXd& overlap,
                             double tol) {
  const int n = static_cast<int>(cost.rows());
  const bool have_overlap = overlap.size() > 0;
  auto score = [&](const Permutation& perm) {
    Assignment a{perm, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      a.cost += cost(i, perm[static_cast<std::size_t>(i)]);
      if (have_overlap) a.overlap += overlap(i, perm[static_cast<std::size_t>(i)]);
    }
    return a;
  };

  if (n <= 6) {
    Permutation perm = identity_permutation(n);
    std::vector<Assignment> all;
    do {
      all.push_back(score(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double best_cost =
        std::min_element(all.begin(), all.end(), [](const auto& x, const auto& y) {
          return x.cost < y.cost;
        })->cost;
    std::vector<const Assignment*> ties;
    for (const auto& a : all) {
      if (a.cost - best_cost < tol) ties.push_back(&a);
    }
    std::sort(ties.begin(), ties.end(),
              [](const Assignment* x, const Assignment* y) { return x->overlap > y->overlap; });
    if (ties.size() > 1 && (!have_overlap || ties[0]->overlap - ties[1]->overlap < tol)) {
      throw NumericalError(ErrorCode::ambiguous_match,
                           "two band assignments tie in eigenvalue distance and overlap");
    }
    return ties.front()->perm;
  }

  Permutation perm = hungarian(cost);
  // Resolve near-ties among pairs of swapped partners by overlap.
  bool changed = true;
  int sweeps = 0;
  while (changed && sweeps++ < n) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int pi = perm[static_cast<std::size_t>(i)];
        const int pj = perm[static_cast<std::size_t>(j)];
        const double now = cost(i, pi) + cost(j, pj);
        const double swapped = cost(i, pj) + cost(j, pi);
        if (std::abs(now - swapped) >= tol) continue;
        if (!have_overlap) {
          throw NumericalError(ErrorCode::ambiguous_match, "tied eigenvalue assignment");
        }
        const double o_now = overlap(i, pi) + overlap(j, pj);
        const double o_swapped = overlap(i, pj) + overlap(j, pi);
        if (std::abs(o_now - o_swapped) < tol) {
          throw NumericalError(ErrorCode::ambiguous_match,
                               "two band assignments tie in eigenvalue distance and overlap");
        }
        if (o_swapped > o_now) {
          std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
          changed = true;
        }
      }
    }
  }
  return perm;
}

Eigen::MatrixXd distance_matrix(const VecX& a, const VecX& b) {
  Eigen::MatrixXd d(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) d(i, j) = std::abs(a(i) - b(j));
  }
  return d;
}

}  // namespace

CubicInvariants cubic_invariants(const ESPoint& p) {
  const double o1 = std::norm(p.omega1());
  const double o2 = std::norm(p.omega2());
  const double k2 = p.kappa * p.kappa;
  CubicInvariants c;
  c.a = 6.0 * o1 - 3.0 * o2 + 2.0 * k2;
  c.b = o1 + o2 - k2;
  c.det = kI * p.kappa * c.a / (3.0 * kSqrt3);
  c.disc = 4.0 * c.b * c.b * c.b + k2 * c.a * c.a;
  c.paper_c = std::sqrt(cplx(4.0 * c.b * c.b * c.b - c.a * c.a));
  return c;
}

std::array<cplx, 3> solve_depressed_cubic(cplx p, cplx q, double scale) {
  const double s = std::max(scale, std::numeric_limits<double>::min());
  if (std::abs(p) <= kSnapFactor * kEps * s * s) p = 0.0;
  if (std::abs(q) <= kSnapFactor * kEps * s * s * s) q = 0.0;
  if (p == cplx(0.0) && q == cplx(0.0)) return {cplx(0.0), cplx(0.0), cplx(0.0)};

  const cplx root_d = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  const cplx u3a = -q / 2.0 + root_d;
  const cplx u3b = -q / 2.0 - root_d;
  const cplx u3 = std::abs(u3a) >= std::abs(u3b) ? u3a : u3b;
  const cplx u = cube_root(u3);
  const cplx v = -p / (3.0 * u);
  const cplx w = std::polar(1.0, kTwoPi / 3.0);
  const cplx w2 = std::conj(w);
  std::array<cplx, 3> roots{u + v, u * w + v * w2, u * w2 + v * w};
  for (auto& r : roots) r = polish_root(r, p, q);
  return roots;
}

std::array<cplx, 3> eig_closed_form_3x3(const ESPoint& p) {
  const auto inv = cubic_invariants(p);
  const double scale = std::sqrt(std::norm(p.omega1()) + std::norm(p.omega2()) + p.kappa * p.kappa);
  // det(E - H) = E^3 - B E - det H
  auto roots = solve_depressed_cubic(-inv.b, -inv.det, scale);
  if (p.kappa == 0.0) {
    for (auto& r : roots) r = r.real();  // Hermitian
  }
  return roots;
}

std::array<cplx, 3> eig_closed_form_3x3(const Mat3& h) {
  const cplx shift = h.trace() / 3.0;
  const Mat3 m = h - shift * Mat3::Identity();
  const cplx sigma2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                      m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  const cplx det = m.determinant();
  auto roots = solve_depressed_cubic(sigma2, -det, m.norm());
  for (auto& r : roots) r += shift;
  return roots;
}

BiorthEigensystem eig_biorthogonal(const MatX& h, const EigOptions& options) {
  if (h.rows() != h.cols()) {
    throw NumericalError(ErrorCode::invalid_argument, "eig_biorthogonal needs a square matrix");
  }
  const Eigen::Index n = h.rows();
  Eigen::ComplexEigenSolver<MatX> right_solver(h, true);
  Eigen::ComplexEigenSolver<MatX> left_solver(h.adjoint(), true);
  const VecX& values = right_solver.eigenvalues();
  const VecX conj_left = left_solver.eigenvalues().conjugate();

  // Degenerate clusters are re-biorthogonalised below, so any minimal pairing works.
  const std::vector<int> pairing = hungarian(distance_matrix(values, conj_left));

  MatX right = right_solver.eigenvectors();
  MatX left(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    left.row(i) = left_solver.eigenvectors().col(pairing[static_cast<std::size_t>(i)]).adjoint();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    right.col(i).normalize();
    left.row(i).normalize();
  }

  // Biorthogonalise inside clusters of (near) equal eigenvalues: the solver's
  // choice of basis within a degenerate subspace is arbitrary on each side.
  const double scale = std::max(h.norm(), std::numeric_limits<double>::min());
  std::vector<int> cluster(static_cast<std::size_t>(n));
  std::iota(cluster.begin(), cluster.end(), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(values(i) - values(j)) < options.cluster_tol * scale) {
        const int from = cluster[static_cast<std::size_t>(j)];
        const int to = cluster[static_cast<std::size_t>(i)];
        for (auto& c : cluster) {
          if (c == from) c = to;
        }
      }
    }
  }
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (done[static_cast<std::size_t>(i)]) continue;
    std::vector<Eigen::Index> members;
    for (Eigen::Index j = i; j < n; ++j) {
      if (cluster[static_cast<std::size_t>(j)] == cluster[static_cast<std::size_t>(i)]) {
        members.push_back(j);
        done[static_cast<std::size_t>(j)] = 1;
      }
    }
    if (members.size() < 2) continue;
    const auto k = static_cast<Eigen::Index>(members.size());
    MatX ls(k, n), rs(n, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      ls.row(a) = left.row(members[static_cast<std::size_t>(a)]);
      rs.col(a) = right.col(members[static_cast<std::size_t>(a)]);
    }
    const MatX overlap = ls * rs;
    Eigen::JacobiSVD<MatX> svd(overlap);
    const double smin = svd.singularValues()(k - 1);
    if (smin < options.defect_tol) {
      throw NumericalError(ErrorCode::defective_pair,
                           "degenerate cluster of size " + std::to_string(k) +
                               " has singular left/right overlap (" + std::to_string(smin) + ")");
    }
    const MatX fixed = overlap.inverse() * ls;
    for (Eigen::Index a = 0; a < k; ++a) {
      left.row(members[static_cast<std::size_t>(a)]) = fixed.row(a).normalized();
    }
  }

  BiorthEigensystem out;
  out.values = values;
  out.right = right;
  out.left = left;
  out.condition.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx lr = (left.row(i) * right.col(i))(0, 0);
    const double mag = std::abs(lr);
    if (mag < options.defect_tol) {
      throw NumericalError(ErrorCode::defective_pair,
                           "left/right overlap " + std::to_string(mag) + " below tolerance at E = (" +
                               std::to_string(values(i).real()) + ", " +
                               std::to_string(values(i).imag()) + ")");
    }
    out.condition(i) = 1.0 / mag;
    out.left.row(i) /= lr;
  }

  // Sort by (Re E, Im E).
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    if (values(x).real() != values(y).real()) return values(x).real() < values(y).real();
    return values(x).imag() < values(y).imag();
  });
  BiorthEigensystem sorted;
  sorted.values.resize(n);
  sorted.right.resize(n, n);
  sorted.left.resize(n, n);
  sorted.condition.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    sorted.values(i) = out.values(src);
    sorted.right.col(i) = out.right.col(src);
    sorted.left.row(i) = out.left.row(src);
    sorted.condition(i) = out.condition(src);
  }
  return sorted;
}

Permutation match_bands(const BiorthEigensystem& prev, const BiorthEigensystem& next,
                        const MatchOptions& options) {
  if (prev.size() != next.size()) {
    throw NumericalError(ErrorCode::invalid_argument, "match_bands: dimension mismatch");
  }
  const Eigen::Index n = prev.size();
  Eigen::MatrixXd overlap(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // Gauge-free overlap of unit-normalised vectors.
      const cplx lr = (prev.left.row(i) * next.right.col(j))(0, 0);
      overlap(i, j) = std::abs(lr) / prev.left.row(i).norm();
    }
  }
  return solve_assignment(distance_matrix(prev.values, next.values), overlap,
                          options.ambiguity_tol);
}

Permutation match_values(const VecX& prev, const VecX& next, const MatchOptions& options) {
  if (prev.size() != next.size()) {
    throw NumericalError(ErrorCode::invalid_argument, "match_values: dimension mismatch");
  }
  return solve_assignment(distance_matrix(prev, next), Eigen::MatrixXd(), options.ambiguity_tol);
}

Permutation identity_permutation(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation compose(const Permutation& first, const Permutation& second) {
  Permutation out(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    out[i] = second[static_cast<std::size_t>(first[i])];
  }
  return out;
}

bool is_identity(const Permutation& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] != static_cast<int>(i)) return false;
  }
  return true;
}

int permutation_order(const Permutation& perm) {
  Permutation acc = perm;
  int m = 1;
  while (!is_identity(acc)) {
    acc = compose(acc, perm);
    ++m;
  }
  return m;
}

}  // namespace esurf
