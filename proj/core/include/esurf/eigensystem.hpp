// Biorthogonal eigendecomposition of small dense non-Hermitian matrices, an
// independent closed-form cubic solver for the 3x3 family, and band matching
// between neighbouring samples of a parameter path.
#pragma once

#include "esurf/common.hpp"
#include "esurf/models.hpp"

#include <array>
#include <vector>

namespace esurf {

/// Coefficients of the characteristic polynomial E^3 - B E - det H of the
/// traceless three-band Hamiltonian, and its discriminant.
struct CubicInvariants {
  double a = 0.0;  // 6|O1|^2 - 3|O2|^2 + 2 kappa^2
  double b = 0.0;  // |O1|^2 + |O2|^2 - kappa^2
  cplx det;        // i kappa A / (3 sqrt3)
  cplx disc;       // 4 B^3 + kappa^2 A^2; zero iff a root repeats
  cplx paper_c;    // sqrt(4 B^3 - A^2), reported for comparison only
};

CubicInvariants cubic_invariants(const ESPoint& p);

/// Roots of E^3 + p E + q = 0. Coefficients whose magnitude is below the
/// rounding floor implied by `scale` (the matrix norm) are treated as zero so
/// that exact coalescences come out exactly.
std::array<cplx, 3> solve_depressed_cubic(cplx p, cplx q, double scale);

/// Closed-form eigenvalues of build_h_es(p); exactly real when kappa = 0.
std::array<cplx, 3> eig_closed_form_3x3(const ESPoint& p);

/// Closed-form eigenvalues of an arbitrary 3x3 matrix (trace shifted out).
std::array<cplx, 3> eig_closed_form_3x3(const Mat3& h);

struct EigOptions {
  /// A band whose unit left/right overlap |<L|R>| falls below this is defective.
  double defect_tol = 1e-10;
  /// Eigenvalues closer than this (relative to the matrix norm) are treated
  /// as one cluster when biorthogonalising.
  double cluster_tol = 1e-8;
};

/// Eigenvalues with paired right (columns) and left (rows) eigenvectors
/// normalised so that left.row(n) * right.col(m) = delta_nm and every right
/// vector has unit 2-norm. Bands are sorted by (Re E, Im E).
struct BiorthEigensystem {
  VecX values;
  MatX right;
  MatX left;
  Eigen::VectorXd condition;  // 1 / |<L|R>| of the unit vectors before normalisation

  Eigen::Index size() const { return values.size(); }
};

/// Throws NumericalError(defective_pair) near an exceptional point.
BiorthEigensystem eig_biorthogonal(const MatX& h, const EigOptions& options = {});

/// perm[i] = index in `next` of band i of `prev`.
using Permutation = std::vector<int>;

struct MatchOptions {
  double ambiguity_tol = 1e-12;
};

/// Minimal total |E_prev - E_next| assignment, ties broken by the largest
/// total |<L_prev|R_next>|. Throws NumericalError(ambiguous_match) when two
/// assignments tie on both criteria.
Permutation match_bands(const BiorthEigensystem& prev, const BiorthEigensystem& next,
                        const MatchOptions& options = {});

/// Same assignment problem on bare eigenvalue lists (no overlap tie-break).
Permutation match_values(const VecX& prev, const VecX& next,
                         const MatchOptions& options = {});

Permutation identity_permutation(int n);
/// (second o first)[i] = second[first[i]].
Permutation compose(const Permutation& first, const Permutation& second);
bool is_identity(const Permutation& perm);
/// Smallest m >= 1 with perm^m = identity.
int permutation_order(const Permutation& perm);

}  // namespace esurf
