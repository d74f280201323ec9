// Point classification, exceptional-surface scans, eigenvalue tracks along
// loops and the SSH3 spectra with their skin-effect and coalescence measures.
#pragma once

#include "esurf/common.hpp"
#include "esurf/eigensystem.hpp"
#include "esurf/invariants.hpp"
#include "esurf/models.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace esurf {

enum class PointKind { ep3, ep2, fermi_arc_interior, regular };

std::string_view to_string(PointKind kind);

struct PointClass {
  PointKind kind = PointKind::regular;
  double disc = 0.0;        // 4B^3 + kappa^2 A^2 (real)
  double b = 0.0;
  double omega1_residual = 0.0;  // ||O1| - kappa/3|
  double omega2_residual = 0.0;  // ||O2| - 2 sqrt2 kappa/3|
  double re_spread = 0.0;   // max Re E - min Re E
  double scale = 0.0;       // sqrt(|O1|^2 + |O2|^2 + kappa^2)
};

/// Tolerances are relative to `scale`. Hermitian points (kappa = 0) have no
/// exceptional points and are always Regular.
PointClass classify_point(const ESPoint& p, double tol = 1e-6);

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;  // n = 1 means the axis is fixed at lo

  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

struct ScanRow {
  ESPoint point;
  int band = 0;
  cplx energy;
  PointKind kind = PointKind::regular;
};

/// Closed-form eigenvalues and classification on a (q1, q2, q3) grid at
/// fixed q4 and kappa. Bands are ordered by (Re, Im) at each node.
std::vector<ScanRow> es_scan(const Axis& q1, const Axis& q2, const Axis& q3, double q4,
                             double kappa, double tol = 1e-6);

struct TrackSample {
  double theta = 0.0;  // lifted angle in [0, 2 pi loops]
  int band = 0;        // band label at theta = 0
  cplx energy;
};

struct RiemannTrack {
  std::vector<TrackSample> samples;
  Permutation permutation;
  int loops_to_close = 0;
  double closure_residual = 0.0;
};

/// Continued eigenvalue curves over the closed lift of a periodic family.
/// Throws EPOnPath or NoClosure.
RiemannTrack riemann_track(const MatrixFamily& family, const PathOptions& options);

/// Bloch eigenvalues at k = 2 pi n / N from the closed-form cubic.
VecX ssh3_bloch_union(const SSH3Params& p);

/// Eigenvalues of the real-space chain (any boundary condition).
VecX ssh3_chain_spectrum(const SSH3Params& p);

struct ChainEigensystem {
  VecX values;
  MatX right;  // unit-norm columns
};

ChainEigensystem ssh3_chain_eigensystem(const SSH3Params& p);

struct SSH3SweepRow {
  double t1 = 0.0;
  Boundary bc = Boundary::periodic;
  int index = 0;
  cplx energy;
};

/// Spectra versus t1 for both boundary conditions. PBC uses the Bloch union.
std::vector<SSH3SweepRow> ssh3_t1_sweep(const SSH3Params& p, const Axis& t1);

struct NHSEMetrics {
  double boundary_weight = 0.0;
  double mean_ipr = 0.0;
};

/// Averages over eigenstates of the weight on the first and last unit cell
/// and of the inverse participation ratio.
NHSEMetrics nhse_metrics(const ChainEigensystem& es, int cells);

/// Smallest diameter of any three eigenvalues that are mutual nearest
/// neighbours: for each E, the diameter of {E and its two closest}.
double ep3_measure(const VecX& spectrum);

}  // namespace esurf
