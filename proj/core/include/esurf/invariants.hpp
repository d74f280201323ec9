// Topological invariants: the DD flux over the 3-sphere chart, multi-loop
// Berry phases with band tracking, and the spectral winding of the SSH3
// Bloch Hamiltonians.
#pragma once

#include "esurf/common.hpp"
#include "esurf/eigensystem.hpp"
#include "esurf/geometry.hpp"
#include "esurf/models.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace esurf {

/// Shortest distance from the parameter origin to the exceptional surface.
/// For the ES model this is kappa (|O1|^2 + |O2|^2 = kappa^2/9 + 8 kappa^2/9).
double es_distance(double kappa);

enum class BandPolicy {
  /// See dd_band_plan: picks the band from the sphere's discriminant profile.
  automatic,
  /// Band continuously connected to the lowest Hermitian band (lowest Re E).
  lowest_real,
  lowest_imag,
  highest_imag,
};

struct DDRequest {
  double radius = 1.0;
  double kappa = 0.0;
  int n_alpha = 48;
  int n_beta = 48;
  int n_phi = 48;
  BandPolicy policy = BandPolicy::automatic;
  /// Fractional offsets of the beta/phi grids (in units of a grid step).
  double beta_shift = 0.0;
  double phi_shift = 0.0;
  int threads = 1;
  QGTOptions qgt{};
};

struct DDResult {
  double dd = 0.0;
  /// Diagnostic flux of the curvature route, same normalisation.
  double dd_curv_paper = 0.0;
  double dd_curv_sym = 0.0;
  double ratio = 0.0;  // R / r0, zero when kappa = 0
  BandPolicy band_used = BandPolicy::lowest_real;
  /// Nodes where det g fell below -1e-9; those nodes contribute zero.
  long negative_det_nodes = 0;
  double min_det_g = 0.0;
};

/// How the band is selected on a sphere, derived from the discriminant
/// 4B^3 + kappa^2 A(alpha)^2 (B is constant on the sphere, A depends on alpha).
struct DDBandPlan {
  BandPolicy policy = BandPolicy::lowest_real;
  /// True when the sphere meets EP2s; the band isolated from the coalescing
  /// pair is then used.
  bool crosses_ep2 = false;
  /// True when the sphere meets the EP3 manifold; no invariant exists.
  bool touches_ep3 = false;
  /// True when EP2 crossings on opposite sides of A = 0 coalesce different
  /// band pairs, so no band stays isolated over the whole sphere.
  bool obstructed = false;
};

DDBandPlan dd_band_plan(double radius, double kappa);

/// (1/2 pi^2) sum M_metric w over a midpoint(alpha) x trapezoid(beta, phi)
/// grid. Throws GridHitsEP when a node is degenerate or the sphere meets
/// the EP3 manifold.
DDResult dd_invariant(const DDRequest& req);

struct DDRow {
  double ratio = 0.0;
  double dd = 0.0;
  std::string status;  // "ok" or "Ill-Defined"
  std::string detail;
};

/// dd_invariant for R = ratio * r0 (or R = ratio when kappa = 0). A row that
/// hits an EP is retried once on a shifted grid before being flagged.
std::vector<DDRow> dd_sweep(const std::vector<double>& ratios, const DDRequest& tmpl);

/// A 2 pi periodic matrix family theta -> H(theta).
using MatrixFamily = std::function<MatX(double)>;

struct PathOptions {
  int steps_per_loop = 3000;
  int max_loops = 6;
  /// Band at theta = 0 in (Re, Im) order; -1 picks the lowest Re E.
  int start_band = -1;
  /// Largest accepted phase increment before a step is bisected.
  double max_increment = kPi / 4.0;
  int max_bisections = 16;
  /// A sample where two eigenvalues are closer than this (relative to the
  /// spectral scale) is treated as an EP on the path.
  double gap_tol = 1e-6;
  EigOptions eig{};
};

/// Eigensystems sampled around one period after adaptive refinement, with
/// the band assignment between consecutive samples.
struct TrackedLoop {
  std::vector<double> thetas;                // [0, 2 pi), increasing
  std::vector<BiorthEigensystem> frames;     // one per theta
  std::vector<Permutation> steps;            // steps[i]: frame i -> frame i+1 (mod N)
  /// increments[i][n]: -arg <L_n(theta_i)|R_perm(theta_i+1)> in the fixed gauge.
  std::vector<std::vector<double>> increments;
  Permutation per_loop;                      // composition of all steps
  int gauge_component = 0;
};

/// Samples the family over one period, refining until every step is
/// unambiguous and every increment is below max_increment.
/// Throws EPOnPath when refinement cannot separate the bands.
TrackedLoop track_loop(const MatrixFamily& family, const PathOptions& options);

/// Same bookkeeping for a fixed set of frames (no refinement possible), used
/// for eigensystems extracted from data.
TrackedLoop track_frames(std::vector<double> thetas, std::vector<BiorthEigensystem> frames,
                         const PathOptions& options);

struct BraidResult {
  double phase = 0.0;  // total over the closed lift, not reduced mod 2 pi
  Permutation permutation;
  int loops_to_close = 0;
  int band = 0;
  /// Per-step increments of the followed band along the closed lift.
  std::vector<double> increments;
};

/// Follows `band` (frame-0 index) over repeated loops until the composed
/// permutation is the identity. Throws NoClosure after max_loops.
BraidResult braid_from_track(const TrackedLoop& track, int band, int max_loops);

BraidResult berry_phase(const MatrixFamily& family, const PathOptions& options);
BraidResult berry_phase(const BerryLoopSpec& spec);
BraidResult berry_phase(const TwoLevelLoopSpec& spec);

struct BerrySweepRow {
  double delta = 0.0;
  double ratio = 0.0;  // (delta - R) / r
  std::optional<BraidResult> result;
  std::string status;  // "ok" or the error name
};

std::vector<BerrySweepRow> berry_transition_sweep(const std::vector<double>& deltas,
                                                  const BerryLoopSpec& tmpl, int threads = 1);

/// Adjacent ok rows between which the phase changes by more than pi,
/// possibly separated by flagged rows. Returns the bracketing ratios.
std::optional<std::pair<double, double>> locate_transition(const std::vector<BerrySweepRow>& rows);

struct WindingResult {
  double winding = 0.0;
  Permutation permutation;  // band braid over k in [0, 2 pi)
};

/// (1/2 pi) sum of arg increments of det(H(k) - E_ref) over n_k steps (steps
/// are refined while an increment exceeds pi/2).
/// Throws RefOnSpectrum when E_ref lies on a Bloch eigenvalue.
WindingResult spectral_winding(const SSH3Params& p, cplx e_ref, int n_k);

}  // namespace esurf
