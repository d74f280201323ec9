// Hamiltonian families: the three-band exceptional-surface model, the
// Berry-phase control loop, the two-level exceptional-ring model and the
// trimer SSH chains.
//
// Conventions: hbar = 1; all energies and rates share one angular-frequency
// unit. Every builder is a pure function of its arguments.
#pragma once

#include "esurf/common.hpp"

#include <array>

namespace esurf {

/// Gell-Mann matrix lambda_index, index in 1..8. Throws std::out_of_range.
const Mat3& gell_mann(int index);

/// [a, b] = ab - ba. With the Gell-Mann basis, [l_j, l_k] = 2i f_jkl l_l.
Mat3 commutator(const Mat3& a, const Mat3& b);

/// A point of the four-dimensional parameter space plus the loss rate.
struct ESPoint {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;
  double kappa = 0.0;

  cplx omega1() const { return {q1, q2}; }
  cplx omega2() const { return {q3, q4}; }

  static ESPoint from_couplings(cplx omega1, cplx omega2, double kappa) {
    return {omega1.real(), omega1.imag(), omega2.real(), omega2.imag(), kappa};
  }
};

enum class Direction { q1, q2, q3, q4 };

/// H = q1 l1 + q2 l2 + q3 l6 + q4 l7 + i kappa l8.
Mat3 build_h_es(const ESPoint& p);

/// dH/dq for one direction. H is linear in q, so this is a constant matrix.
const Mat3& dh_es(Direction direction);

/// Radius of the exceptional ring crossed by the control loop, in units of kappa.
inline constexpr double kExceptionalRingRadius = 2.0 * kSqrt2 / 3.0;

/// Loop q3 = R sin(theta) + offset, q4 = 0, q_perp = R cos(theta) around the
/// exceptional ring of the control Hamiltonian.
struct BerryLoopSpec {
  double offset = kExceptionalRingRadius;
  double radius = 0.85;
  double kappa = 1.0;
  int steps_per_loop = 3000;
  int max_loops = 6;

  double q3(double theta) const;
  double q_perp(double theta) const;
  /// (offset - R) / r with r the exceptional-ring radius (scaled by kappa).
  double ring_ratio() const;
};

/// H_P = (kappa/3) l1 + q3 l6 + q_perp (l8 - I/sqrt3) + i kappa l8.
Mat3 build_h_berry(const BerryLoopSpec& spec, double theta);

struct TwoLevelParams {
  double amplitude = 1.0;  // length of the Bloch vector
  double theta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;
};

/// H2 = R (sin t cos p sx + sin t sin p sy + cos t sz) [+ i gamma sz].
Mat2 build_h_twolevel(const TwoLevelParams& p, bool nonhermitian);

/// Two-level analogue of BerryLoopSpec: the Bloch vector traces
/// (R sin(theta) + offset, 0, R cos(theta)). The exceptional ring of
/// H2 + i gamma sz is the circle of radius gamma in the x-y plane.
struct TwoLevelLoopSpec {
  double offset = 1.0;
  double radius = 0.8;
  double gamma = 1.0;
  int steps_per_loop = 3000;
  int max_loops = 6;

  TwoLevelParams at(double theta) const;
};

enum class SSH3Model { one, two };
enum class Boundary { periodic, open };

struct SSH3Params {
  SSH3Model model = SSH3Model::one;
  double t1 = 1.0;
  double t2 = 0.25;
  double w1 = 1.0;
  double w2 = 0.25;
  double gamma = 1.0;
  int cells = 10;
  Boundary bc = Boundary::open;
};

/// Bloch Hamiltonian H(k) of the selected trimer model.
Mat3 build_ssh3_bloch(const SSH3Params& p, double k);

/// Real-space blocks with H(k) = onsite + forward e^{-ik} + backward e^{+ik}.
/// `forward` hops from cell n+1 to cell n.
struct SSH3Blocks {
  Mat3 onsite;
  Mat3 forward;
  Mat3 backward;
};

SSH3Blocks ssh3_blocks(const SSH3Params& p);

/// Block-tridiagonal 3N x 3N chain. Periodic boundaries add the wrap-around
/// blocks. Throws NumericalError(invalid_argument) for fewer than two cells.
MatX build_ssh3_chain(const SSH3Params& p);

/// Momenta k_n = 2 pi n / N, n = 0..N-1, on which the periodic ring is diagonal.
std::vector<double> ssh3_momenta(int cells);

}  // namespace esurf
