// Circuit-QED protocol: a qubit coupled to a lossless and a lossy resonator
// under bichromatic frequency modulation.
//
// Units: time in microseconds, frequencies and rates in rad/us.
// Conditional (three-level) basis order: {|g10>, |e00>, |g01>}.
// Lab basis (8 states): index = 4 q + 2 n1 + n2 with q = 0 for g, 1 for e.
#pragma once

#include "esurf/common.hpp"
#include "esurf/eigensystem.hpp"
#include "esurf/invariants.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace esurf {

/// 2 pi x (value in MHz) in rad/us.
inline constexpr double mhz(double f) { return kTwoPi * f; }

struct CircuitParams {
  double omega_q = mhz(5860.0);
  double omega_r1 = mhz(5580.0);
  double omega_r2 = mhz(6660.0);
  double g1 = mhz(20.0);
  double g2 = mhz(40.0);
  double eps1 = 0.0;
  double eps2 = 0.0;
  double nu1 = 0.0;  // zero: derived from the resonance condition
  double nu2 = 0.0;
  double kappa_d2 = 5.0;
  double gamma_d = 0.0;
  double gamma_p = 0.0;
  double kappa_d1 = 0.0;
  double kappa_p1 = 0.0;
  double kappa_p2 = 0.0;

  double delta1() const { return omega_q - omega_r1; }
  double delta2() const { return omega_q - omega_r2; }
  double mu1() const;
  double mu2() const;
};

/// Resonant modulation frequencies nu1 = Delta1/2, nu2 = -Delta2.
std::pair<double, double> resonant_frequencies(const CircuitParams& c);

/// Human-readable warnings when configured nu values miss the resonance
/// conditions by more than `tol` (relative).
std::vector<std::string> resonance_warnings(const CircuitParams& c, double tol = 1e-3);

struct Couplings {
  double omega1 = 0.0;
  double omega2 = 0.0;
};

/// Omega1 = g1 J_2(mu1), Omega2 = g2 J_{-1}(mu2). Throws invalid_argument
/// when a modulation frequency is zero.
Couplings effective_couplings(const CircuitParams& c);

/// Amplitudes of the resonant sidebands including the spectator factors and
/// the sign picked up by the second resonator: g1 J_2(mu1) J_0(mu2) and
/// g2 J_1(mu2) J_0(mu1). These are what the lab-frame dynamics realises.
Couplings sideband_couplings(const CircuitParams& c);

/// Second-order (dispersive) energy shifts of |e00>, |g10>, |g01> produced by
/// every non-resonant sideband with |J| above 1e-14.
struct StarkShifts {
  double e00 = 0.0;
  double g10 = 0.0;
  double g01 = 0.0;
};

StarkShifts stark_shifts(const CircuitParams& c);

struct ScheduleOptions {
  /// Adjust nu1, nu2 so the dispersive shifts are cancelled in the frame
  /// returned by frame_rates.
  bool stark_compensation = true;
  /// Solve for the spectator J_0 factors as well (otherwise the paper-form
  /// relations Omega = g J are inverted directly).
  bool include_spectator = true;
};

/// Chooses eps1, eps2 (and nu1, nu2) realising the conditional Hamiltonian
/// with couplings (omega1, omega2) and a |g01> detuning of -sqrt3 q_perp.
CircuitParams schedule_point(const CircuitParams& base, double omega1, double omega2,
                             double q_perp, const ScheduleOptions& options = {});

/// Phase rates (rad/us) removed from each conditional-basis amplitude when
/// moving lab data into the effective frame: psi'_j = psi_j e^{i r_j t}.
std::array<double, 3> frame_rates(const CircuitParams& c, bool stark_compensation = true);

/// [[0, O1, 0], [O1, 0, O2], [0, O2, -i kappa_d2/2 - sqrt3 q_perp]].
Mat3 conditional_hamiltonian(double omega1, double omega2, double kappa_d2, double q_perp = 0.0);

/// Loss rate of the equivalent ES model: kappa = kappa_d2 / (2 sqrt3).
double es_kappa(double kappa_d2);

/// Splits H = H_traceless + (tr H / 3) I.
struct TraceSplit {
  Mat3 traceless;
  cplx shift;
};

TraceSplit split_trace(const Mat3& h);

/// Basis indices.
inline constexpr int kLabDim = 8;
inline constexpr int kG00 = 0;
inline constexpr int kG01 = 1;
inline constexpr int kG10 = 2;
inline constexpr int kE00 = 4;

struct Populations {
  double e00 = 0.0;
  double g10 = 0.0;
  double g01 = 0.0;
  double g00 = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<VecX> states;  // empty in lindblad mode
  std::vector<MatX> rhos;    // lindblad mode only
  std::vector<double> norm;  // ||psi|| (no-jump) or tr rho
  std::vector<Populations> populations;
  /// Integrated jump probability int psi^dag Gamma psi dt (no-jump modes).
  std::vector<double> jump_probability;
};

struct IntegratorOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  /// Zero means unbounded.
  double max_dt = 0.0;
};

using TimeDependentMatrix = std::function<MatX(double)>;

/// Integrates d psi/dt = -i H(t) psi and records states at `times` (sorted,
/// starting at or after 0). For 3-level states populations refer to the
/// conditional basis; g00 is reported as 0.
Trajectory evolve_conditional(const TimeDependentMatrix& h, const VecX& psi0,
                              const std::vector<double>& times,
                              const IntegratorOptions& options = {});

Trajectory evolve_conditional(const Mat3& h, const VecX& psi0, const std::vector<double>& times,
                              const IntegratorOptions& options = {});

enum class LabMode { nojump, lindblad };

struct LabOptions {
  IntegratorOptions integrator{};
  /// Leakage tolerance outside the ground and single-excitation sector.
  double truncation_tol = 1e-6;
};

/// Full time-dependent interaction-picture model on the 8-state space.
/// psi0 is an 8-vector; lindblad mode starts from |psi0><psi0|.
Trajectory evolve_lab_frame(const CircuitParams& c, const VecX& psi0,
                            const std::vector<double>& times, LabMode mode,
                            const LabOptions& options = {});

/// Lab-frame interaction-picture Hamiltonian at time t (Hermitian part).
MatX lab_hamiltonian(const CircuitParams& c, double t);

/// The largest angular frequency present in lab_hamiltonian.
double lab_max_frequency(const CircuitParams& c);

/// Conditional-basis amplitudes {g10, e00, g01} of an 8-state vector.
Vec3 to_conditional(const VecX& lab);
VecX from_conditional(const Vec3& s);

/// P_S psi / ||P_S psi|| with S = {e00, g10, g01}. Accepts 3- or 8-vectors.
/// Throws VanishingProjection when ||P_S psi|| < eps.
VecX postselect(const VecX& psi, double eps = 1e-12);

/// Density-matrix version: the S block renormalised to unit trace.
Mat3 postselect(const MatX& rho, double eps = 1e-12);

struct FitOptions {
  /// Propagation interval of the fitted propagator.
  double delta = 0.2;
  /// Base times t0 + j window / n_base, j = 0..n_base-1, averaged over.
  double t0 = 0.0;
  double window = 0.05;
  int n_base = 200;
  EigOptions eig{};
};

struct FitResult {
  BiorthEigensystem system;
  Mat3 h_fit;
  double residual = 0.0;  // max_t ||U_fit(t) - U(t)|| / ||U(t)|| over the samples
};

/// Sample times needed by fit_eigensystem.
std::vector<double> fit_sample_times(const FitOptions& options);

/// Fits H from three trajectories (initial states g10, e00, g01, in that
/// order), each sampled at fit_sample_times(options), amplitudes in the
/// conditional basis. Throws SingularStateMatrix or BranchAmbiguity.
FitResult fit_eigensystem(const std::array<std::vector<Vec3>, 3>& states,
                          const FitOptions& options);

enum class ExperimentMode { effective, lab };

struct ExperimentOptions {
  ExperimentMode mode = ExperimentMode::lab;
  int theta_points = 48;
  FitOptions fit{};
  ScheduleOptions schedule{};
  LabOptions lab{};
  int threads = 1;
  int max_loops = 6;
};

struct ExperimentPoint {
  double theta = 0.0;
  CircuitParams circuit;
  FitResult fit;
};

struct ExperimentResult {
  std::vector<ExperimentPoint> points;
  BraidResult braid;
};

/// Schedules the loop g2 J(mu2) = (R sin theta + Delta) kappa,
/// q_perp = R cos theta kappa, g1 J_2(mu1) = kappa/3 (kappa from kappa_d2),
/// fits the eigensystem at every theta, and accumulates the Berry phase of
/// the fitted frames.
ExperimentResult berry_phase_experiment(const CircuitParams& base, const BerryLoopSpec& loop,
                                        const ExperimentOptions& options);

/// Three trajectories from g10, e00, g01 at the given circuit point, moved
/// into the effective frame, in the conditional basis.
std::array<std::vector<Vec3>, 3> lab_fit_data(const CircuitParams& c,
                                              const std::vector<double>& times,
                                              const ScheduleOptions& schedule,
                                              const LabOptions& options);

}  // namespace esurf
