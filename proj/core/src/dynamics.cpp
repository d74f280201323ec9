#include "esurf/dynamics.hpp"

#include "esurf/bessel.hpp"
#include "parallel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace esurf {
namespace {

namespace ode = boost::numeric::odeint;

using State = std::vector<cplx>;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Vec8 = Eigen::Matrix<cplx, 8, 1>;

// Sideband orders considered when summing non-resonant terms.
constexpr int kMaxOrder = 12;

bool is_resonant(int m, int k, int l) { return (m == 1 && k == -2 && l == 0) || (m == 2 && k == 0 && l == 1); }

// Integrates rhs over `times` (sorted) with a dense-output dopri5 and calls
// observe(i, x) at each requested time.
template <class Rhs, class Observe>
void integrate(Rhs&& rhs, State x, const std::vector<double>& times,
               const IntegratorOptions& o, Observe&& observe) {
  if (times.empty()) return;
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0) {
    throw NumericalError(ErrorCode::invalid_argument, "sample times must be sorted and >= 0");
  }
  std::vector<double> grid;
  grid.reserve(times.size() + 1);
  const bool prepend = times.front() > 0.0;
  if (prepend) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());
  std::size_t hit = 0;
  auto obs = [&](const State& s, double) {
    if (prepend && hit == 0) {
      ++hit;
      return;
    }
    observe(hit - (prepend ? 1 : 0), s);
    ++hit;
  };
  using Stepper = ode::runge_kutta_dopri5<State>;
  const double span = grid.back() - grid.front();
  const double dt0 = o.max_dt > 0.0 ? std::min(o.max_dt, 1e-3) : 1e-3;
  try {
    if (grid.size() == 1) {
      observe(0, x);
      return;
    }
    if (o.max_dt > 0.0) {
      auto stepper = ode::make_dense_output(o.abs_tol, o.rel_tol, o.max_dt, Stepper());
      ode::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), std::min(dt0, span), obs);
    } else {
      auto stepper = ode::make_dense_output(o.abs_tol, o.rel_tol, Stepper());
      ode::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), std::min(dt0, span), obs);
    }
  } catch (const NumericalError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw NumericalError(ErrorCode::step_size_underflow, e.what());
  }
}

Populations conditional_populations(const Vec3& s) {
  Populations p;
  p.g10 = std::norm(s(0));
  p.e00 = std::norm(s(1));
  p.g01 = std::norm(s(2));
  return p;
}

Populations lab_populations(const Vec8& v) {
  Populations p;
  p.g00 = std::norm(v(kG00));
  p.g01 = std::norm(v(kG01));
  p.g10 = std::norm(v(kG10));
  p.e00 = std::norm(v(kE00));
  return p;
}

double leakage(const Eigen::VectorXd& pops) {
  return pops(3) + pops(5) + pops(6) + pops(7);
}

// Collapse operators L (already scaled by sqrt(rate)).
std::vector<Mat8> collapse_operators(const CircuitParams& c) {
  std::vector<Mat8> ls;
  auto add = [&](double rate, const Mat8& op) {
    if (rate > 0.0) ls.push_back(std::sqrt(rate) * op);
  };
  Mat8 a1 = Mat8::Zero(), a2 = Mat8::Zero(), sm = Mat8::Zero(), sz = Mat8::Zero();
  Mat8 n1 = Mat8::Zero(), n2 = Mat8::Zero();
  for (int q = 0; q < 2; ++q) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const int idx = 4 * q + 2 * i + j;
        if (i == 1) a1(4 * q + j, idx) = 1.0;
        if (j == 1) a2(4 * q + 2 * i, idx) = 1.0;
        if (q == 1) sm(2 * i + j, idx) = 1.0;
        sz(idx, idx) = q == 1 ? 1.0 : -1.0;
        n1(idx, idx) = i;
        n2(idx, idx) = j;
      }
    }
  }
  add(c.kappa_d2, a2);
  add(c.kappa_d1, a1);
  add(c.gamma_d, sm);
  add(c.gamma_p, sz);
  add(c.kappa_p1, n1);
  add(c.kappa_p2, n2);
  return ls;
}

struct LabModel {
  CircuitParams c;
  double mu1, mu2;
  Mat8 anti;  // -(i/2) sum L^dag L
  std::vector<Mat8> ls;

  explicit LabModel(const CircuitParams& cp) : c(cp), mu1(cp.mu1()), mu2(cp.mu2()) {
    ls = collapse_operators(c);
    anti.setZero();
    for (const auto& l : ls) anti += l.adjoint() * l;
    anti *= cplx(0.0, -0.5);
  }

  Mat8 hermitian(double t) const {
    const double phase = mu1 * std::sin(c.nu1 * t) + mu2 * std::sin(c.nu2 * t);
    const cplx f1 = std::polar(1.0, -(c.delta1() * t + phase));
    const cplx f2 = std::polar(1.0, -(c.delta2() * t + phase));
    Mat8 h = Mat8::Zero();
    for (int n2 = 0; n2 < 2; ++n2) {
      // a1^dag sigma^-: |e,0,n2> -> |g,1,n2>
      h(2 + n2, 4 + n2) = c.g1 * f1;
    }
    for (int n1 = 0; n1 < 2; ++n1) {
      h(2 * n1 + 1, 4 + 2 * n1) = c.g2 * f2;
    }
    return h + Mat8(h.adjoint());
  }

  // out = -i (H(t) + anti) in for `cols` stacked 8-vectors. Every collapse
  // operator here has a diagonal L^dag L, so only the couplings are off-diagonal.
  void apply(double t, const cplx* in, cplx* out, int cols) const {
    const double phase = mu1 * std::sin(c.nu1 * t) + mu2 * std::sin(c.nu2 * t);
    const cplx a = c.g1 * std::polar(1.0, -(c.delta1() * t + phase));
    const cplx b = c.g2 * std::polar(1.0, -(c.delta2() * t + phase));
    const cplx ac = std::conj(a), bc = std::conj(b);
    const cplx mi(0.0, -1.0);
    for (int k = 0; k < cols; ++k) {
      const cplx* v = in + 8 * k;
      cplx* d = out + 8 * k;
      cplx h[8];
      for (int i = 0; i < 8; ++i) h[i] = anti(i, i) * v[i];
      h[2] += a * v[4];
      h[4] += ac * v[2];
      h[3] += a * v[5];
      h[5] += ac * v[3];
      h[1] += b * v[4];
      h[4] += bc * v[1];
      h[3] += b * v[6];
      h[6] += bc * v[3];
      for (int i = 0; i < 8; ++i) d[i] = mi * h[i];
    }
  }
};

// No-jump evolution of several initial states at once; the last state slot
// accumulates the jump probability summed over the columns.
template <class Observe>
void evolve_nojump_columns(const LabModel& model, const Eigen::Matrix<cplx, 8, Eigen::Dynamic>& psi0,
                           const std::vector<double>& times, const IntegratorOptions& io,
                           Observe&& observe) {
  const int cols = static_cast<int>(psi0.cols());
  const auto n = static_cast<std::size_t>(8 * cols);
  State x(n + 1);
  std::copy(psi0.data(), psi0.data() + n, x.begin());
  x[n] = 0.0;
  Eigen::Matrix<double, 8, 1> gamma;
  for (int i = 0; i < 8; ++i) gamma(i) = -2.0 * model.anti(i, i).imag();
  auto rhs = [&](const State& s, State& ds, double t) {
    model.apply(t, s.data(), ds.data(), cols);
    double jump = 0.0;
    for (std::size_t i = 0; i < n; ++i) jump += gamma(static_cast<Eigen::Index>(i % 8)) * std::norm(s[i]);
    ds[n] = jump;
  };
  integrate(rhs, x, times, io, [&](std::size_t i, const State& s) {
    const Eigen::Map<const Eigen::Matrix<cplx, 8, Eigen::Dynamic>> m(s.data(), 8, cols);
    observe(i, m, s[n].real());
  });
}

IntegratorOptions lab_integrator(const CircuitParams& c, const IntegratorOptions& o) {
  IntegratorOptions io = o;
  if (io.max_dt <= 0.0) io.max_dt = 1.0 / (20.0 * lab_max_frequency(c));
  return io;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double signed_inverse(int n, double target) {
  const double x = bessel_j_inverse(n, std::abs(target));
  return target < 0.0 ? -x : x;
}

}  // namespace

double CircuitParams::mu1() const { return nu1 != 0.0 ? eps1 / nu1 : 0.0; }
double CircuitParams::mu2() const { return nu2 != 0.0 ? eps2 / nu2 : 0.0; }

std::pair<double, double> resonant_frequencies(const CircuitParams& c) {
  return {c.delta1() / 2.0, -c.delta2()};
}

std::vector<std::string> resonance_warnings(const CircuitParams& c, double tol) {
  std::vector<std::string> out;
  const auto [n1, n2] = resonant_frequencies(c);
  auto check = [&](const char* name, double given, double want) {
    if (given != 0.0 && std::abs(given - want) > tol * std::abs(want)) {
      std::ostringstream os;
      os << name << " = " << given / kTwoPi << " MHz misses the resonance value " << want / kTwoPi
         << " MHz";
      out.push_back(os.str());
    }
  };
  check("nu1", c.nu1, n1);
  check("nu2", c.nu2, n2);
  return out;
}

Couplings effective_couplings(const CircuitParams& c) {
  if (c.nu1 == 0.0 || c.nu2 == 0.0) {
    throw NumericalError(ErrorCode::invalid_argument, "modulation frequencies must be nonzero");
  }
  return {c.g1 * bessel_j(2, c.mu1()), c.g2 * bessel_j(-1, c.mu2())};
}

Couplings sideband_couplings(const CircuitParams& c) {
  if (c.nu1 == 0.0 || c.nu2 == 0.0) {
    throw NumericalError(ErrorCode::invalid_argument, "modulation frequencies must be nonzero");
  }
  const double m1 = c.mu1(), m2 = c.mu2();
  // e^{-i mu sin x} = sum_k J_k(mu) e^{-ikx}; resonances at k1 = -2 and k2 = +1.
  return {c.g1 * bessel_j(-2, m1) * bessel_j(0, m2), c.g2 * bessel_j(0, m1) * bessel_j(1, m2)};
}

StarkShifts stark_shifts(const CircuitParams& c) {
  StarkShifts s;
  const double m1 = c.mu1(), m2 = c.mu2();
  std::array<double, 2 * kMaxOrder + 1> j1{}, j2{};
  for (int k = -kMaxOrder; k <= kMaxOrder; ++k) {
    j1[static_cast<std::size_t>(k + kMaxOrder)] = bessel_j(k, m1);
    j2[static_cast<std::size_t>(k + kMaxOrder)] = bessel_j(k, m2);
  }
  for (int m = 1; m <= 2; ++m) {
    const double g = m == 1 ? c.g1 : c.g2;
    const double delta = m == 1 ? c.delta1() : c.delta2();
    double& target = m == 1 ? s.g10 : s.g01;
    for (int k = -kMaxOrder; k <= kMaxOrder; ++k) {
      for (int l = -kMaxOrder; l <= kMaxOrder; ++l) {
        if (is_resonant(m, k, l)) continue;
        const double amp = j1[static_cast<std::size_t>(k + kMaxOrder)] *
                           j2[static_cast<std::size_t>(l + kMaxOrder)];
        if (std::abs(amp) < 1e-14) continue;
        const double w = delta + k * c.nu1 + l * c.nu2;
        if (std::abs(w) < 1e-9 * std::abs(delta)) continue;
        const double shift = g * g * amp * amp / w;
        s.e00 += shift;
        target -= shift;
      }
    }
  }
  return s;
}

CircuitParams schedule_point(const CircuitParams& base, double omega1, double omega2,
                             double q_perp, const ScheduleOptions& options) {
  CircuitParams c = base;
  const auto [n1, n2] = resonant_frequencies(base);
  c.nu1 = n1;
  c.nu2 = n2 + kSqrt3 * q_perp;
  double mu1 = 0.0, mu2 = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double j0_2 = options.include_spectator ? bessel_j(0, mu2) : 1.0;
    const double j0_1 = options.include_spectator ? bessel_j(0, mu1) : 1.0;
    const double new_mu1 = signed_inverse(2, omega1 / (c.g1 * j0_2));
    const double new_mu2 = signed_inverse(1, omega2 / (c.g2 * j0_1));
    const bool settled = std::abs(new_mu1 - mu1) < 1e-15 && std::abs(new_mu2 - mu2) < 1e-15;
    mu1 = new_mu1;
    mu2 = new_mu2;
    c.eps1 = mu1 * c.nu1;
    c.eps2 = mu2 * c.nu2;
    if (options.stark_compensation) {
      const StarkShifts s = stark_shifts(c);
      // Resonant-sideband detunings that leave g10 at 0 and g01 at
      // -sqrt3 q_perp relative to e00 after the shifts.
      const double w1 = s.g10 - s.e00;
      const double w2 = s.g01 - s.e00 + kSqrt3 * q_perp;
      const double nu1 = (c.delta1() - w1) / 2.0;
      const double nu2 = w2 - c.delta2();
      const bool stable = std::abs(nu1 - c.nu1) < 1e-12 * std::abs(nu1) &&
                          std::abs(nu2 - c.nu2) < 1e-12 * std::abs(nu2);
      c.nu1 = nu1;
      c.nu2 = nu2;
      c.eps1 = mu1 * c.nu1;
      c.eps2 = mu2 * c.nu2;
      if (settled && stable) break;
    } else if (settled) {
      break;
    }
  }
  return c;
}

std::array<double, 3> frame_rates(const CircuitParams& c, bool stark_compensation) {
  const double w1 = c.delta1() - 2.0 * c.nu1;
  const double w2 = c.delta2() + c.nu2;
  const double se = stark_compensation ? stark_shifts(c).e00 : 0.0;
  return {w1 + se, se, w2 + se};
}

Mat3 conditional_hamiltonian(double omega1, double omega2, double kappa_d2, double q_perp) {
  Mat3 h = Mat3::Zero();
  h(0, 1) = h(1, 0) = omega1;
  h(1, 2) = h(2, 1) = omega2;
  h(2, 2) = cplx(-kSqrt3 * q_perp, -0.5 * kappa_d2);
  return h;
}

double es_kappa(double kappa_d2) { return kappa_d2 / (2.0 * kSqrt3); }

TraceSplit split_trace(const Mat3& h) {
  const cplx shift = h.trace() / 3.0;
  return {h - shift * Mat3::Identity(), shift};
}

Trajectory evolve_conditional(const TimeDependentMatrix& h, const VecX& psi0,
                              const std::vector<double>& times, const IntegratorOptions& options) {
  const auto n = static_cast<std::size_t>(psi0.size());
  Trajectory tr;
  tr.times = times;
  State x(n + 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = psi0(static_cast<Eigen::Index>(i));
  x[n] = 0.0;  // accumulated jump probability (real part)
  auto rhs = [&](const State& s, State& ds, double t) {
    const MatX m = h(t);
    const Eigen::Map<const VecX> v(s.data(), static_cast<Eigen::Index>(n));
    const VecX hv = m * v;
    for (std::size_t i = 0; i < n; ++i) ds[i] = cplx(0.0, -1.0) * hv(static_cast<Eigen::Index>(i));
    // d||psi||^2/dt = -psi^dag Gamma psi with Gamma = i (H - H^dag)
    const MatX gamma = kI * (m - m.adjoint());
    ds[n] = (v.adjoint() * gamma * v)(0).real();
  };
  integrate(rhs, x, times, options, [&](std::size_t, const State& s) {
    VecX v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    tr.norm.push_back(v.norm());
    tr.jump_probability.push_back(s[n].real());
    if (n == 3) {
      tr.populations.push_back(conditional_populations(v));
    } else if (n == kLabDim) {
      tr.populations.push_back(lab_populations(v));
    } else {
      tr.populations.emplace_back();
    }
    tr.states.push_back(std::move(v));
  });
  return tr;
}

Trajectory evolve_conditional(const Mat3& h, const VecX& psi0, const std::vector<double>& times,
                              const IntegratorOptions& options) {
  const MatX m = h;
  return evolve_conditional([m](double) { return m; }, psi0, times, options);
}

MatX lab_hamiltonian(const CircuitParams& c, double t) { return LabModel(c).hermitian(t); }

double lab_max_frequency(const CircuitParams& c) {
  const double m1 = c.mu1(), m2 = c.mu2();
  double w = std::max({std::abs(c.delta1()), std::abs(c.delta2()), std::abs(c.nu1), std::abs(c.nu2)});
  for (int m = 1; m <= 2; ++m) {
    const double delta = m == 1 ? c.delta1() : c.delta2();
    for (int k = -kMaxOrder; k <= kMaxOrder; ++k) {
      for (int l = -kMaxOrder; l <= kMaxOrder; ++l) {
        if (std::abs(bessel_j(k, m1) * bessel_j(l, m2)) < 1e-6) continue;
        w = std::max(w, std::abs(delta + k * c.nu1 + l * c.nu2));
      }
    }
  }
  return w;
}

Trajectory evolve_lab_frame(const CircuitParams& c, const VecX& psi0,
                            const std::vector<double>& times, LabMode mode,
                            const LabOptions& options) {
  if (psi0.size() != kLabDim) {
    throw NumericalError(ErrorCode::invalid_argument, "lab-frame state must have 8 components");
  }
  const LabModel model(c);
  const IntegratorOptions io = lab_integrator(c, options.integrator);

  Trajectory tr;
  tr.times = times;
  auto check_leak = [&](const Eigen::VectorXd& pops, double t) {
    const double leak = leakage(pops);
    if (leak > options.truncation_tol) {
      std::ostringstream os;
      os << "population " << leak << " outside the single-excitation sector at t = " << t;
      throw NumericalError(ErrorCode::truncation_violation, os.str());
    }
  };

  if (mode == LabMode::nojump) {
    evolve_nojump_columns(model, psi0, times, io, [&](std::size_t i, const auto& m, double jump) {
      const Vec8 v = m.col(0);
      check_leak(v.cwiseAbs2(), times[i]);
      tr.states.emplace_back(v);
      tr.norm.push_back(v.norm());
      tr.populations.push_back(lab_populations(v));
      tr.jump_probability.push_back(jump);
    });
    return tr;
  }

  const Mat8 rho0 = psi0 * psi0.adjoint();
  State x(64);
  Eigen::Map<Mat8>(x.data()) = rho0;
  auto rhs = [&](const State& s, State& ds, double t) {
    const Eigen::Map<const Mat8> rho(s.data());
    const Mat8 h = model.hermitian(t) + model.anti;
    Mat8 out = cplx(0.0, -1.0) * (h * rho - rho * h.adjoint());
    for (const auto& l : model.ls) out += l * rho * l.adjoint();
    Eigen::Map<Mat8>(ds.data()) = out;
  };
  integrate(rhs, x, times, io, [&](std::size_t i, const State& s) {
    const Eigen::Map<const Mat8> rho(s.data());
    const Eigen::VectorXd diag = rho.diagonal().real();
    check_leak(diag, times[i]);
    tr.rhos.emplace_back(rho);
    tr.norm.push_back(rho.trace().real());
    Populations p;
    p.g00 = diag(kG00);
    p.g01 = diag(kG01);
    p.g10 = diag(kG10);
    p.e00 = diag(kE00);
    tr.populations.push_back(p);
  });
  return tr;
}

Vec3 to_conditional(const VecX& lab) {
  if (lab.size() != kLabDim) throw NumericalError(ErrorCode::invalid_argument, "expected 8 components");
  return Vec3(lab(kG10), lab(kE00), lab(kG01));
}

VecX from_conditional(const Vec3& s) {
  VecX v = VecX::Zero(kLabDim);
  v(kG10) = s(0);
  v(kE00) = s(1);
  v(kG01) = s(2);
  return v;
}

VecX postselect(const VecX& psi, double eps) {
  VecX out;
  if (psi.size() == 3) {
    out = psi;
  } else if (psi.size() == kLabDim) {
    out = VecX::Zero(kLabDim);
    for (int i : {kG10, kE00, kG01}) out(i) = psi(i);
  } else {
    throw NumericalError(ErrorCode::invalid_argument, "postselect expects 3 or 8 components");
  }
  const double n = out.norm();
  if (n < eps) throw NumericalError(ErrorCode::vanishing_projection, "state has no weight in S");
  return out / n;
}

Mat3 postselect(const MatX& rho, double eps) {
  if (rho.rows() != kLabDim || rho.cols() != kLabDim) {
    throw NumericalError(ErrorCode::invalid_argument, "postselect expects an 8x8 density matrix");
  }
  const std::array<int, 3> idx{kG10, kE00, kG01};
  Mat3 block;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) block(i, j) = rho(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  const double tr = block.trace().real();
  if (tr < eps) throw NumericalError(ErrorCode::vanishing_projection, "density matrix has no weight in S");
  return block / tr;
}

std::vector<double> fit_sample_times(const FitOptions& o) {
  if (o.n_base < 1 || !(o.delta > 0.0) || o.window < 0.0 || o.window >= o.delta) {
    throw NumericalError(ErrorCode::invalid_argument, "fit needs n_base >= 1 and 0 <= window < delta");
  }
  std::vector<double> t;
  for (int j = 0; j < o.n_base; ++j) t.push_back(o.t0 + o.window * j / o.n_base);
  for (int j = 0; j < o.n_base; ++j) t.push_back(o.t0 + o.window * j / o.n_base + o.delta);
  return t;
}

FitResult fit_eigensystem(const std::array<std::vector<Vec3>, 3>& states, const FitOptions& o) {
  const auto n = static_cast<std::size_t>(o.n_base);
  for (const auto& s : states) {
    if (s.size() != 2 * n) {
      throw NumericalError(ErrorCode::invalid_argument, "trajectories do not match fit_sample_times");
    }
  }
  auto u_at = [&](std::size_t idx) {
    Mat3 u;
    for (int col = 0; col < 3; ++col) u.col(col) = states[static_cast<std::size_t>(col)][idx];
    return u;
  };
  Mat3 sum = Mat3::Zero();
  std::vector<std::pair<Mat3, Mat3>> pairs;
  for (std::size_t j = 0; j < n; ++j) {
    const Mat3 a = u_at(j), b = u_at(j + n);
    const Eigen::JacobiSVD<Mat3> svd(a);
    const auto sv = svd.singularValues();
    if (!a.allFinite() || !b.allFinite() || !(sv(2) > 1e-12 * sv(0))) {
      throw NumericalError(ErrorCode::singular_state_matrix, "state matrix is singular at base time " + std::to_string(j));
    }
    const Mat3 step = b * a.inverse();
    const Mat3 h = (kI / o.delta) * Mat3(step.log());
    const Eigen::ComplexEigenSolver<Mat3> es(h, false);
    for (int k = 0; k < 3; ++k) {
      if (std::abs(es.eigenvalues()(k) * o.delta) >= kPi / 2.0) {
        throw NumericalError(ErrorCode::branch_ambiguity, "|E delta| reaches pi/2; shorten delta");
      }
    }
    sum += h;
    pairs.emplace_back(a, b);
  }
  FitResult r;
  r.h_fit = sum / static_cast<double>(n);
  r.system = eig_biorthogonal(r.h_fit, o.eig);
  const Mat3 prop = Mat3(cplx(0.0, -o.delta) * r.h_fit).exp();
  for (const auto& [a, b] : pairs) {
    r.residual = std::max(r.residual, (prop * a - b).norm() / b.norm());
  }
  return r;
}

std::array<std::vector<Vec3>, 3> lab_fit_data(const CircuitParams& c,
                                              const std::vector<double>& times,
                                              const ScheduleOptions& schedule,
                                              const LabOptions& options) {
  const std::vector<double> grid = sorted_unique(times);
  const auto rates = frame_rates(c, schedule.stark_compensation);
  Eigen::Matrix<cplx, 8, Eigen::Dynamic> psi0 = Eigen::Matrix<cplx, 8, Eigen::Dynamic>::Zero(8, 3);
  psi0(kG10, 0) = psi0(kE00, 1) = psi0(kG01, 2) = 1.0;
  std::vector<Eigen::Matrix<cplx, 8, 3>> states;
  const LabModel model(c);
  evolve_nojump_columns(model, psi0, grid, lab_integrator(c, options.integrator),
                        [&](std::size_t i, const auto& m, double) {
                          const Eigen::VectorXd pops = m.cwiseAbs2().rowwise().sum();
                          if (leakage(pops) > options.truncation_tol) {
                            throw NumericalError(ErrorCode::truncation_violation,
                                                 "leakage at t = " + std::to_string(grid[i]));
                          }
                          states.emplace_back(m);
                        });
  std::array<std::vector<Vec3>, 3> out;
  for (double t : times) {
    const auto idx = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
    for (int col = 0; col < 3; ++col) {
      Vec3 v = to_conditional(states[idx].col(col));
      for (int j = 0; j < 3; ++j) v(j) *= std::polar(1.0, rates[static_cast<std::size_t>(j)] * t);
      out[static_cast<std::size_t>(col)].push_back(v);
    }
  }
  return out;
}

ExperimentResult berry_phase_experiment(const CircuitParams& base, const BerryLoopSpec& loop,
                                        const ExperimentOptions& options) {
  if (options.theta_points < 3) {
    throw NumericalError(ErrorCode::invalid_argument, "need at least three loop points");
  }
  const double kappa = es_kappa(base.kappa_d2);
  const double scale = kappa / loop.kappa;
  const std::vector<double> times = fit_sample_times(options.fit);
  ExperimentResult res;
  res.points.resize(static_cast<std::size_t>(options.theta_points));
  detail::parallel_for(options.theta_points, options.threads, [&](int i) {
    ExperimentPoint& pt = res.points[static_cast<std::size_t>(i)];
    pt.theta = kTwoPi * i / options.theta_points;
    const double omega1 = kappa / 3.0;
    const double omega2 = scale * loop.q3(pt.theta);
    const double q_perp = scale * loop.q_perp(pt.theta);
    std::array<std::vector<Vec3>, 3> data;
    if (options.mode == ExperimentMode::effective) {
      pt.circuit = base;
      const Mat3 h = conditional_hamiltonian(omega1, omega2, base.kappa_d2, q_perp);
      const std::vector<double> grid = sorted_unique(times);
      for (int col = 0; col < 3; ++col) {
        VecX s = VecX::Zero(3);
        s(col) = 1.0;
        const Trajectory tr = evolve_conditional(h, s, grid, options.lab.integrator);
        for (double t : times) {
          const auto idx = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
          data[static_cast<std::size_t>(col)].push_back(tr.states[idx]);
        }
      }
    } else {
      pt.circuit = schedule_point(base, omega1, omega2, q_perp, options.schedule);
      data = lab_fit_data(pt.circuit, times, options.schedule, options.lab);
    }
    pt.fit = fit_eigensystem(data, options.fit);
  });

  std::vector<double> thetas;
  std::vector<BiorthEigensystem> frames;
  for (const auto& p : res.points) {
    thetas.push_back(p.theta);
    frames.push_back(p.fit.system);
  }
  PathOptions po;
  po.max_loops = options.max_loops;
  po.max_increment = kPi / 2.0;
  const TrackedLoop track = track_frames(thetas, frames, po);
  int band = 0;
  const VecX& v = track.frames.front().values;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v(k).real() < v(band).real()) band = static_cast<int>(k);
  }
  res.braid = braid_from_track(track, band, options.max_loops);
  return res;
}

}  // namespace esurf
