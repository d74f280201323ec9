#include "esurf/invariants.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace esurf {
namespace {

double a_of_alpha(double radius, double kappa, double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return (6.0 * c * c - 3.0 * s * s) * radius * radius + 2.0 * kappa * kappa;
}

int select_band(const VecX& values, BandPolicy policy) {
  Eigen::Index best = 0;
  for (Eigen::Index n = 1; n < values.size(); ++n) {
    const cplx v = values(n), b = values(best);
    bool better = false;
    switch (policy) {
      case BandPolicy::lowest_real: better = v.real() < b.real(); break;
      case BandPolicy::lowest_imag: better = v.imag() < b.imag(); break;
      case BandPolicy::highest_imag: better = v.imag() > b.imag(); break;
      case BandPolicy::automatic: break;
    }
    if (better) best = n;
  }
  return static_cast<int>(best);
}

std::string describe_node(double a, double b, double f) {
  std::ostringstream os;
  os.precision(10);
  os << "(alpha, beta, phi) = (" << a << ", " << b << ", " << f << ")";
  return os.str();
}

double min_gap(const VecX& v) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    for (Eigen::Index j = i + 1; j < v.size(); ++j) g = std::min(g, std::abs(v(i) - v(j)));
  }
  return g;
}

double spectral_scale(const VecX& v) {
  const double s = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
  return s > 0.0 ? s : 1.0;
}

// Eigenvectors in the gauge where component k of every right vector is real
// and positive; left vectors follow so that <L|R> = 1 is kept.
struct GaugedFrame {
  MatX right;
  MatX left;
};

GaugedFrame gauge_frame(const BiorthEigensystem& es, int k) {
  GaugedFrame g{es.right, es.left};
  for (Eigen::Index n = 0; n < es.size(); ++n) {
    const cplx c = es.right(k, n);
    const double mag = std::abs(c);
    if (mag < 1e-8 * es.right.col(n).norm()) {
      throw NumericalError(ErrorCode::vanishing_projection,
                           "gauge component " + std::to_string(k) + " vanishes on band " +
                               std::to_string(n));
    }
    const cplx ph = c / mag;
    g.right.col(n) /= ph;
    g.left.row(n) *= ph;
  }
  return g;
}

enum class StepStatus { ok, refine };

struct StepResult {
  StepStatus status = StepStatus::ok;
  Permutation perm;
  std::vector<double> increments;
  std::string reason;
};

StepResult evaluate_step(const BiorthEigensystem& a, const GaugedFrame& ga,
                         const BiorthEigensystem& b, const GaugedFrame& gb,
                         const PathOptions& options) {
  StepResult r;
  try {
    r.perm = match_bands(a, b);
  } catch (const NumericalError& e) {
    if (e.code() != ErrorCode::ambiguous_match) throw;
    r.status = StepStatus::refine;
    r.reason = e.what();
    return r;
  }
  const double gap = min_gap(a.values);
  const auto n = static_cast<std::size_t>(a.size());
  r.increments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(r.perm[i]);
    const auto ii = static_cast<Eigen::Index>(i);
    if (std::abs(a.values(ii) - b.values(j)) > 0.5 * gap) {
      r.status = StepStatus::refine;
      r.reason = "eigenvalue jump comparable to the gap";
      return r;
    }
    const cplx ov = (ga.left.row(ii) * gb.right.col(j))(0);
    const double d = -std::arg(ov);
    if (std::abs(d) > options.max_increment) {
      r.status = StepStatus::refine;
      r.reason = "phase increment above limit";
      return r;
    }
    r.increments[i] = d;
  }
  return r;
}

BiorthEigensystem sample(const MatrixFamily& family, double theta, const PathOptions& options) {
  BiorthEigensystem es;
  try {
    es = eig_biorthogonal(family(theta), options.eig);
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "theta = " << theta << ": " << e.what();
    throw NumericalError(ErrorCode::ep_on_path, os.str());
  }
  if (min_gap(es.values) < options.gap_tol * spectral_scale(es.values)) {
    std::ostringstream os;
    os << "theta = " << theta << ": eigenvalues coalesce (gap " << min_gap(es.values) << ")";
    throw NumericalError(ErrorCode::ep_on_path, os.str());
  }
  return es;
}

int pick_gauge_component(const BiorthEigensystem& es) {
  // Component whose smallest magnitude over the bands is largest.
  int best = 0;
  double best_val = -1.0;
  for (Eigen::Index k = 0; k < es.right.rows(); ++k) {
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < es.size(); ++n) worst = std::min(worst, std::abs(es.right(k, n)));
    if (worst > best_val) {
      best_val = worst;
      best = static_cast<int>(k);
    }
  }
  return best;
}

void finish_track(TrackedLoop& t) {
  t.per_loop = identity_permutation(static_cast<int>(t.frames.front().size()));
  for (const auto& p : t.steps) t.per_loop = compose(t.per_loop, p);
}

}  // namespace

double es_distance(double kappa) { return std::abs(kappa); }

DDBandPlan dd_band_plan(double radius, double kappa) {
  DDBandPlan plan;
  if (kappa == 0.0) return plan;
  const double b = radius * radius - kappa * kappa;
  const double a0 = a_of_alpha(radius, kappa, 0.0);
  const double a1 = a_of_alpha(radius, kappa, kPi / 2.0);
  const bool a_changes_sign = a0 * a1 <= 0.0;
  const double scale2 = radius * radius + kappa * kappa;
  if (std::abs(b) <= 1e-9 * scale2 && a_changes_sign) {
    plan.touches_ep3 = true;
    return plan;
  }
  const double a2_min = a_changes_sign ? 0.0 : std::min(a0 * a0, a1 * a1);
  const double a2_max = std::max(a0 * a0, a1 * a1);
  const double d_min = 4.0 * b * b * b + kappa * kappa * a2_min;
  const double d_max = 4.0 * b * b * b + kappa * kappa * a2_max;
  if (d_min > 0.0) {
    plan.policy = BandPolicy::lowest_real;
    return plan;
  }
  if (d_max < 0.0) {
    plan.policy = BandPolicy::lowest_imag;
    return plan;
  }
  plan.crosses_ep2 = true;
  if (a_changes_sign) {
    plan.obstructed = true;
    return plan;
  }
  // Where disc > 0 the isolated band is the one on the imaginary axis; it
  // stays on the same side of the coalescing pair throughout.
  const double alpha = a0 * a0 >= a1 * a1 ? 0.0 : kPi / 2.0;
  const auto e = eig_closed_form_3x3(sphere_point(radius, kappa, {alpha, 0.0, 0.0}));
  std::size_t iso = 0;
  for (std::size_t n = 1; n < 3; ++n) {
    if (std::abs(e[n].real()) < std::abs(e[iso].real())) iso = n;
  }
  const double other = e[(iso + 1) % 3].imag();
  plan.policy = e[iso].imag() < other ? BandPolicy::lowest_imag : BandPolicy::highest_imag;
  return plan;
}

DDResult dd_invariant(const DDRequest& req) {
  if (req.n_alpha < 1 || req.n_beta < 1 || req.n_phi < 1 || !(req.radius > 0.0)) {
    throw NumericalError(ErrorCode::invalid_argument, "DD grid sizes and radius must be positive");
  }
  DDResult out;
  out.ratio = req.kappa != 0.0 ? req.radius / es_distance(req.kappa) : 0.0;
  const DDBandPlan plan = dd_band_plan(req.radius, req.kappa);
  if (plan.touches_ep3) {
    throw NumericalError(ErrorCode::grid_hits_ep, "sphere meets the exceptional surface");
  }
  if (plan.obstructed) {
    throw NumericalError(ErrorCode::grid_hits_ep,
                         "no band is isolated from EP2 coalescences over the whole sphere");
  }
  const BandPolicy policy = req.policy == BandPolicy::automatic ? plan.policy : req.policy;
  out.band_used = policy;

  const double da = kPi / 2.0 / req.n_alpha;
  const double db = kTwoPi / req.n_beta;
  const double df = kTwoPi / req.n_phi;
  const Chart3 chart = sphere_chart(req.radius, req.kappa);

  struct Slab {
    double metric = 0.0, curv_paper = 0.0, curv_sym = 0.0, min_det = 0.0;
    long negative = 0;
  };
  std::vector<Slab> slabs(static_cast<std::size_t>(req.n_alpha));
  detail::parallel_for(req.n_alpha, req.threads, [&](int i) {
    Slab s;
    s.min_det = std::numeric_limits<double>::infinity();
    const double a = (i + 0.5) * da;
    for (int j = 0; j < req.n_beta; ++j) {
      const double b = (j + req.beta_shift) * db;
      for (int k = 0; k < req.n_phi; ++k) {
        const double f = (k + req.phi_shift) * df;
        const Coords3 x{a, b, f};
        QGTResult q;
        try {
          const BiorthEigensystem es = eig_biorthogonal(chart.h(x), req.qgt.eig);
          q = qgt_sum(es, chart.dh(x), select_band(es.values, policy), req.qgt);
        } catch (const NumericalError& e) {
          throw NumericalError(ErrorCode::grid_hits_ep, describe_node(a, b, f) + ": " + e.what());
        }
        q.at = x;
        ThreeForm t;
        try {
          t = three_form(q);
        } catch (const NumericalError& e) {
          if (e.code() != ErrorCode::negative_determinant) throw;
          ++s.negative;
          t.det_g = q.g.determinant();
          t.m_metric = 0.0;
          t.m_curv_paper = -0.5 * (q.f(0, 1) + q.f(2, 0));
          t.m_curv_sym = -0.5 * (q.f(0, 1) + q.f(1, 2) + q.f(2, 0));
        }
        s.min_det = std::min(s.min_det, t.det_g);
        s.metric += t.m_metric;
        s.curv_paper += t.m_curv_paper;
        s.curv_sym += t.m_curv_sym;
      }
    }
    slabs[static_cast<std::size_t>(i)] = s;
  });

  const double w = da * db * df / (2.0 * kPi * kPi);
  out.min_det_g = std::numeric_limits<double>::infinity();
  for (const Slab& s : slabs) {
    out.dd += s.metric * w;
    out.dd_curv_paper += s.curv_paper * w;
    out.dd_curv_sym += s.curv_sym * w;
    out.negative_det_nodes += s.negative;
    out.min_det_g = std::min(out.min_det_g, s.min_det);
  }
  return out;
}

std::vector<DDRow> dd_sweep(const std::vector<double>& ratios, const DDRequest& tmpl) {
  std::vector<DDRow> rows;
  rows.reserve(ratios.size());
  for (const double ratio : ratios) {
    DDRow row;
    row.ratio = ratio;
    DDRequest req = tmpl;
    req.radius = tmpl.kappa != 0.0 ? ratio * es_distance(tmpl.kappa) : ratio;
    try {
      row.dd = dd_invariant(req).dd;
      row.status = "ok";
    } catch (const NumericalError& first) {
      if (first.code() != ErrorCode::grid_hits_ep) throw;
      DDRequest shifted = req;
      shifted.n_alpha += 1;
      shifted.beta_shift = 0.5;
      shifted.phi_shift = 0.5;
      try {
        row.dd = dd_invariant(shifted).dd;
        row.status = "ok";
        row.detail = "shifted grid";
      } catch (const NumericalError& second) {
        if (second.code() != ErrorCode::grid_hits_ep) throw;
        row.dd = std::numeric_limits<double>::quiet_NaN();
        row.status = "Ill-Defined";
        row.detail = second.what();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

TrackedLoop track_loop(const MatrixFamily& family, const PathOptions& options) {
  if (options.steps_per_loop < 16) {
    throw NumericalError(ErrorCode::invalid_argument, "steps_per_loop must be at least 16");
  }
  const int n0 = options.steps_per_loop;
  TrackedLoop t;
  t.thetas.resize(static_cast<std::size_t>(n0));
  t.frames.resize(static_cast<std::size_t>(n0));
  for (int i = 0; i < n0; ++i) {
    t.thetas[static_cast<std::size_t>(i)] = kTwoPi * i / n0;
    t.frames[static_cast<std::size_t>(i)] = sample(family, t.thetas[static_cast<std::size_t>(i)], options);
  }
  t.gauge_component = pick_gauge_component(t.frames.front());
  std::vector<GaugedFrame> gauged;
  gauged.reserve(t.frames.size());
  for (const auto& f : t.frames) gauged.push_back(gauge_frame(f, t.gauge_component));

  const double min_width = kTwoPi / n0 / std::ldexp(1.0, options.max_bisections);
  std::size_t i = 0;
  while (i < t.frames.size()) {
    const std::size_t next = (i + 1) % t.frames.size();
    const double th_next = next == 0 ? kTwoPi : t.thetas[next];
    StepResult step = evaluate_step(t.frames[i], gauged[i], t.frames[next], gauged[next], options);
    if (step.status == StepStatus::ok) {
      t.steps.push_back(std::move(step.perm));
      t.increments.push_back(std::move(step.increments));
      ++i;
      continue;
    }
    const double width = th_next - t.thetas[i];
    if (width < min_width) {
      std::ostringstream os;
      os << "cannot resolve step at theta = " << t.thetas[i] << ": " << step.reason;
      throw NumericalError(ErrorCode::ep_on_path, os.str());
    }
    const double mid = t.thetas[i] + 0.5 * width;
    BiorthEigensystem es = sample(family, mid, options);
    GaugedFrame g = gauge_frame(es, t.gauge_component);
    const auto pos = static_cast<std::ptrdiff_t>(i + 1);
    t.thetas.insert(t.thetas.begin() + pos, mid);
    t.frames.insert(t.frames.begin() + pos, std::move(es));
    gauged.insert(gauged.begin() + pos, std::move(g));
  }
  finish_track(t);
  return t;
}

TrackedLoop track_frames(std::vector<double> thetas, std::vector<BiorthEigensystem> frames,
                         const PathOptions& options) {
  if (thetas.size() != frames.size() || frames.size() < 2) {
    throw NumericalError(ErrorCode::invalid_argument, "need at least two frames with angles");
  }
  TrackedLoop t;
  t.thetas = std::move(thetas);
  t.frames = std::move(frames);
  t.gauge_component = pick_gauge_component(t.frames.front());
  std::vector<GaugedFrame> gauged;
  for (const auto& f : t.frames) gauged.push_back(gauge_frame(f, t.gauge_component));
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    const std::size_t next = (i + 1) % t.frames.size();
    StepResult step = evaluate_step(t.frames[i], gauged[i], t.frames[next], gauged[next], options);
    if (step.status != StepStatus::ok) {
      std::ostringstream os;
      os << "frames too coarse at theta = " << t.thetas[i] << ": " << step.reason;
      throw NumericalError(ErrorCode::ep_on_path, os.str());
    }
    t.steps.push_back(std::move(step.perm));
    t.increments.push_back(std::move(step.increments));
  }
  finish_track(t);
  return t;
}

BraidResult braid_from_track(const TrackedLoop& track, int band, int max_loops) {
  BraidResult r;
  r.band = band;
  r.permutation = track.per_loop;
  Permutation composed = identity_permutation(static_cast<int>(track.per_loop.size()));
  int cur = band;
  for (int loop = 1; loop <= max_loops; ++loop) {
    for (std::size_t i = 0; i < track.steps.size(); ++i) {
      const double d = track.increments[i][static_cast<std::size_t>(cur)];
      r.phase += d;
      r.increments.push_back(d);
      cur = track.steps[i][static_cast<std::size_t>(cur)];
    }
    composed = compose(composed, track.per_loop);
    if (is_identity(composed)) {
      r.loops_to_close = loop;
      return r;
    }
  }
  throw NumericalError(ErrorCode::no_closure,
                       "permutation did not close within " + std::to_string(max_loops) + " loops");
}

BraidResult berry_phase(const MatrixFamily& family, const PathOptions& options) {
  const TrackedLoop track = track_loop(family, options);
  int band = options.start_band;
  if (band < 0) {
    const VecX& v = track.frames.front().values;
    band = 0;
    for (Eigen::Index n = 1; n < v.size(); ++n) {
      if (v(n).real() < v(band).real()) band = static_cast<int>(n);
    }
  }
  return braid_from_track(track, band, options.max_loops);
}

BraidResult berry_phase(const BerryLoopSpec& spec) {
  PathOptions o;
  o.steps_per_loop = spec.steps_per_loop;
  o.max_loops = spec.max_loops;
  return berry_phase([spec](double th) -> MatX { return build_h_berry(spec, th); }, o);
}

BraidResult berry_phase(const TwoLevelLoopSpec& spec) {
  PathOptions o;
  o.steps_per_loop = spec.steps_per_loop;
  o.max_loops = spec.max_loops;
  return berry_phase([spec](double th) -> MatX { return build_h_twolevel(spec.at(th), true); },
                     o);
}

std::vector<BerrySweepRow> berry_transition_sweep(const std::vector<double>& deltas,
                                                  const BerryLoopSpec& tmpl, int threads) {
  std::vector<BerrySweepRow> rows(deltas.size());
  detail::parallel_for(static_cast<int>(deltas.size()), threads, [&](int i) {
    BerryLoopSpec spec = tmpl;
    spec.offset = deltas[static_cast<std::size_t>(i)];
    BerrySweepRow& row = rows[static_cast<std::size_t>(i)];
    row.delta = spec.offset;
    row.ratio = spec.ring_ratio();
    try {
      row.result = berry_phase(spec);
      row.status = "ok";
    } catch (const NumericalError& e) {
      row.status = std::string(to_string(e.code()));
    }
  });
  return rows;
}

std::optional<std::pair<double, double>> locate_transition(const std::vector<BerrySweepRow>& rows) {
  const BerrySweepRow* prev = nullptr;
  for (const auto& row : rows) {
    if (!row.result) continue;
    if (prev != nullptr && std::abs(row.result->phase - prev->result->phase) > kPi) {
      return std::make_pair(prev->ratio, row.ratio);
    }
    prev = &row;
  }
  return std::nullopt;
}

WindingResult spectral_winding(const SSH3Params& p, cplx e_ref, int n_k) {
  if (n_k < 3) throw NumericalError(ErrorCode::invalid_argument, "n_k must be at least 3");
  struct Node {
    double k;
    cplx det;
    VecX values;
  };
  auto eval = [&](double k) {
    const Mat3 h = build_ssh3_bloch(p, k);
    const auto e = eig_closed_form_3x3(h);
    VecX v(3);
    for (int n = 0; n < 3; ++n) v(n) = e[static_cast<std::size_t>(n)];
    const double scale = std::max(spectral_scale(v), std::abs(e_ref));
    for (int n = 0; n < 3; ++n) {
      if (std::abs(v(n) - e_ref) < 1e-9 * scale) {
        std::ostringstream os;
        os << "E_ref on the Bloch spectrum at k = " << k;
        throw NumericalError(ErrorCode::ref_on_spectrum, os.str());
      }
    }
    return Node{k, (h - e_ref * Mat3::Identity()).determinant(), v};
  };
  std::vector<Node> nodes;
  for (int i = 0; i < n_k; ++i) nodes.push_back(eval(kTwoPi * i / n_k));

  WindingResult r;
  r.permutation = identity_permutation(3);
  double total = 0.0;
  const double min_width = kTwoPi / n_k / std::ldexp(1.0, 30);
  std::size_t i = 0;
  Node closing = nodes.front();
  closing.k = kTwoPi;
  while (i < nodes.size()) {
    const Node& a = nodes[i];
    const Node& b = i + 1 < nodes.size() ? nodes[i + 1] : closing;
    const double d = std::arg(b.det / a.det);
    std::optional<Permutation> perm;
    try {
      perm = match_values(a.values, b.values);
    } catch (const NumericalError& e) {
      if (e.code() != ErrorCode::ambiguous_match) throw;
    }
    if (std::abs(d) <= kPi / 2.0 && perm) {
      total += d;
      r.permutation = compose(r.permutation, *perm);
      ++i;
      continue;
    }
    if (b.k - a.k < min_width) {
      throw NumericalError(ErrorCode::ref_on_spectrum, "winding increment cannot be resolved");
    }
    const double mid = 0.5 * (a.k + b.k);
    nodes.insert(nodes.begin() + static_cast<std::ptrdiff_t>(i + 1), eval(mid));
  }
  r.winding = total / kTwoPi;
  return r;
}

}  // namespace esurf
