#include "commands.hpp"

#include "format.hpp"

#include "esurf/dynamics.hpp"
#include "esurf/invariants.hpp"
#include "esurf/spectra.hpp"

#include <ostream>

namespace esurf::cli {
namespace {

std::string perm_string(const Permutation& p) {
  std::string s;
  for (int i : p) s += (s.empty() ? "" : " ") + std::to_string(i);
  return s;
}

std::string model_name(SSH3Model m) { return m == SSH3Model::one ? "one" : "two"; }

BerryLoopSpec loop_spec(const BerrySection& b) {
  BerryLoopSpec s;
  s.offset = b.delta;
  s.radius = b.radius;
  s.kappa = b.kappa;
  s.steps_per_loop = b.steps;
  s.max_loops = b.max_loops;
  return s;
}

std::vector<std::string> braid_row(const BerryLoopSpec& s, const std::optional<BraidResult>& r,
                                   const std::string& status) {
  if (!r) {
    return {num(s.offset), num(s.radius), num(s.kappa), num(s.ring_ratio()), "", "", "", "", status};
  }
  return {num(s.offset), num(s.radius), num(s.kappa), num(s.ring_ratio()), num(r->phase),
          num(r->phase / kTwoPi), perm_string(r->permutation), num(r->loops_to_close), status};
}

const std::vector<std::string> kBraidColumns{"delta", "radius", "kappa", "ratio", "phase",
                                             "phase_over_2pi", "permutation", "loops_to_close",
                                             "status"};

}  // namespace

std::vector<Table> run_spectrum(const RunConfig& cfg) {
  const auto& m = cfg.model;
  Table t{"es_scan", {"q1", "q2", "q3", "q4", "kappa", "band", "reE", "imE", "class"}, {}};
  for (const auto& row : es_scan(m.q1, m.q2, m.q3, m.q4, m.kappa, m.tol)) {
    t.add({num(row.point.q1), num(row.point.q2), num(row.point.q3), num(row.point.q4),
           num(row.point.kappa), num(row.band), num(row.energy.real()), num(row.energy.imag()),
           std::string(to_string(row.kind))});
  }
  return {t};
}

std::vector<Table> run_dd(const RunConfig& cfg) {
  DDRequest tmpl;
  tmpl.kappa = cfg.dd.kappa;
  tmpl.n_alpha = cfg.dd.n_alpha;
  tmpl.n_beta = cfg.dd.n_beta;
  tmpl.n_phi = cfg.dd.n_phi;
  tmpl.policy = cfg.dd.policy;
  tmpl.threads = cfg.output.threads;
  Table t{"dd_sweep", {"ratio", "kappa", "dd", "status", "detail"}, {}};
  for (const auto& row : dd_sweep(cfg.dd.ratios, tmpl)) {
    t.add({num(row.ratio), num(cfg.dd.kappa), row.status == "ok" ? num(row.dd) : "", row.status,
           row.detail});
  }
  return {t};
}

std::vector<Table> run_berry(const RunConfig& cfg) {
  const BerryLoopSpec spec = loop_spec(cfg.berry);
  std::vector<Table> out;

  Table loop{"berry_loop", kBraidColumns, {}};
  try {
    loop.add(braid_row(spec, berry_phase(spec), "ok"));
  } catch (const NumericalError& e) {
    loop.add(braid_row(spec, std::nullopt, std::string(to_string(e.code()))));
  }
  out.push_back(std::move(loop));

  if (cfg.berry.sweep.n > 0) {
    const double ring = kExceptionalRingRadius * spec.kappa;
    std::vector<double> deltas;
    for (int i = 0; i < cfg.berry.sweep.n; ++i) deltas.push_back(spec.radius + cfg.berry.sweep.at(i) * ring);
    Table sweep{"berry_sweep", kBraidColumns, {}};
    for (const auto& row : berry_transition_sweep(deltas, spec, cfg.output.threads)) {
      BerryLoopSpec s = spec;
      s.offset = row.delta;
      sweep.add(braid_row(s, row.result, row.status));
    }
    out.push_back(std::move(sweep));
  }

  if (cfg.berry.track) {
    PathOptions po;
    po.steps_per_loop = spec.steps_per_loop;
    po.max_loops = spec.max_loops;
    const RiemannTrack tr = riemann_track([&](double th) { return MatX(build_h_berry(spec, th)); }, po);
    Table track{"berry_track", {"theta", "band", "reE", "imE"}, {}};
    for (const auto& s : tr.samples) track.add({num(s.theta), num(s.band), num(s.energy.real()), num(s.energy.imag())});
    out.push_back(std::move(track));
  }
  return out;
}

std::vector<Table> run_ssh3(const RunConfig& cfg) {
  SSH3Params p = cfg.ssh3.params;
  const Axis axis = cfg.ssh3.t1_sweep.n > 1 ? cfg.ssh3.t1_sweep : Axis{p.t1, p.t1, 1};
  Table spectrum{"ssh3_spectrum", {"model", "t1", "bc", "index", "reE", "imE"}, {}};
  for (const auto& r : ssh3_t1_sweep(p, axis)) {
    spectrum.add({model_name(p.model), num(r.t1), r.bc == Boundary::open ? "open" : "periodic",
                  num(r.index), num(r.energy.real()), num(r.energy.imag())});
  }

  p.bc = Boundary::open;
  const NHSEMetrics on = nhse_metrics(ssh3_chain_eigensystem(p), p.cells);
  const double ep3_obc = ep3_measure(ssh3_chain_spectrum(p));
  SSH3Params control = p;
  control.gamma = 0.0;
  const NHSEMetrics off = nhse_metrics(ssh3_chain_eigensystem(control), p.cells);
  const double ep3_pbc = ep3_measure(ssh3_bloch_union(p));
  std::string winding, status = "ok";
  try {
    winding = num(spectral_winding(p, cfg.ssh3.e_ref, cfg.ssh3.n_k).winding);
  } catch (const NumericalError& e) {
    status = std::string(to_string(e.code()));
  }
  Table metrics{"ssh3_metrics",
                {"model", "t1", "t2", "w1", "w2", "gamma", "cells", "boundary_weight", "mean_ipr",
                 "control_boundary_weight", "control_mean_ipr", "ep3_pbc", "ep3_obc", "e_ref_re",
                 "e_ref_im", "winding", "winding_status"},
                {}};
  metrics.add({model_name(p.model), num(p.t1), num(p.t2), num(p.w1), num(p.w2), num(p.gamma),
               num(p.cells), num(on.boundary_weight), num(on.mean_ipr), num(off.boundary_weight),
               num(off.mean_ipr), num(ep3_pbc), num(ep3_obc), num(cfg.ssh3.e_ref.real()),
               num(cfg.ssh3.e_ref.imag()), winding, status});
  return {spectrum, metrics};
}

std::vector<Table> run_dynamics(const RunConfig& cfg, std::ostream& log) {
  const auto& d = cfg.dynamics;
  const CircuitParams& base = cfg.circuit;
  for (const auto& w : resonance_warnings(base)) log << "warning: " << w << "\n";

  ScheduleOptions so;
  so.stark_compensation = d.stark_compensation;
  so.include_spectator = d.include_spectator;
  BerryLoopSpec loop;
  loop.offset = d.loop_delta;
  loop.radius = d.loop_radius;
  loop.kappa = 1.0;
  const double kappa = es_kappa(base.kappa_d2);
  const double omega1 = kappa / 3.0, omega2 = kappa * loop.q3(0.0), q_perp = kappa * loop.q_perp(0.0);

  std::vector<double> times;
  for (int i = 0; i <= d.samples; ++i) times.push_back(d.t_end * i / d.samples);

  Table traj{"dynamics_trajectory",
             {"source", "t", "p_e00", "p_g10", "p_g01", "p_g00", "norm", "jump_probability"},
             {}};
  auto emit = [&](const std::string& source, const Trajectory& tr) {
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const auto& p = tr.populations[i];
      traj.add({source, num(tr.times[i]), num(p.e00), num(p.g10), num(p.g01), num(p.g00), num(tr.norm[i]),
                tr.jump_probability.empty() ? "" : num(tr.jump_probability[i])});
    }
  };
  emit("effective", evolve_conditional(conditional_hamiltonian(omega1, omega2, base.kappa_d2, q_perp),
                                       VecX::Unit(3, 1), times));
  const CircuitParams scheduled = schedule_point(base, omega1, omega2, q_perp, so);
  emit("lab", evolve_lab_frame(scheduled, VecX::Unit(kLabDim, kE00), times, d.trajectory_mode));

  ExperimentOptions eo;
  eo.mode = d.mode;
  eo.theta_points = d.theta_points;
  eo.schedule = so;
  eo.threads = cfg.output.threads;
  eo.fit.delta = d.fit_delta;
  eo.fit.window = d.fit_window;
  eo.fit.n_base = d.fit_base;
  const ExperimentResult ex = berry_phase_experiment(base, loop, eo);

  Table fit{"dynamics_fit", {"theta", "band", "reE", "imE", "residual"}, {}};
  Table schedule{"dynamics_schedule", {"theta", "eps1_mhz", "eps2_mhz", "nu1_mhz", "nu2_mhz"}, {}};
  for (const auto& pt : ex.points) {
    for (Eigen::Index b = 0; b < pt.fit.system.values.size(); ++b) {
      const cplx e = pt.fit.system.values(b);
      fit.add({num(pt.theta), num(static_cast<int>(b)), num(e.real()), num(e.imag()), num(pt.fit.residual)});
    }
    const CircuitParams& c = pt.circuit;
    schedule.add({num(pt.theta), num(c.eps1 / mhz(1.0)), num(c.eps2 / mhz(1.0)), num(c.nu1 / mhz(1.0)),
                  num(c.nu2 / mhz(1.0))});
  }
  Table berry{"dynamics_berry",
              {"mode", "theta_points", "phase", "phase_over_2pi", "permutation", "loops_to_close"},
              {}};
  berry.add({d.mode == ExperimentMode::lab ? "lab" : "effective", num(d.theta_points), num(ex.braid.phase),
             num(ex.braid.phase / kTwoPi), perm_string(ex.braid.permutation), num(ex.braid.loops_to_close)});
  return {traj, fit, schedule, berry};
}

}  // namespace esurf::cli
