#include "config.hpp"

#include "format.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace esurf::cli {
namespace {

namespace pt = boost::property_tree;

struct Binding {
  std::function<void(const std::string&)> read;
  std::function<std::string()> write;
};

// Ordered: section -> ordered keys. std::vector keeps emit order stable.
using Section = std::vector<std::pair<std::string, Binding>>;
using Schema = std::vector<std::pair<std::string, Section>>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int i = std::stoi(v, &used);
    if (trim(v.substr(used)).empty()) return i;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <class E>
E to_enum(const std::string& key, const std::string& v, const std::map<std::string, E>& names) {
  const auto it = names.find(v);
  if (it == names.end()) {
    std::string allowed;
    for (const auto& [n, _] : names) allowed += (allowed.empty() ? "" : "|") + n;
    throw ConfigError(key + ": expected one of " + allowed + ", got '" + v + "'");
  }
  return it->second;
}

template <class E>
std::string enum_name(E value, const std::map<std::string, E>& names) {
  for (const auto& [n, e] : names)
    if (e == value) return n;
  return "?";
}

Binding real(const std::string& key, double& x, double unit = 1.0) {
  return {[&x, key, unit](const std::string& v) { x = unit * to_double(key, v); },
          [&x, unit] { return num(x / unit); }};
}

Binding positive_int(const std::string& key, int& x, int min = 1) {
  return {[&x, key, min](const std::string& v) {
            x = to_int(key, v);
            if (x < min) throw ConfigError(key + ": must be at least " + std::to_string(min));
          },
          [&x] { return num(x); }};
}

Binding flag(const std::string& key, bool& x) {
  return {[&x, key](const std::string& v) { x = to_bool(key, v); },
          [&x] { return std::string(x ? "true" : "false"); }};
}

template <class E>
Binding choice(const std::string& key, E& x, std::map<std::string, E> names) {
  return {[&x, key, names](const std::string& v) { x = to_enum(key, v, names); },
          [&x, names] { return enum_name(x, names); }};
}

Binding real_list(const std::string& key, std::vector<double>& xs) {
  return {[&xs, key](const std::string& v) {
            xs.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) xs.push_back(to_double(key, trim(item)));
            if (xs.empty()) throw ConfigError(key + ": empty list");
          },
          [&xs] {
            std::string out;
            for (double x : xs) out += (out.empty() ? "" : ",") + num(x);
            return out;
          }};
}

void add_axis(Section& s, const std::string& name, Axis& a, int min_n = 1) {
  s.emplace_back(name + "_lo", real(name + "_lo", a.lo));
  s.emplace_back(name + "_hi", real(name + "_hi", a.hi));
  s.emplace_back(name + "_n", positive_int(name + "_n", a.n, min_n));
}

const std::map<std::string, BandPolicy> kPolicies{{"automatic", BandPolicy::automatic},
                                                  {"lowest_real", BandPolicy::lowest_real},
                                                  {"lowest_imag", BandPolicy::lowest_imag},
                                                  {"highest_imag", BandPolicy::highest_imag}};

Schema schema(RunConfig& c) {
  Schema out;

  Section model;
  model.emplace_back("kappa", real("model.kappa", c.model.kappa));
  add_axis(model, "q1", c.model.q1);
  add_axis(model, "q2", c.model.q2);
  add_axis(model, "q3", c.model.q3);
  model.emplace_back("q4", real("model.q4", c.model.q4));
  model.emplace_back("tol", real("model.tol", c.model.tol));
  out.emplace_back("model", std::move(model));

  Section dd;
  dd.emplace_back("ratios", real_list("dd.ratios", c.dd.ratios));
  dd.emplace_back("kappa", real("dd.kappa", c.dd.kappa));
  dd.emplace_back("n_alpha", positive_int("dd.n_alpha", c.dd.n_alpha, 2));
  dd.emplace_back("n_beta", positive_int("dd.n_beta", c.dd.n_beta, 2));
  dd.emplace_back("n_phi", positive_int("dd.n_phi", c.dd.n_phi, 2));
  dd.emplace_back("policy", choice("dd.policy", c.dd.policy, kPolicies));
  out.emplace_back("dd", std::move(dd));

  Section berry;
  berry.emplace_back("kappa", real("berry.kappa", c.berry.kappa));
  berry.emplace_back("delta", real("berry.delta", c.berry.delta));
  berry.emplace_back("radius", real("berry.radius", c.berry.radius));
  berry.emplace_back("steps", positive_int("berry.steps", c.berry.steps, 3));
  berry.emplace_back("max_loops", positive_int("berry.max_loops", c.berry.max_loops));
  add_axis(berry, "sweep", c.berry.sweep, 0);
  berry.emplace_back("track", flag("berry.track", c.berry.track));
  out.emplace_back("berry", std::move(berry));

  Section ssh3;
  auto& p = c.ssh3.params;
  ssh3.emplace_back("model", choice("ssh3.model", p.model, std::map<std::string, SSH3Model>{
                                                               {"one", SSH3Model::one}, {"two", SSH3Model::two}}));
  ssh3.emplace_back("t1", real("ssh3.t1", p.t1));
  ssh3.emplace_back("t2", real("ssh3.t2", p.t2));
  ssh3.emplace_back("w1", real("ssh3.w1", p.w1));
  ssh3.emplace_back("w2", real("ssh3.w2", p.w2));
  ssh3.emplace_back("gamma", real("ssh3.gamma", p.gamma));
  ssh3.emplace_back("cells", positive_int("ssh3.cells", p.cells, 2));
  add_axis(ssh3, "t1_sweep", c.ssh3.t1_sweep);
  ssh3.emplace_back("e_ref_re", Binding{[&c](const std::string& v) {
                                          c.ssh3.e_ref.real(to_double("ssh3.e_ref_re", v));
                                        },
                                        [&c] { return num(c.ssh3.e_ref.real()); }});
  ssh3.emplace_back("e_ref_im", Binding{[&c](const std::string& v) {
                                          c.ssh3.e_ref.imag(to_double("ssh3.e_ref_im", v));
                                        },
                                        [&c] { return num(c.ssh3.e_ref.imag()); }});
  ssh3.emplace_back("n_k", positive_int("ssh3.n_k", c.ssh3.n_k, 3));
  out.emplace_back("ssh3", std::move(ssh3));

  // Frequencies in MHz (stored as angular rad/us); rates in 1/us.
  Section circuit;
  const double mhz_unit = mhz(1.0);
  auto& cp = c.circuit;
  circuit.emplace_back("omega_q_mhz", real("circuit.omega_q_mhz", cp.omega_q, mhz_unit));
  circuit.emplace_back("omega_r1_mhz", real("circuit.omega_r1_mhz", cp.omega_r1, mhz_unit));
  circuit.emplace_back("omega_r2_mhz", real("circuit.omega_r2_mhz", cp.omega_r2, mhz_unit));
  circuit.emplace_back("g1_mhz", real("circuit.g1_mhz", cp.g1, mhz_unit));
  circuit.emplace_back("g2_mhz", real("circuit.g2_mhz", cp.g2, mhz_unit));
  circuit.emplace_back("nu1_mhz", real("circuit.nu1_mhz", cp.nu1, mhz_unit));
  circuit.emplace_back("nu2_mhz", real("circuit.nu2_mhz", cp.nu2, mhz_unit));
  circuit.emplace_back("kappa_d2", real("circuit.kappa_d2", cp.kappa_d2));
  circuit.emplace_back("gamma_d", real("circuit.gamma_d", cp.gamma_d));
  circuit.emplace_back("gamma_p", real("circuit.gamma_p", cp.gamma_p));
  circuit.emplace_back("kappa_d1", real("circuit.kappa_d1", cp.kappa_d1));
  circuit.emplace_back("kappa_p1", real("circuit.kappa_p1", cp.kappa_p1));
  circuit.emplace_back("kappa_p2", real("circuit.kappa_p2", cp.kappa_p2));
  out.emplace_back("circuit", std::move(circuit));

  Section dyn;
  auto& d = c.dynamics;
  dyn.emplace_back("mode", choice("dynamics.mode", d.mode, std::map<std::string, ExperimentMode>{
                                                              {"lab", ExperimentMode::lab},
                                                              {"effective", ExperimentMode::effective}}));
  dyn.emplace_back("trajectory_mode",
                   choice("dynamics.trajectory_mode", d.trajectory_mode,
                          std::map<std::string, LabMode>{{"nojump", LabMode::nojump}, {"lindblad", LabMode::lindblad}}));
  dyn.emplace_back("theta_points", positive_int("dynamics.theta_points", d.theta_points, 3));
  dyn.emplace_back("stark_compensation", flag("dynamics.stark_compensation", d.stark_compensation));
  dyn.emplace_back("include_spectator", flag("dynamics.include_spectator", d.include_spectator));
  dyn.emplace_back("loop_delta", real("dynamics.loop_delta", d.loop_delta));
  dyn.emplace_back("loop_radius", real("dynamics.loop_radius", d.loop_radius));
  dyn.emplace_back("t_end", real("dynamics.t_end", d.t_end));
  dyn.emplace_back("samples", positive_int("dynamics.samples", d.samples));
  dyn.emplace_back("fit_delta", real("dynamics.fit_delta", d.fit_delta));
  dyn.emplace_back("fit_window", real("dynamics.fit_window", d.fit_window));
  dyn.emplace_back("fit_base", positive_int("dynamics.fit_base", d.fit_base));
  out.emplace_back("dynamics", std::move(dyn));

  Section output;
  output.emplace_back("dir", Binding{[&c](const std::string& v) {
                                       if (v.empty()) throw ConfigError("output.dir: empty");
                                       c.output.dir = v;
                                     },
                                     [&c] { return c.output.dir; }});
  output.emplace_back("format", Binding{[&c](const std::string& v) { c.output.format = parse_format(v); },
                                        [&c] { return to_string(c.output.format); }});
  output.emplace_back("threads", positive_int("output.threads", c.output.threads));
  out.emplace_back("output", std::move(output));
  return out;
}

void validate(const RunConfig& c) {
  if (c.model.kappa < 0.0 || c.dd.kappa < 0.0 || c.berry.kappa < 0.0) {
    throw ConfigError("kappa must be non-negative");
  }
  if (c.berry.radius < 0.0 || c.dynamics.loop_radius < 0.0) throw ConfigError("loop radius must be non-negative");
  for (double r : c.dd.ratios)
    if (!(r > 0.0)) throw ConfigError("dd.ratios: ratios must be positive");
  if (!(c.dynamics.t_end > 0.0)) throw ConfigError("dynamics.t_end must be positive");
  if (!(c.dynamics.fit_delta > 0.0) || c.dynamics.fit_window < 0.0 ||
      c.dynamics.fit_window >= c.dynamics.fit_delta) {
    throw ConfigError("dynamics: need 0 <= fit_window < fit_delta");
  }
  if (!(c.circuit.kappa_d2 > 0.0)) throw ConfigError("circuit.kappa_d2 must be positive");
}

}  // namespace

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ConfigError("format: expected csv or json, got '" + s + "'");
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  Schema s = schema(cfg);
  for (const auto& [section, body] : tree) {
    auto sec = std::find_if(s.begin(), s.end(), [&](const auto& e) { return e.first == section; });
    if (sec == s.end()) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key outside any section: " + section);
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      auto entry = std::find_if(sec->second.begin(), sec->second.end(),
                                [&](const auto& e) { return e.first == key; });
      if (entry == sec->second.end()) throw ConfigError("unknown key " + section + "." + key);
      entry->second.read(trim(value.data()));
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  RunConfig copy = cfg;
  const Schema s = schema(copy);
  bool first = true;
  for (const auto& [section, entries] : s) {
    out << (first ? "" : "\n") << "[" << section << "]\n";
    first = false;
    for (const auto& [key, binding] : entries) out << key << " = " << binding.write() << "\n";
  }
}

}  // namespace esurf::cli
