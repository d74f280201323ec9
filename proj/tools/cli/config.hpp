// Run configuration: INI sections read with Boost.PropertyTree. Unknown
// sections or keys are errors.
#pragma once

#include "esurf/dynamics.hpp"
#include "esurf/invariants.hpp"
#include "esurf/models.hpp"
#include "esurf/spectra.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace esurf::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

struct ModelSection {
  double kappa = 1.0;
  Axis q1{-1.0, 1.0, 7};
  Axis q2{0.0, 0.0, 1};
  Axis q3{0.0, 4.0 * kSqrt2 / 3.0, 5};
  double q4 = 0.0;
  double tol = 1e-6;
};

struct DDSection {
  std::vector<double> ratios{0.25, 0.5, 0.75, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  double kappa = 1.0;
  int n_alpha = 48;
  int n_beta = 48;
  int n_phi = 48;
  BandPolicy policy = BandPolicy::automatic;
};

struct BerrySection {
  double kappa = 1.0;
  double delta = kExceptionalRingRadius;
  double radius = 0.85;
  int steps = 3000;
  int max_loops = 6;
  /// Sweep of (delta - R) / r; sweep_n = 0 disables it.
  Axis sweep{0.5, 1.5, 11};
  bool track = true;
};

struct SSH3Section {
  SSH3Params params{};
  /// t1 sweep for the spectra table; n = 1 uses params.t1 only.
  Axis t1_sweep{0.0, 2.0, 1};
  cplx e_ref{0.1, 0.05};
  int n_k = 256;
};

struct DynamicsSection {
  ExperimentMode mode = ExperimentMode::lab;
  LabMode trajectory_mode = LabMode::nojump;
  int theta_points = 48;
  bool stark_compensation = true;
  bool include_spectator = true;
  double loop_delta = kExceptionalRingRadius;  // units of the ES loss rate
  double loop_radius = 0.85;
  double t_end = 0.2;
  int samples = 200;
  double fit_delta = 0.2;
  double fit_window = 0.05;
  int fit_base = 200;
};

struct OutputSection {
  std::string dir = "out";
  Format format = Format::csv;
  int threads = 1;
};

struct RunConfig {
  ModelSection model;
  DDSection dd;
  BerrySection berry;
  SSH3Section ssh3;
  CircuitParams circuit;
  DynamicsSection dynamics;
  OutputSection output;
};

/// Defaults overlaid with the file's values. Throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in);

/// Fully resolved configuration in the same INI dialect.
void write_config(std::ostream& out, const RunConfig& cfg);

std::string to_string(Format f);
Format parse_format(const std::string& s);

}  // namespace esurf::cli
