// Subcommand pipelines. Each returns the tables it produced; writing them is
// left to the caller so output stays serialized.
#pragma once

#include "config.hpp"
#include "table.hpp"

#include <iosfwd>
#include <vector>

namespace esurf::cli {

std::vector<Table> run_spectrum(const RunConfig& cfg);
std::vector<Table> run_dd(const RunConfig& cfg);
std::vector<Table> run_berry(const RunConfig& cfg);
std::vector<Table> run_ssh3(const RunConfig& cfg);
/// Resonance warnings go to `log`.
std::vector<Table> run_dynamics(const RunConfig& cfg, std::ostream& log);

}  // namespace esurf::cli
