#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "table.hpp"

#include <iostream>
#include <optional>

namespace {

constexpr int kOk = 0;
constexpr int kOtherFailure = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
  bool emit_config = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "INI config file")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--emit-config", f.emit_config, "print the resolved config and exit");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace esurf::cli;
  CLI::App app{"Exceptional-surface numerics"};
  app.set_version_flag("--version", version_line());
  app.require_subcommand(1);
  Flags flags;
  const char* names[] = {"spectrum", "dd", "berry", "ssh3", "dynamics"};
  const char* help[] = {"exceptional-surface scan", "DD invariant sweep over R/r0",
                        "multi-loop Berry phase, transition sweep and eigenvalue tracks",
                        "trimer SSH spectra and skin-effect metrics",
                        "circuit protocol: trajectories, fitted eigensystems, Berry phase"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], help[i]), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    RunConfig cfg = flags.config.empty() ? RunConfig{} : load_config(flags.config);
    if (flags.out) cfg.output.dir = *flags.out;
    if (flags.format) cfg.output.format = parse_format(*flags.format);
    if (flags.threads) cfg.output.threads = *flags.threads;
    if (flags.emit_config) {
      write_config(std::cout, cfg);
      return kOk;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    std::vector<Table> tables;
    if (cmd == "spectrum") tables = run_spectrum(cfg);
    else if (cmd == "dd") tables = run_dd(cfg);
    else if (cmd == "berry") tables = run_berry(cfg);
    else if (cmd == "ssh3") tables = run_ssh3(cfg);
    else tables = run_dynamics(cfg, std::cerr);

    for (const auto& t : tables) std::cout << write_table(t, cfg.output.dir, cfg.output.format).string() << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const esurf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOtherFailure;
  }
}
