// optlat command-line driver.
//
//   optlat simulate --config run.ini [--check] [--solver.dt=1e-5 ...]
//   optlat convergence --config study.ini
//   optlat moments --lambda0 0 --lambda1 0 [--model.eta=1]
//   optlat invert --n 0.5 --E 0
//   optlat verify-integrals [--model.d=2 --model.eps0=1]

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optlat/commands.hpp"
#include "optlat/config.hpp"

namespace {

struct Args {
  std::string config_path;
  bool check = false;
  std::optional<double> lambda0, lambda1, n, E;
};

optlat::RunConfig load(const Args& args, const std::vector<std::string>& extras) {
  std::vector<optlat::Override> overrides;
  for (const auto& e : extras) overrides.push_back(optlat::parse_override(e));
  optlat::RunConfig cfg = args.config_path.empty()
                              ? optlat::parse_config_text("", overrides)
                              : optlat::parse_config_file(args.config_path, overrides);
  if (args.lambda0) cfg.query.lambda0 = *args.lambda0;
  if (args.lambda1) cfg.query.lambda1 = *args.lambda1;
  if (args.n) cfg.query.n = *args.n;
  if (args.E) cfg.query.E = *args.E;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optical-lattice energy-transport solver"};
  app.require_subcommand(1);
  Args args;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("-c,--config", args.config_path, "INI configuration file");
    return sub;
  };
  CLI::App* simulate = add("simulate", "run the time stepper and write snapshots");
  simulate->add_flag("--check", args.check, "verify conservation and steady-state targets");
  CLI::App* convergence = add("convergence", "grid or time-step refinement study");
  CLI::App* moments = add("moments", "print n,E for given multipliers");
  moments->add_option("--lambda0", args.lambda0);
  moments->add_option("--lambda1", args.lambda1);
  CLI::App* invert = add("invert", "print lambda0,lambda1 for given moments");
  invert->add_option("--n", args.n);
  invert->add_option("--E", args.E);
  CLI::App* verify = add("verify-integrals", "compare band integrals with closed forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : optlat::kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  optlat::RunConfig cfg;
  try {
    cfg = load(args, chosen->remaining());
  } catch (const std::exception& e) {
    return optlat::report_failure(e, std::cerr);
  }

  if (chosen == simulate) return optlat::cmd_simulate(cfg, std::cout, std::cerr, args.check);
  if (chosen == convergence) return optlat::cmd_convergence(cfg, std::cout, std::cerr);
  if (chosen == moments) return optlat::cmd_moments(cfg, std::cout, std::cerr);
  if (chosen == invert) return optlat::cmd_invert(cfg, std::cout, std::cerr);
  if (chosen == verify) return optlat::cmd_verify_integrals(cfg, std::cout, std::cerr);
  return optlat::kExitConfig;
}
