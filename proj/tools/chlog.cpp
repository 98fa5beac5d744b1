#include <iostream>

#include "CLI11.hpp"
#include "chlog/commands.hpp"
#include "chlog/config.hpp"
#include "chlog/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Semi-implicit pseudospectral Cahn-Hilliard solver (logarithmic potential)"};
  app.require_subcommand(1);

  chlog::RunArgs run_args;
  std::string resume;
  auto* run = app.add_subcommand("run", "integrate a configured run, write diagnostics.csv");
  run->add_option("--config", run_args.config, "config file")->required();
  run->add_option("--snapshot-every", run_args.snapshot_every,
                  "write a snapshot every K steps");
  run->add_option("--resume", resume, "resume from a snapshot file");
  run->add_flag("--force", run_args.force,
                "resume even if snapshot parameters differ from the config");

  chlog::ConvergenceArgs conv_args;
  std::string taus;
  double t_final = 0;
  auto* conv = app.add_subcommand("convergence", "temporal error curve and observed order");
  conv->add_option("--config", conv_args.config, "config file")->required();
  conv->add_option("--taus", taus, "comma-separated time steps")->required();
  conv->add_option("--tau-ref", conv_args.tau_ref, "reference time step")->required();
  auto* t_final_opt = conv->add_option("--t-final", t_final, "final time");

  chlog::SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "independent runs over one varied key");
  sweep->add_option("--config", sweep_args.config, "config file")->required();
  sweep->add_option("--vary", sweep_args.vary, "key=v1,v2,...")->required();

  chlog::InspectArgs inspect_args;
  auto* inspect = app.add_subcommand("inspect", "print a snapshot header and summary");
  inspect->add_option("--snapshot", inspect_args.snapshot, "snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : chlog::kExitConfigError;
  }

  if (*run) {
    if (!resume.empty()) run_args.resume = resume;
    return chlog::run_command(run_args, std::cout, std::cerr);
  }
  if (*conv) {
    try {
      conv_args.taus = chlog::parse_double_list(taus);
    } catch (const chlog::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return chlog::kExitConfigError;
    }
    if (*t_final_opt) conv_args.t_final = t_final;
    return chlog::convergence_command(conv_args, std::cout, std::cerr);
  }
  if (*sweep) return chlog::sweep_command(sweep_args, std::cout, std::cerr);
  return chlog::inspect_command(inspect_args, std::cout, std::cerr);
}
