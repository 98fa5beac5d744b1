#include "chlog/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>

#include "chlog/config.hpp"
#include "chlog/convergence.hpp"
#include "chlog/csv.hpp"
#include "chlog/diagnostics.hpp"
#include "chlog/errors.hpp"
#include "chlog/initial_data.hpp"
#include "chlog/run.hpp"
#include "chlog/snapshot.hpp"

namespace chlog {
namespace {

namespace fs = std::filesystem;

struct RunOutcome {
  int exit_code = kExitOk;
  std::int64_t final_step = 0;
  double final_energy = 0;
  double min_margin = 0;
  bool monotone_energy = true;
  std::string message;
};

std::string snapshot_name(std::int64_t step) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "snapshot_%08lld.bin",
                static_cast<long long>(step));
  return buf;
}

RunOutcome execute_run(const RunConfig& cfg, const RunArgs& args) {
  RunOutcome outcome;
  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  const auto scheme = cfg.scheme_config();
  const auto grid = make_grid(cfg.grid_n);
  const std::int64_t total = cfg.total_steps();

  std::optional<SimState> resumed;
  if (args.resume) {
    const Snapshot snap = load_snapshot(*args.resume);
    const bool matches = snap.n == std::uint32_t(cfg.grid_n) &&
                         snap.tau == cfg.tau && snap.nu == cfg.nu &&
                         snap.theta == cfg.theta && snap.theta_c == cfg.theta_c;
    if (!matches && !args.force) {
      throw ConfigError("snapshot parameters (n, tau, nu, theta, theta_c) do not "
                        "match the config; pass --force to resume anyway");
    }
    if (snap.n != std::uint32_t(cfg.grid_n)) {
      throw ConfigError("snapshot grid size differs from grid_n");
    }
    if (std::int64_t(snap.step) > total) {
      throw ConfigError("snapshot step is past the configured end of the run");
    }
    resumed = to_state(snap);
  }

  DiagnosticsCsvWriter csv(out_dir / "diagnostics.csv");
  RunOptions options;
  options.cadence = cfg.cadence;
  options.on_record = [&](const SimState&, const DiagnosticsRecord& rec) {
    csv.write(rec);
  };
  if (args.snapshot_every > 0) {
    options.on_step = [&](const SimState& s) {
      if (s.step % args.snapshot_every == 0) {
        save_snapshot(make_snapshot(s, scheme), out_dir / snapshot_name(s.step));
      }
    };
  }

  RunResult result = [&] {
    if (resumed) {
      return run_from(*resumed, scheme, total - resumed->step, options);
    }
    const Field u0 = builtin_initial_data(cfg.init, grid, cfg.seed);
    return run(u0, scheme, total, options);
  }();
  save_snapshot(make_snapshot(result.final_state, scheme),
                out_dir / "snapshot_final.bin");

  outcome.final_step = result.final_state.step;
  if (!result.records.empty()) {
    const auto rep = separation_report(result.records);
    outcome.final_energy = result.records.back().energy;
    outcome.min_margin = rep.min_margin;
    outcome.monotone_energy = rep.monotone_energy;
  } else {
    outcome.final_energy = energy(result.final_state.u, scheme.params, scheme.guard);
    outcome.min_margin = 1.0 - linf_norm(result.final_state.u);
  }
  if (result.aborted) {
    outcome.exit_code = kExitGuardAbort;
    outcome.message = result.abort_message;
  }
  return outcome;
}

}  // namespace

int run_command(const RunArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(args.config);
    const RunOutcome outcome = execute_run(cfg, args);
    if (outcome.exit_code == kExitGuardAbort) {
      err << "run aborted: " << outcome.message << '\n';
      return outcome.exit_code;
    }
    out << "steps " << outcome.final_step << "  energy "
        << format_double(outcome.final_energy) << "  min_margin "
        << format_double(outcome.min_margin) << "  monotone_energy "
        << (outcome.monotone_energy ? "yes" : "no") << '\n';
    return kExitOk;
  } catch (const GuardViolation& e) {
    err << "guard violation: " << e.what() << '\n';
    return kExitGuardAbort;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int convergence_command(const ConvergenceArgs& args, std::ostream& out,
                        std::ostream& err) {
  try {
    const RunConfig cfg = load_config(args.config);
    ConvergenceStudy study{.params = cfg.params(),
                           .initial = cfg.init,
                           .seed = cfg.seed,
                           .grid_n = cfg.grid_n,
                           .t_final = args.t_final ? *args.t_final
                                                   : cfg.t_final.value_or(0.0),
                           .taus = args.taus,
                           .tau_ref = args.tau_ref,
                           .kind = cfg.scheme};
    if (cfg.scheme == SchemeKind::galerkin) {
      throw ConfigError("convergence studies support semi_implicit and variant");
    }
    std::sort(study.taus.begin(), study.taus.end(), std::greater<>());
    const ErrorCurve curve = error_curve(study);
    const OrderFit fit = observed_order(curve.points);
    const fs::path out_dir(cfg.out_dir);
    fs::create_directories(out_dir);
    write_convergence_csv(out_dir / "convergence.csv", curve.points);
    write_convergence_summary(out_dir / "convergence_summary.csv", fit,
                              study.t_final, study.tau_ref);
    for (const auto& pt : curve.points) {
      out << "tau " << format_double(pt.tau) << "  error "
          << format_double(pt.error) << '\n';
    }
    if (fit.degenerate) {
      out << "order fit: degenerate (" << fit.reason << ")\n";
    } else {
      out << "order p " << format_double(fit.p) << "  fit_residual "
          << format_double(fit.fit_residual) << '\n';
    }
    return kExitOk;
  } catch (const StudyAborted& e) {
    err << "study aborted: " << e.what() << '\n';
    return kExitGuardAbort;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int sweep_command(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto eq = args.vary.find('=');
    if (eq == std::string::npos) throw ConfigError("--vary expects key=v1,v2,...");
    const std::string key = args.vary.substr(0, eq);
    std::vector<std::string> values;
    {
      std::string rest = args.vary.substr(eq + 1);
      std::size_t start = 0;
      while (true) {
        const auto pos = rest.find(',', start);
        values.push_back(rest.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
    }
    const ConfigMap base = load_config_map(args.config);
    const fs::path base_out = base.contains("out_dir") ? base.at("out_dir") : ".";

    std::vector<RunConfig> configs;
    for (const auto& value : values) {
      ConfigMap map = base;
      map[key] = value;
      map["out_dir"] = (base_out / (key + "_" + value)).string();
      configs.push_back(config_from_map(map));
    }

    std::vector<std::future<RunOutcome>> jobs;
    for (const auto& cfg : configs) {
      jobs.push_back(std::async(std::launch::async, [cfg] {
        try {
          return execute_run(cfg, RunArgs{});
        } catch (const Error& e) {
          RunOutcome o;
          o.exit_code = kExitConfigError;
          o.message = e.what();
          return o;
        }
      }));
    }

    fs::create_directories(base_out);
    std::ofstream summary(base_out / "sweep_summary.csv", std::ios::trunc);
    summary << "value,status,final_step,final_energy,min_margin,monotone_energy\n";
    int code = kExitOk;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const RunOutcome o = jobs[i].get();
      code = std::max(code, o.exit_code);
      const char* status = o.exit_code == kExitOk            ? "ok"
                           : o.exit_code == kExitGuardAbort ? "guard_abort"
                                                            : "error";
      summary << values[i] << ',' << status << ',' << o.final_step << ','
              << format_double(o.final_energy) << ',' << format_double(o.min_margin)
              << ',' << (o.monotone_energy ? 1 : 0) << '\n';
      out << key << '=' << values[i] << "  " << status;
      if (!o.message.empty()) out << "  (" << o.message << ')';
      out << '\n';
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int inspect_command(const InspectArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const Snapshot snap = load_snapshot(args.snapshot);
    const Eigen::Map<const Eigen::ArrayXd> v(snap.values.data(),
                                             Eigen::Index(snap.values.size()));
    out << "format CHLOG1 v" << kSnapshotVersion << '\n'
        << "n " << snap.n << '\n'
        << "step " << snap.step << '\n'
        << "tau " << format_double(snap.tau) << '\n'
        << "nu " << format_double(snap.nu) << '\n'
        << "theta " << format_double(snap.theta) << '\n'
        << "theta_c " << format_double(snap.theta_c) << '\n'
        << "min " << format_double(v.minCoeff()) << '\n'
        << "max " << format_double(v.maxCoeff()) << '\n'
        << "mean " << format_double(v.mean()) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace chlog
