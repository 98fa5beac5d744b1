#pragma once

// Command implementations behind the chlog executable. Each returns the
// process exit code: 0 success, 1 configuration/input error, 2 guard abort.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace chlog {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitGuardAbort = 2;

struct RunArgs {
  std::filesystem::path config;
  /// Write snapshot_<step>.bin every K steps (0: only the final snapshot).
  std::int64_t snapshot_every = 0;
  std::optional<std::filesystem::path> resume;
  /// Resume even if the snapshot's parameters differ from the config.
  bool force = false;
};

struct ConvergenceArgs {
  std::filesystem::path config;
  std::vector<double> taus;
  double tau_ref = 0;
  std::optional<double> t_final;
};

struct SweepArgs {
  std::filesystem::path config;
  /// key=v1,v2,...
  std::string vary;
};

struct InspectArgs {
  std::filesystem::path snapshot;
};

int run_command(const RunArgs& args, std::ostream& out, std::ostream& err);
int convergence_command(const ConvergenceArgs& args, std::ostream& out,
                        std::ostream& err);
int sweep_command(const SweepArgs& args, std::ostream& out, std::ostream& err);
int inspect_command(const InspectArgs& args, std::ostream& out, std::ostream& err);

}  // namespace chlog
