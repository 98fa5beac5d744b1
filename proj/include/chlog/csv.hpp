#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "chlog/convergence.hpp"
#include "chlog/diagnostics.hpp"

namespace chlog {

/// Shortest-safe round-trippable rendering (17 significant digits).
std::string format_double(double value);

inline constexpr const char* kDiagnosticsHeader =
    "step,time,energy,mass,margin,grad_K_l2,g_mean,g_fluct,h1,h3,h5,"
    "identity_residual";

std::string diagnostics_row(const DiagnosticsRecord& rec);

/// Writes diagnostics.csv rows as they arrive; every row is flushed so a
/// partial file survives an abort.
class DiagnosticsCsvWriter {
 public:
  explicit DiagnosticsCsvWriter(const std::filesystem::path& path);
  void write(const DiagnosticsRecord& rec);

 private:
  std::ofstream out_;
};

inline constexpr const char* kConvergenceHeader = "tau,error,log_tau,log_error";
inline constexpr const char* kConvergenceSummaryHeader =
    "p,fit_residual,degenerate,t_final,tau_ref";

void write_convergence_csv(const std::filesystem::path& path,
                           std::span<const ErrorPoint> points);
void write_convergence_summary(const std::filesystem::path& path,
                               const OrderFit& fit, double t_final, double tau_ref);

}  // namespace chlog
