#include "chlog/csv.hpp"

#include <cmath>
#include <cstdio>

#include "chlog/errors.hpp"

namespace chlog {

std::string format_double(double value) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string diagnostics_row(const DiagnosticsRecord& r) {
  std::string row = std::to_string(r.step);
  for (double v : {r.time, r.energy, r.mass, r.margin, r.grad_K_l2, r.g_mean,
                   r.g_fluct, r.h1, r.h3, r.h5, r.identity_residual}) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

DiagnosticsCsvWriter::DiagnosticsCsvWriter(const std::filesystem::path& path)
    : out_(path, std::ios::trunc) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  out_ << kDiagnosticsHeader << '\n' << std::flush;
}

void DiagnosticsCsvWriter::write(const DiagnosticsRecord& rec) {
  out_ << diagnostics_row(rec) << '\n' << std::flush;
}

void write_convergence_csv(const std::filesystem::path& path,
                           std::span<const ErrorPoint> points) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << kConvergenceHeader << '\n';
  for (const auto& pt : points) {
    out << format_double(pt.tau) << ',' << format_double(pt.error) << ','
        << format_double(std::log(pt.tau)) << ','
        << format_double(std::log(pt.error)) << '\n';
  }
}

void write_convergence_summary(const std::filesystem::path& path,
                               const OrderFit& fit, double t_final,
                               double tau_ref) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << kConvergenceSummaryHeader << '\n'
      << format_double(fit.p) << ',' << format_double(fit.fit_residual) << ','
      << (fit.degenerate ? 1 : 0) << ',' << format_double(t_final) << ','
      << format_double(tau_ref) << '\n';
}

}  // namespace chlog
