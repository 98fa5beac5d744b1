#pragma once

// Temporal convergence and two-trajectory stability experiments.
//
// The PDE solution at t_final is stood in for by the scheme itself run with a
// much finer step tau_ref; errors of coarser runs are measured against it in
// L^2 at identical physical times.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chlog/errors.hpp"
#include "chlog/grid.hpp"
#include "chlog/initial_data.hpp"
#include "chlog/potential.hpp"
#include "chlog/run.hpp"
#include "chlog/scheme.hpp"

namespace chlog {

/// Raised when a run inside a study aborts on the guard.
class StudyAborted : public Error {
 public:
  using Error::Error;
};

/// Number of steps of size tau that reach t_final; rejects non-integral
/// ratios (relative tolerance 1e-9).
std::int64_t steps_to_reach(double t_final, double tau);

struct ConvergenceStudy {
  ModelParams params;
  InitialDataSpec initial;
  std::uint64_t seed = 0;
  int grid_n = 64;
  double t_final = 0;
  /// Decreasing; t_final / tau integral for each entry.
  std::vector<double> taus;
  /// At most min(taus) / 16.
  double tau_ref = 0;
  SchemeKind kind = SchemeKind::semi_implicit;
};

void validate(const ConvergenceStudy& study);

/// The scheme at tau_ref from u0 up to t_final, with diagnostics every
/// `cadence` steps.
RunResult reference_solution(const Field& u0, const ModelParams& params,
                             double t_final, double tau_ref,
                             SchemeKind kind = SchemeKind::semi_implicit,
                             std::int64_t cadence = 1);

struct ErrorPoint {
  double tau;
  double error;
};

struct ErrorCurve {
  std::vector<ErrorPoint> points;
  Field reference;
  double t_final;
  double tau_ref;
};

/// One run per tau (run concurrently, reduced in list order) and the L^2
/// distance of each final state to the reference.
ErrorCurve error_curve(const ConvergenceStudy& study);

struct OrderFit {
  /// Least-squares slope of log(error) against log(tau).
  double p = 0;
  /// RMS of the log-log fit residuals.
  double fit_residual = 0;
  bool degenerate = false;
  std::string reason;
};

OrderFit observed_order(std::span<const ErrorPoint> curve);

/// Mean-zero trigonometric noise with max(|k1|, |k2|) <= kmax and L^2 norm
/// `l2`, deterministic in the seed.
Field band_limited_noise(const GridHandle<double>& grid, int kmax, double l2,
                         std::uint64_t seed);

using ForcingFn = std::function<Spectrum(std::int64_t step)>;

/// Forcing G^n = band_limited_noise(kmax, l2, seed + n).
ForcingFn noise_forcing(const GridHandle<double>& grid, int kmax, double l2,
                        std::uint64_t seed);

struct GapExperiment {
  SchemeConfig config;
  Field v0;
  Field v0_tilde;
  std::int64_t n_steps = 0;
  /// Source G^n injected into the second trajectory; empty for none.
  ForcingFn forcing;
};

struct GapReport {
  std::vector<double> times;
  /// ||v^m - vtilde^m||_2^2
  std::vector<double> gap_sq;
  /// ||v0 - vtilde0||^2 + (2 tau / nu) sum_{n<m} ||G^n||^2
  std::vector<double> envelope_base;
  /// Smallest C1 >= 0 with gap_sq[m] <= exp(t_m C1 / nu) envelope_base[m].
  double c1 = 0;
  bool dominated = true;
  /// RMS residual of a least-squares line through log ||v^m - vtilde^m||_2
  /// against t_m (entries with zero gap skipped).
  double log_linear_rms = 0;
  /// Fitted slope of that line.
  double log_slope = 0;
};

GapReport near_solution_gap(const GapExperiment& experiment);

}  // namespace chlog
