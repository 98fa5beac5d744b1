#include "chlog/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include "chlog/stepper.hpp"

namespace chlog {

std::int64_t steps_to_reach(double t_final, double tau) {
  if (!(tau > 0.0) || !(t_final >= 0.0)) {
    throw DomainError("steps_to_reach: need tau > 0 and t_final >= 0");
  }
  const double ratio = t_final / tau;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t_final = " << t_final << " is not an integer multiple of tau = "
        << tau;
    throw DomainError(msg.str());
  }
  return static_cast<std::int64_t>(rounded);
}

void validate(const ConvergenceStudy& study) {
  if (study.taus.empty()) throw DomainError("convergence study needs taus");
  if (!(study.t_final > 0.0)) throw DomainError("t_final must be positive");
  for (std::size_t i = 0; i < study.taus.size(); ++i) {
    steps_to_reach(study.t_final, study.taus[i]);
    if (i > 0 && !(study.taus[i] < study.taus[i - 1])) {
      throw DomainError("taus must be strictly decreasing");
    }
  }
  steps_to_reach(study.t_final, study.tau_ref);
  const double finest = study.taus.back();
  if (study.tau_ref > finest / 16.0 * (1.0 + 1e-12)) {
    throw DomainError("tau_ref must be at least 16x finer than the finest tau");
  }
}

RunResult reference_solution(const Field& u0, const ModelParams& params,
                             double t_final, double tau_ref, SchemeKind kind,
                             std::int64_t cadence) {
  const SchemeConfig config{.kind = kind, .tau = tau_ref, .params = params};
  RunOptions options;
  options.cadence = cadence;
  auto result = run(u0, config, steps_to_reach(t_final, tau_ref), options);
  if (result.aborted) {
    throw StudyAborted("reference run aborted: " + result.abort_message);
  }
  return result;
}

ErrorCurve error_curve(const ConvergenceStudy& study) {
  validate(study);
  const auto grid = make_grid(study.grid_n);
  const Field u0 = builtin_initial_data(study.initial, grid, study.seed);

  auto final_state = [&](double tau) {
    const SchemeConfig config{.kind = study.kind, .tau = tau, .params = study.params};
    RunOptions options;
    options.cadence = 0;
    auto result = run(u0, config, steps_to_reach(study.t_final, tau), options);
    if (result.aborted) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "run with tau = " << tau << " aborted: " << result.abort_message;
      throw StudyAborted(msg.str());
    }
    return std::move(result.final_state.u);
  };

  auto reference = std::async(std::launch::async, final_state, study.tau_ref);
  std::vector<std::future<Field>> runs;
  runs.reserve(study.taus.size());
  for (double tau : study.taus) {
    runs.push_back(std::async(std::launch::async, final_state, tau));
  }
  Field ref = reference.get();
  ErrorCurve curve{{}, ref, study.t_final, study.tau_ref};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Field u = runs[i].get();
    const Field diff(grid, u.values() - ref.values());
    curve.points.push_back({study.taus[i], l2_norm(diff)});
  }
  return curve;
}

OrderFit observed_order(std::span<const ErrorPoint> curve) {
  OrderFit fit;
  if (curve.size() < 3) {
    fit.degenerate = true;
    fit.reason = "need at least 3 points";
    return fit;
  }
  for (const auto& pt : curve) {
    if (!(pt.error > 1e-14) || !(pt.tau > 0.0) || !std::isfinite(pt.error)) {
      fit.degenerate = true;
      fit.reason = "error at or below the noise floor (1e-14)";
      return fit;
    }
  }
  const auto m = static_cast<Eigen::Index>(curve.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = std::log(curve[i].tau);
    design(i, 1) = 1.0;
    rhs(i) = std::log(curve[i].error);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = design * coef - rhs;
  fit.p = coef(0);
  fit.fit_residual = std::sqrt(resid.squaredNorm() / double(m));
  return fit;
}

Field band_limited_noise(const GridHandle<double>& grid, int kmax, double l2,
                         std::uint64_t seed) {
  if (kmax < 1 || kmax >= grid->n() / 2) {
    throw DomainError("band_limited_noise: kmax must lie in [1, n/2)");
  }
  std::mt19937_64 rng(seed);
  Spectrum spec(grid);
  for (int k1 = 0; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const std::complex<double> c(detail::uniform_pm1(rng),
                                   detail::uniform_pm1(rng));
      spec.coeff(k1, k2) = c;
      spec.coeff(-k1, -k2) = std::conj(c);
    }
  }
  Field noise = inverse_transform(spec);
  const double norm = l2_norm(noise);
  noise.values() *= l2 / norm;
  return noise;
}

ForcingFn noise_forcing(const GridHandle<double>& grid, int kmax, double l2,
                        std::uint64_t seed) {
  return [grid, kmax, l2, seed](std::int64_t step) {
    return transform(
        band_limited_noise(grid, kmax, l2, seed + static_cast<std::uint64_t>(step)));
  };
}

GapReport near_solution_gap(const GapExperiment& ex) {
  const auto& grid = ex.v0.grid();
  detail::require_same_grid(grid, ex.v0_tilde.grid(), "near_solution_gap");
  if (std::abs(ex.v0.mean() - ex.v0_tilde.mean()) > 1e-12) {
    throw DomainError("near_solution_gap: initial data must have the same mean");
  }
  const auto& config = ex.config;
  const auto props = build_propagators(grid, config);
  const double tau = config.tau;
  const double nu = config.params.nu();

  auto a = make_state(ex.v0, 0, tau);
  auto b = make_state(ex.v0_tilde, 0, tau);
  GapReport rep;
  auto gap_sq = [&] {
    const double g = l2_norm(Field(ex.v0.grid_handle(), a.u.values() - b.u.values()));
    return g * g;
  };
  const double initial = gap_sq();
  double forcing_sum = 0.0;
  rep.times.push_back(0.0);
  rep.gap_sq.push_back(initial);
  rep.envelope_base.push_back(initial);
  for (std::int64_t m = 0; m < ex.n_steps; ++m) {
    a = step(a, config, props);
    if (ex.forcing) {
      const Spectrum G = ex.forcing(m);
      const double g = l2_norm(G);
      forcing_sum += g * g;
      b = step_forced(b, config, props, G);
    } else {
      b = step(b, config, props);
    }
    rep.times.push_back(a.time);
    rep.gap_sq.push_back(gap_sq());
    rep.envelope_base.push_back(initial + 2.0 * tau / nu * forcing_sum);
  }

  double c1 = 0.0;
  for (std::size_t m = 1; m < rep.gap_sq.size(); ++m) {
    const double gap = rep.gap_sq[m];
    const double base = rep.envelope_base[m];
    if (gap == 0.0) continue;
    if (base == 0.0) {
      rep.dominated = false;
      c1 = std::numeric_limits<double>::infinity();
      break;
    }
    c1 = std::max(c1, nu * std::log(gap / base) / rep.times[m]);
  }
  rep.c1 = c1;
  if (std::isfinite(c1)) {
    for (std::size_t m = 0; m < rep.gap_sq.size(); ++m) {
      const double env = std::exp(rep.times[m] * c1 / nu) * rep.envelope_base[m];
      if (rep.gap_sq[m] > env * (1.0 + 1e-12)) rep.dominated = false;
    }
  }

  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t m = 0; m < rep.gap_sq.size(); ++m) {
    if (rep.gap_sq[m] > 0.0) {
      t.push_back(rep.times[m]);
      y.push_back(0.5 * std::log(rep.gap_sq[m]));
    }
  }
  if (t.size() >= 2) {
    const auto k = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd design(k, 2);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      design(i, 0) = t[i];
      design(i, 1) = 1.0;
      rhs(i) = y[i];
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    rep.log_slope = coef(0);
    rep.log_linear_rms = std::sqrt((design * coef - rhs).squaredNorm() / double(k));
  }
  return rep;
}

}  // namespace chlog
