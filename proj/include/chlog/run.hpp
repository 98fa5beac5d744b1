#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chlog/diagnostics.hpp"
#include "chlog/errors.hpp"
#include "chlog/grid.hpp"
#include "chlog/scheme.hpp"
#include "chlog/stepper.hpp"

namespace chlog {

template <typename Scalar>
struct BasicRunOptions {
  /// Required separation of the initial data: ||u0||_inf <= 1 - delta0.
  Scalar delta0 = Scalar(1e-6);
  /// Record diagnostics every `cadence` steps (the first and last state are
  /// always recorded). 0 disables diagnostics.
  std::int64_t cadence = 1;
  std::function<void(const BasicSimState<Scalar>&,
                     const BasicDiagnosticsRecord<Scalar>&)>
      on_record;
  /// Called after every completed step.
  std::function<void(const BasicSimState<Scalar>&)> on_step;
};

template <typename Scalar>
struct BasicRunResult {
  BasicSimState<Scalar> final_state;
  std::vector<BasicDiagnosticsRecord<Scalar>> records;
  bool aborted = false;
  std::string abort_message;
  std::int64_t abort_step = -1;
};

using RunOptions = BasicRunOptions<double>;
using RunResult = BasicRunResult<double>;

/// Advances an existing state by n_steps. A guard violation stops the run and
/// is reported in the result; everything computed before it is kept.
template <typename Scalar>
BasicRunResult<Scalar> run_from(BasicSimState<Scalar> state,
                                const BasicSchemeConfig<Scalar>& config,
                                std::int64_t n_steps,
                                const BasicRunOptions<Scalar>& options = {}) {
  if (n_steps < 0) throw DomainError("n_steps must be non-negative");
  const auto props = build_propagators(state.u.grid(), config);
  const std::int64_t first = state.step;
  const std::int64_t last = first + n_steps;
  const auto due = [&](std::int64_t s) {
    return options.cadence > 0 &&
           (s == first || s == last || (s - first) % options.cadence == 0);
  };

  BasicRunResult<Scalar> result{state, {}, false, {}, -1};
  const auto record = [&](const BasicSimState<Scalar>& s,
                          const BasicSimState<Scalar>* prev) {
    auto rec = make_record(s, prev, config);
    if (options.on_record) options.on_record(s, rec);
    result.records.push_back(rec);
  };

  try {
    if (due(first)) record(state, nullptr);
    while (state.step < last) {
      auto next = step(state, config, props);
      if (options.on_step) options.on_step(next);
      if (due(next.step)) record(next, &state);
      state = std::move(next);
    }
  } catch (const GuardViolation& gv) {
    result.aborted = true;
    result.abort_message = gv.what();
    result.abort_step = gv.step() >= 0 ? gv.step() : state.step;
  }
  result.final_state = std::move(state);
  return result;
}

/// Runs the scheme from u0 (projected by Pi_N for the Galerkin scheme).
template <typename Scalar>
BasicRunResult<Scalar> run(const BasicField<Scalar>& initial,
                           const BasicSchemeConfig<Scalar>& config,
                           std::int64_t n_steps,
                           const BasicRunOptions<Scalar>& options = {}) {
  validate(config, initial.grid());
  BasicField<Scalar> u0 = initial;
  if (config.kind == SchemeKind::galerkin) {
    u0 = inverse_transform(galerkin_project(transform(initial), config.galerkin_cutoff));
  }
  if (!(options.delta0 > Scalar(0) && options.delta0 < Scalar(1))) {
    throw DomainError("delta0 must lie in (0, 1)");
  }
  const Scalar sup = linf_norm(u0);
  if (sup > Scalar(1) - options.delta0) {
    throw DomainError("initial data not separated: ||u0||_inf = " +
                      std::to_string(double(sup)) + " > 1 - delta0 = " +
                      std::to_string(double(Scalar(1) - options.delta0)));
  }
  if (!(std::abs(u0.mean()) < Scalar(1))) {
    throw DomainError("initial data must have |mean| < 1");
  }
  auto state = make_state(std::move(u0), 0, config.tau);
  if (config.kind == SchemeKind::galerkin) {
    state.u_hat = galerkin_project(state.u_hat, config.galerkin_cutoff);
  }
  return run_from(std::move(state), config, n_steps, options);
}

}  // namespace chlog
