#pragma once

// Semi-implicit time stepping in Fourier space.
//
// With D(k) = 1 + tau nu |k|^4 - tau theta_c |k|^2 the update reads
//
//   u1(k) = t0(k) u0(k) + t1(k) g0(k),   t0 = 1/D,  t1 = -tau |k|^2 / D,
//
// where g0 is the transform of ftilde(u0). The variant drops theta_c from D
// and uses f(u0) for g0.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "chlog/errors.hpp"
#include "chlog/grid.hpp"
#include "chlog/potential.hpp"
#include "chlog/scheme.hpp"

namespace chlog {

template <typename Scalar>
struct BasicPropagators {
  SchemeKind kind;
  Scalar tau;
  RealArray<Scalar> t0;
  RealArray<Scalar> t1;
  Scalar min_denominator;
};

using Propagators = BasicPropagators<double>;

/// Raw symbol tables for 1/(1 + tau nu |k|^4 - tau theta_c |k|^2) and
/// -tau |k|^2 / (same). theta_c may be 0 here (pure bilaplacian smoothing).
template <typename Scalar>
BasicPropagators<Scalar> propagator_symbols(const BasicGrid<Scalar>& grid,
                                            Scalar tau, Scalar nu,
                                            Scalar theta_c,
                                            SchemeKind kind = SchemeKind::semi_implicit) {
  const auto& ksq = grid.ksq();
  const RealArray<Scalar> den =
      Scalar(1) + tau * nu * ksq.square() - tau * theta_c * ksq;
  Eigen::Index ra = 0;
  Eigen::Index rb = 0;
  const Scalar min_den = den.minCoeff(&ra, &rb);
  if (!(min_den > Scalar(0))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "inadmissible tau = " << tau << ": denominator " << min_den
        << " <= 0 at mode k = (" << grid.wavenumber(int(ra)) << ", "
        << grid.wavenumber(int(rb)) << ")";
    throw InadmissibleStep(msg.str());
  }
  return {kind, tau, den.inverse(), -tau * ksq / den, min_den};
}

template <typename Scalar>
BasicPropagators<Scalar> build_propagators(const BasicGrid<Scalar>& grid,
                                           const BasicSchemeConfig<Scalar>& config) {
  validate(config, grid);
  const Scalar theta_c =
      implicit_theta_c(config.kind) ? config.params.theta_c() : Scalar(0);
  return propagator_symbols(grid, config.tau, config.params.nu(), theta_c,
                            config.kind);
}

/// u^n together with the spectrum produced by the step that created it.
template <typename Scalar>
struct BasicSimState {
  std::int64_t step = 0;
  Scalar time = 0;
  BasicField<Scalar> u;
  BasicSpectrum<Scalar> u_hat;
  /// Cumulative clamp count under the saturate guard policy.
  std::int64_t saturations = 0;
};

using SimState = BasicSimState<double>;

template <typename Scalar>
BasicSimState<Scalar> make_state(BasicField<Scalar> u, std::int64_t step = 0,
                                 Scalar tau = Scalar(0)) {
  auto u_hat = transform(u);
  return {step, Scalar(step) * tau, std::move(u), std::move(u_hat), 0};
}

namespace detail {

template <typename Scalar>
BasicSimState<Scalar> advance(const BasicSimState<Scalar>& state,
                              const BasicSchemeConfig<Scalar>& config,
                              const BasicPropagators<Scalar>& props,
                              const BasicSpectrum<Scalar>* forcing) {
  const auto& grid = state.u.grid();
  if (props.t0.rows() != grid.n()) {
    throw GridError("propagators were built for a different grid");
  }
  const PotentialFn fn =
      config.kind == SchemeKind::variant ? PotentialFn::f : PotentialFn::f_tilde;
  PointwiseResult<Scalar> nonlinear = [&] {
    try {
      return apply_pointwise(state.u, fn, config.params, config.guard);
    } catch (const GuardViolation& gv) {
      throw GuardViolation(
          "step " + std::to_string(state.step) + ": " + gv.what(), gv.index(),
          gv.value(), state.step);
    }
  }();

  auto [u_hat, g_hat] = transform_pair(state.u, nonlinear.field);
  if (forcing != nullptr) {
    detail::require_same_grid(grid, forcing->grid(), "step_forced");
    g_hat.coeffs() += forcing->coeffs();
  }
  if (config.kind == SchemeKind::galerkin) {
    g_hat = galerkin_project(g_hat, config.galerkin_cutoff);
  }
  ComplexArray<Scalar> next =
      u_hat.coeffs() * props.t0.template cast<std::complex<Scalar>>() +
      g_hat.coeffs() * props.t1.template cast<std::complex<Scalar>>();
  BasicSpectrum<Scalar> next_hat(state.u.grid_handle(), std::move(next));
  if (config.kind == SchemeKind::galerkin) {
    next_hat = galerkin_project(next_hat, config.galerkin_cutoff);
  }
  BasicField<Scalar> next_u = inverse_transform(next_hat);
  const std::int64_t n1 = state.step + 1;
  return {n1, Scalar(n1) * config.tau, std::move(next_u), std::move(next_hat),
          state.saturations + nonlinear.saturations};
}

}  // namespace detail

/// One Galerkin-truncated step; the nonlinearity and the result are projected
/// onto max(|k1|, |k2|) <= N.
template <typename Scalar>
BasicSimState<Scalar> step_galerkin(const BasicSimState<Scalar>& state,
                                    const BasicSchemeConfig<Scalar>& config,
                                    const BasicPropagators<Scalar>& props) {
  if (config.kind != SchemeKind::galerkin) {
    throw DomainError("step_galerkin requires a galerkin scheme config");
  }
  const Scalar tol = Scalar(1e-12) * (Scalar(1) + l2_norm(state.u_hat));
  const auto out_of_band = galerkin_project(state.u_hat, config.galerkin_cutoff);
  if (l2_norm(BasicSpectrum<Scalar>(state.u_hat.grid_handle(),
                                    state.u_hat.coeffs() - out_of_band.coeffs())) >
      tol) {
    throw DomainError("step_galerkin: state carries modes above the cutoff N = " +
                      std::to_string(config.galerkin_cutoff) +
                      " (initial data must be projected)");
  }
  return detail::advance<Scalar>(state, config, props, nullptr);
}

/// One step of the configured scheme.
template <typename Scalar>
BasicSimState<Scalar> step(const BasicSimState<Scalar>& state,
                           const BasicSchemeConfig<Scalar>& config,
                           const BasicPropagators<Scalar>& props) {
  if (config.kind == SchemeKind::galerkin) {
    return step_galerkin(state, config, props);
  }
  return detail::advance<Scalar>(state, config, props, nullptr);
}

/// One step with an additional source Delta G inside the explicit term,
/// i.e. the nonlinearity ftilde(u) is replaced by ftilde(u) + G.
template <typename Scalar>
BasicSimState<Scalar> step_forced(const BasicSimState<Scalar>& state,
                                  const BasicSchemeConfig<Scalar>& config,
                                  const BasicPropagators<Scalar>& props,
                                  const BasicSpectrum<Scalar>& forcing) {
  return detail::advance(state, config, props, &forcing);
}

}  // namespace chlog
