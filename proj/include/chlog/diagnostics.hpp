#pragma once

// Observables along a discrete trajectory: energy, mass, separation margin,
// chemical potential, g = ftilde(u) statistics, Sobolev norms and the residual
// of the exact one-step energy identity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "chlog/errors.hpp"
#include "chlog/grid.hpp"
#include "chlog/potential.hpp"
#include "chlog/scheme.hpp"
#include "chlog/stepper.hpp"

namespace chlog {

template <typename Scalar>
struct BasicDiagnosticsRecord {
  std::int64_t step = 0;
  Scalar time = 0;
  Scalar energy = 0;
  Scalar mass = 0;
  /// 1 - max |u| over grid samples.
  Scalar margin = 0;
  Scalar grad_K_l2 = 0;
  Scalar g_mean = 0;
  Scalar g_fluct = 0;
  Scalar h1 = 0;
  Scalar h3 = 0;
  Scalar h5 = 0;
  Scalar identity_residual = 0;
  /// || |grad|^{-1} (u^n - u^{n-1}) ||_2 and || grad (u^n - u^{n-1}) ||_2; zero
  /// for the initial record.
  Scalar neg_grad_increment = 0;
  Scalar grad_increment = 0;
};

using DiagnosticsRecord = BasicDiagnosticsRecord<double>;

namespace detail {

template <typename Scalar>
Scalar quadrature(const BasicField<Scalar>& f) {
  return f.grid().quad_weight() * f.values().sum();
}

template <typename Scalar>
Scalar energy_from(const BasicField<Scalar>& u, const BasicSpectrum<Scalar>& u_hat,
                   const BasicModelParams<Scalar>& params,
                   const BasicGuardPolicy<Scalar>& guard) {
  const Scalar grad = grad_l2_norm(u_hat);
  const auto F = apply_pointwise(u, PotentialFn::F, params, guard);
  return Scalar(0.5) * params.nu() * grad * grad + quadrature(F.field);
}

/// Spectrum of K = -nu Delta u - theta_c u + g given the spectra of u and g.
template <typename Scalar>
BasicSpectrum<Scalar> chemical_potential_spectrum(
    const BasicSpectrum<Scalar>& u_hat, const BasicSpectrum<Scalar>& g_hat,
    const BasicModelParams<Scalar>& params) {
  const RealArray<Scalar> symbol =
      params.nu() * u_hat.grid().ksq() - params.theta_c();
  return BasicSpectrum<Scalar>(
      u_hat.grid_handle(),
      u_hat.coeffs() * symbol.template cast<std::complex<Scalar>>() +
          g_hat.coeffs());
}

template <typename Scalar>
struct IdentityTerms {
  Scalar lhs;
  Scalar rhs;
  Scalar neg_grad_increment;
  Scalar grad_increment;
};

/// Both sides of the one-step energy identity obtained by testing the scheme
/// with (-Delta)^{-1}(u1 - u0):
///
///   (1/tau) || |grad|^{-1} d ||^2 + nu/2 || grad d ||^2 + E(u1) - E(u0)
///     = int H1 + [theta_c ||d||^2 if theta_c is implicit],
///   H1 = F(u1) - F(u0) - f(u0) d,   d = u1 - u0.
template <typename Scalar>
IdentityTerms<Scalar> identity_terms(const BasicField<Scalar>& u0,
                             const BasicSpectrum<Scalar>& u0_hat,
                             const BasicField<Scalar>& u1,
                             const BasicSpectrum<Scalar>& u1_hat, Scalar tau,
                             const BasicModelParams<Scalar>& params,
                             SchemeKind kind,
                             const BasicGuardPolicy<Scalar>& guard) {
  const Scalar mean_gap = std::abs(u1.mean() - u0.mean());
  if (mean_gap > Scalar(1e-12)) {
    throw DomainError(
        "energy identity: u_n and u_n+1 have different means (|gap| = " +
        std::to_string(double(mean_gap)) +
        "); they do not belong to one trajectory");
  }
  BasicSpectrum<Scalar> d_hat(u1.grid_handle(), u1_hat.coeffs() - u0_hat.coeffs());
  d_hat.coeffs()(0, 0) = std::complex<Scalar>(0);
  const Scalar neg = neg_grad_l2_norm(d_hat);
  const Scalar grad = grad_l2_norm(d_hat);
  const Scalar e0 = energy_from(u0, u0_hat, params, guard);
  const Scalar e1 = energy_from(u1, u1_hat, params, guard);
  const Scalar lhs = neg * neg / tau + Scalar(0.5) * params.nu() * grad * grad +
                     e1 - e0;

  const auto F0 = apply_pointwise(u0, PotentialFn::F, params, guard);
  const auto F1 = apply_pointwise(u1, PotentialFn::F, params, guard);
  const auto f0 = apply_pointwise(u0, PotentialFn::f, params, guard);
  const RealArray<Scalar> d = u1.values() - u0.values();
  const RealArray<Scalar> h1 =
      F1.field.values() - F0.field.values() - f0.field.values() * d;
  const Scalar w = u0.grid().quad_weight();
  Scalar rhs = w * h1.sum();
  if (implicit_theta_c(kind)) rhs += params.theta_c() * w * d.square().sum();
  return {lhs, rhs, neg, grad};
}

}  // namespace detail

/// E(u) = int (nu/2 |grad u|^2 + F(u)) dx.
template <typename Scalar>
Scalar energy(const BasicField<Scalar>& u, const BasicModelParams<Scalar>& params,
              const BasicGuardPolicy<Scalar>& guard = {}) {
  return detail::energy_from(u, transform(u), params, guard);
}

template <typename Scalar>
struct ChemicalPotential {
  BasicField<Scalar> K;
  Scalar grad_l2;
  Scalar mean;
};

/// K = -nu Delta u - theta_c u + ftilde(u).
template <typename Scalar>
ChemicalPotential<Scalar> chemical_potential(
    const BasicField<Scalar>& u, const BasicModelParams<Scalar>& params,
    const BasicGuardPolicy<Scalar>& guard = {}) {
  const auto g = apply_pointwise(u, PotentialFn::f_tilde, params, guard);
  auto [u_hat, g_hat] = transform_pair(u, g.field);
  const auto K_hat = detail::chemical_potential_spectrum(u_hat, g_hat, params);
  const Scalar grad = grad_l2_norm(K_hat);
  const Scalar mean = K_hat.coeffs()(0, 0).real();
  return {inverse_transform(K_hat), grad, mean};
}

/// |LHS - RHS| of the one-step energy identity for the given scheme. For the
/// variant the right-hand side is int H1; for schemes that treat theta_c
/// implicitly it is int H1 + theta_c ||u1 - u0||^2. H1 is integrated from its
/// definition, so the identity is exact up to rounding for any consistent
/// step.
template <typename Scalar>
Scalar energy_identity_residual(const BasicField<Scalar>& u_n,
                                const BasicField<Scalar>& u_np1, Scalar tau,
                                const BasicModelParams<Scalar>& params,
                                SchemeKind kind = SchemeKind::semi_implicit,
                                const BasicGuardPolicy<Scalar>& guard = {}) {
  detail::require_same_grid(u_n.grid(), u_np1.grid(), "energy_identity_residual");
  const auto t = detail::identity_terms(u_n, transform(u_n), u_np1,
                                        transform(u_np1), tau, params, kind, guard);
  return std::abs(t.lhs - t.rhs);
}

template <typename Scalar>
struct GStatistics {
  Scalar g_mean;
  Scalar g_fluct_l2;
  /// |mean g| (1 - |mean u|)^{1/2}; the mean of g is bounded by a multiple of
  /// (1 - |mean u|)^{-1/2}, so this stays O(1) along a separated trajectory.
  Scalar mean_bound_stat;
};

template <typename Scalar>
GStatistics<Scalar> g_statistics(const BasicField<Scalar>& u,
                                 const BasicModelParams<Scalar>& params,
                                 const BasicGuardPolicy<Scalar>& guard = {}) {
  const Scalar u_mean = u.mean();
  if (!(std::abs(u_mean) < Scalar(1))) {
    throw DomainError("g_statistics requires |mean(u)| < 1");
  }
  const auto g = apply_pointwise(u, PotentialFn::f_tilde, params, guard);
  const Scalar g_mean = g.field.mean();
  const Scalar w = u.grid().quad_weight();
  const Scalar fluct = std::sqrt(w * (g.field.values() - g_mean).square().sum());
  return {g_mean, fluct,
          std::abs(g_mean) * std::sqrt(Scalar(1) - std::abs(u_mean))};
}

/// Full record for `state`; `previous` (the state one step earlier) enables
/// the identity residual and increment norms.
template <typename Scalar>
BasicDiagnosticsRecord<Scalar> make_record(const BasicSimState<Scalar>& state,
                                           const BasicSimState<Scalar>* previous,
                                           const BasicSchemeConfig<Scalar>& config) {
  const auto& params = config.params;
  const auto& u = state.u;
  const auto& u_hat = state.u_hat;
  BasicDiagnosticsRecord<Scalar> rec;
  rec.step = state.step;
  rec.time = state.time;
  rec.energy = detail::energy_from(u, u_hat, params, config.guard);
  rec.mass = u.mean();
  rec.margin = Scalar(1) - linf_norm(u);

  const auto g = apply_pointwise(u, PotentialFn::f_tilde, params, config.guard);
  const auto g_hat = transform(g.field);
  rec.grad_K_l2 =
      grad_l2_norm(detail::chemical_potential_spectrum(u_hat, g_hat, params));
  rec.g_mean = g.field.mean();
  rec.g_fluct = std::sqrt(u.grid().quad_weight() *
                          (g.field.values() - rec.g_mean).square().sum());
  rec.h1 = hs_norm(u_hat, Scalar(1));
  rec.h3 = hs_norm(u_hat, Scalar(3));
  rec.h5 = hs_norm(u_hat, Scalar(5));
  if (previous != nullptr) {
    const auto t = detail::identity_terms(previous->u, previous->u_hat, u, u_hat,
                                          config.tau, params, config.kind,
                                          config.guard);
    rec.identity_residual = std::abs(t.lhs - t.rhs);
    rec.neg_grad_increment = t.neg_grad_increment;
    rec.grad_increment = t.grad_increment;
  }
  return rec;
}

template <typename Scalar>
struct SeparationReport {
  Scalar min_margin;
  std::int64_t argmin_step;
  bool monotone_energy;
  /// max over consecutive records of E(next) - E(prev) (may be negative).
  Scalar max_energy_uptick;
};

template <typename Scalar>
SeparationReport<Scalar> separation_report(
    std::span<const BasicDiagnosticsRecord<Scalar>> records) {
  if (records.empty()) throw DomainError("separation_report: empty record series");
  SeparationReport<Scalar> rep{records[0].margin, records[0].step, true,
                               -std::numeric_limits<Scalar>::infinity()};
  const Scalar tol = Scalar(1e-12) * (Scalar(1) + std::abs(records[0].energy));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].margin < rep.min_margin) {
      rep.min_margin = records[i].margin;
      rep.argmin_step = records[i].step;
    }
    if (i > 0) {
      const Scalar uptick = records[i].energy - records[i - 1].energy;
      rep.max_energy_uptick = std::max(rep.max_energy_uptick, uptick);
      if (uptick > tol) rep.monotone_energy = false;
    }
  }
  if (records.size() == 1) rep.max_energy_uptick = Scalar(0);
  return rep;
}

template <typename Scalar>
SeparationReport<Scalar> separation_report(
    const std::vector<BasicDiagnosticsRecord<Scalar>>& records) {
  return separation_report(std::span<const BasicDiagnosticsRecord<Scalar>>(records));
}

template <typename Scalar>
struct DissipationBudget {
  /// sum_j [ (1/(2 tau)) || |grad|^{-1} d_j ||^2 + (nu/4) || grad d_j ||^2 ]
  Scalar dissipated;
  /// E(u^0) - E(u^n)
  Scalar energy_drop;
  bool holds;
};

/// Telescoped dissipation inequality over a series recorded at every step.
template <typename Scalar>
DissipationBudget<Scalar> dissipation_budget(
    std::span<const BasicDiagnosticsRecord<Scalar>> records, Scalar tau,
    Scalar nu, Scalar slack = Scalar(1e-8)) {
  if (records.empty()) throw DomainError("dissipation_budget: empty record series");
  Scalar dissipated = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].step != records[i - 1].step + 1) {
      throw DomainError("dissipation_budget needs records at every step");
    }
    const auto& r = records[i];
    dissipated += r.neg_grad_increment * r.neg_grad_increment / (Scalar(2) * tau) +
                  nu / Scalar(4) * r.grad_increment * r.grad_increment;
  }
  const Scalar drop = records.front().energy - records.back().energy;
  return {dissipated, drop, dissipated <= drop + slack};
}

}  // namespace chlog
