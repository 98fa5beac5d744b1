#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "chlog/errors.hpp"
#include "chlog/grid.hpp"
#include "chlog/potential.hpp"

namespace chlog {

/// semi_implicit: (u1 - u0)/tau = -nu D^2 u1 - theta_c D u1 + D ftilde(u0)
/// variant:       (u1 - u0)/tau = -nu D^2 u1 + D f(u0)
/// galerkin:      semi_implicit with ftilde(u0) projected onto |k|_inf <= N
enum class SchemeKind { semi_implicit, variant, galerkin };

inline std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::semi_implicit:
      return "semi_implicit";
    case SchemeKind::variant:
      return "variant";
    case SchemeKind::galerkin:
      return "galerkin";
  }
  return "unknown";
}

/// Whether theta_c * Delta is treated implicitly (and hence bounds tau).
constexpr bool implicit_theta_c(SchemeKind kind) {
  return kind != SchemeKind::variant;
}

template <typename Scalar>
struct BasicSchemeConfig {
  SchemeKind kind = SchemeKind::semi_implicit;
  Scalar tau;
  BasicModelParams<Scalar> params;
  BasicGuardPolicy<Scalar> guard{};
  /// Retained band N for SchemeKind::galerkin.
  int galerkin_cutoff = 0;
};

using SchemeConfig = BasicSchemeConfig<double>;

/// Solvability bound on tau: 2 nu / theta_c^2 for schemes with implicit
/// theta_c, +infinity for the variant. The returned bound is checked to give
/// strictly positive denominators 1 + tau nu |k|^4 - tau theta_c |k|^2 on the
/// grid.
template <typename Scalar>
Scalar max_admissible_tau(const BasicModelParams<Scalar>& params,
                          const BasicGrid<Scalar>& grid, SchemeKind kind) {
  if (!implicit_theta_c(kind)) return std::numeric_limits<Scalar>::infinity();
  const Scalar bound =
      Scalar(2) * params.nu() / (params.theta_c() * params.theta_c());
  const auto& ksq = grid.ksq();
  const Scalar min_den =
      (Scalar(1) + bound * params.nu() * ksq.square() -
       bound * params.theta_c() * ksq)
          .minCoeff();
  if (!(min_den > Scalar(0))) {
    throw InadmissibleStep("solvability bound produced a non-positive "
                           "denominator on the grid");
  }
  return bound;
}

template <typename Scalar>
void validate(const BasicSchemeConfig<Scalar>& config,
              const BasicGrid<Scalar>& grid) {
  config.guard.validate();
  if (!(config.tau > Scalar(0)) || !std::isfinite(config.tau)) {
    throw InadmissibleStep("tau must be positive and finite");
  }
  const Scalar bound = max_admissible_tau(config.params, grid, config.kind);
  if (config.tau > bound) {
    throw InadmissibleStep("tau = " + std::to_string(config.tau) +
                           " exceeds the solvability bound 2 nu / theta_c^2 = " +
                           std::to_string(bound));
  }
  if (config.kind == SchemeKind::galerkin &&
      (config.galerkin_cutoff <= 0 || config.galerkin_cutoff > grid.n() / 2)) {
    throw DomainError("galerkin cutoff " +
                      std::to_string(config.galerkin_cutoff) + " outside (0, " +
                      std::to_string(grid.n() / 2) + "]");
  }
}

}  // namespace chlog
