#pragma once

// Logarithmic (Flory-Huggins) double-well potential
//
//   F(u)  = theta/2 [(1+u) ln(1+u) + (1-u) ln(1-u)] - theta_c/2 u^2
//   f(u)  = F'(u)  = -theta_c u + ftilde(u),   ftilde(u) = theta/2 ln((1+u)/(1-u))
//   F''(u)         = theta / (1 - u^2) - theta_c
//
// on (-1, 1), with a guard against the singular endpoints.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "chlog/errors.hpp"
#include "chlog/grid.hpp"

namespace chlog {

enum class GuardMode { abort, saturate };

template <typename Scalar>
struct BasicGuardPolicy {
  GuardMode mode = GuardMode::abort;
  Scalar eps = Scalar(1e-13);

  void validate() const {
    if (!(eps > Scalar(0) && eps < Scalar(1e-6))) {
      throw DomainError("guard eps must lie in (0, 1e-6)");
    }
  }
};

template <typename Scalar>
class BasicModelParams;

template <typename Scalar>
Scalar binodal(const BasicModelParams<Scalar>& params);

/// Mobility nu, temperature theta and critical temperature theta_c, with the
/// binodal u+ (positive root of f) and spinodal u_s = sqrt(1 - theta/theta_c).
template <typename Scalar>
class BasicModelParams {
 public:
  BasicModelParams(Scalar nu, Scalar theta, Scalar theta_c)
      : nu_(nu), theta_(theta), theta_c_(theta_c) {
    if (!(nu > 0) || !std::isfinite(nu)) {
      throw DomainError("nu must be positive");
    }
    if (!(theta > 0) || !std::isfinite(theta)) {
      throw DomainError("theta must be positive");
    }
    if (!(theta < theta_c) || !std::isfinite(theta_c)) {
      throw DomainError("theta must be < theta_c");
    }
    spinodal_ = std::sqrt(Scalar(1) - theta_ / theta_c_);
    binodal_ = chlog::binodal(*this);
  }

  Scalar nu() const noexcept { return nu_; }
  Scalar theta() const noexcept { return theta_; }
  Scalar theta_c() const noexcept { return theta_c_; }
  Scalar binodal() const noexcept { return binodal_; }
  Scalar spinodal() const noexcept { return spinodal_; }

  friend bool operator==(const BasicModelParams& a,
                         const BasicModelParams& b) noexcept {
    return a.nu_ == b.nu_ && a.theta_ == b.theta_ && a.theta_c_ == b.theta_c_;
  }

 private:
  Scalar nu_, theta_, theta_c_;
  Scalar spinodal_{};
  Scalar binodal_{};
};

using ModelParams = BasicModelParams<double>;
using GuardPolicy = BasicGuardPolicy<double>;

namespace detail {

template <typename Scalar>
[[noreturn]] void raise_guard(Scalar u, std::int64_t index) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "guard violation: ";
  if (index >= 0) msg << "sample " << index << " ";
  msg << "u = " << u << " is not inside (-1, 1) with the required margin";
  throw GuardViolation(msg.str(), index, double(u));
}

/// Applies the guard to a scalar. Returns the (possibly clamped) argument and
/// whether it was clamped.
template <typename Scalar>
std::pair<Scalar, bool> guard(Scalar u, const BasicGuardPolicy<Scalar>& policy,
                              std::int64_t index = -1) {
  if (std::isnan(u)) raise_guard(u, index);
  const Scalar limit = Scalar(1) - policy.eps;
  if (std::abs(u) < limit) return {u, false};
  if (policy.mode == GuardMode::abort) raise_guard(u, index);
  return {std::copysign(limit, u), true};
}

// Unguarded kernels; callers guarantee |u| < 1.

template <typename Scalar>
Scalar F_kernel(Scalar u, Scalar theta, Scalar theta_c) {
  const Scalar entropy =
      (Scalar(1) + u) * std::log1p(u) + (Scalar(1) - u) * std::log1p(-u);
  return Scalar(0.5) * theta * entropy - Scalar(0.5) * theta_c * u * u;
}

template <typename Scalar>
Scalar f_tilde_kernel(Scalar u, Scalar theta) {
  // theta/2 ln((1+u)/(1-u)) == theta atanh(u)
  return theta * std::atanh(u);
}

template <typename Scalar>
Scalar f_kernel(Scalar u, Scalar theta, Scalar theta_c) {
  return -theta_c * u + f_tilde_kernel(u, theta);
}

template <typename Scalar>
Scalar f_second_kernel(Scalar u, Scalar theta, Scalar theta_c) {
  return theta / ((Scalar(1) - u) * (Scalar(1) + u)) - theta_c;
}

}  // namespace detail

template <typename Scalar>
Scalar free_energy_density(Scalar u, const BasicModelParams<Scalar>& params,
                           const BasicGuardPolicy<Scalar>& policy = {}) {
  if (policy.mode == GuardMode::saturate && std::abs(u) >= Scalar(1)) {
    // continuous extension F(+-1)
    return params.theta() * std::numbers::ln2_v<Scalar> -
           Scalar(0.5) * params.theta_c();
  }
  const Scalar v = detail::guard(u, policy).first;
  return detail::F_kernel(v, params.theta(), params.theta_c());
}

template <typename Scalar>
Scalar f_tilde(Scalar u, const BasicModelParams<Scalar>& params,
               const BasicGuardPolicy<Scalar>& policy = {}) {
  return detail::f_tilde_kernel(detail::guard(u, policy).first, params.theta());
}

/// F'(u).
template <typename Scalar>
Scalar f(Scalar u, const BasicModelParams<Scalar>& params,
         const BasicGuardPolicy<Scalar>& policy = {}) {
  return detail::f_kernel(detail::guard(u, policy).first, params.theta(),
                          params.theta_c());
}

/// F''(u).
template <typename Scalar>
Scalar f_second(Scalar u, const BasicModelParams<Scalar>& params,
                const BasicGuardPolicy<Scalar>& policy = {}) {
  return detail::f_second_kernel(detail::guard(u, policy).first,
                                 params.theta(), params.theta_c());
}

/// Positive root of f by bisection on [u_s + 1e-12, 1 - 1e-12]. f is negative
/// on (0, u+) and positive on (u+, 1). Iterates until the bracket stops
/// shrinking (at most 200 halvings). When u+ is closer to 1 than 1e-12 (very
/// deep quench) the upper bracket end is returned.
template <typename Scalar>
Scalar binodal(const BasicModelParams<Scalar>& params) {
  const Scalar theta = params.theta();
  const Scalar theta_c = params.theta_c();
  Scalar lo = params.spinodal() + Scalar(1e-12);
  Scalar hi = Scalar(1) - Scalar(1e-12);
  if (detail::f_kernel(hi, theta, theta_c) <= Scalar(0)) return hi;
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    if (detail::f_kernel(mid, theta, theta_c) < Scalar(0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(detail::f_kernel(lo, theta, theta_c)) <
                 std::abs(detail::f_kernel(hi, theta, theta_c))
             ? lo
             : hi;
}

/// Quartic Taylor truncation theta/2 * u^4/6 + (theta/2 - theta_c/2) u^2.
template <typename Scalar>
Scalar quartic_density(Scalar u, const BasicModelParams<Scalar>& params) {
  const Scalar u2 = u * u;
  return Scalar(0.5) * params.theta() * u2 * u2 / Scalar(6) +
         Scalar(0.5) * (params.theta() - params.theta_c()) * u2;
}

/// |u| at which the quartic truncation attains its minimum,
/// sqrt(3 (theta_c - theta) / theta).
template <typename Scalar>
Scalar quartic_minimizer(const BasicModelParams<Scalar>& params) {
  return std::sqrt(Scalar(3) * (params.theta_c() - params.theta()) /
                   params.theta());
}

enum class PotentialFn { F, f, f_tilde, f_second };

template <typename Scalar>
struct PointwiseResult {
  BasicField<Scalar> field;
  std::int64_t saturations = 0;
};

/// Applies one of the potential functions sample by sample. Under the abort
/// policy the first offending sample (row-major index) is reported.
template <typename Scalar>
PointwiseResult<Scalar> apply_pointwise(const BasicField<Scalar>& field,
                                        PotentialFn fn,
                                        const BasicModelParams<Scalar>& params,
                                        const BasicGuardPolicy<Scalar>& policy = {}) {
  const Scalar theta = params.theta();
  const Scalar theta_c = params.theta_c();
  const auto& in = field.values();
  RealArray<Scalar> out(in.rows(), in.cols());
  std::int64_t saturations = 0;
  const Eigen::Index total = in.size();
  for (Eigen::Index idx = 0; idx < total; ++idx) {
    const Scalar raw = in.data()[idx];
    if (fn == PotentialFn::F && policy.mode == GuardMode::saturate &&
        std::abs(raw) >= Scalar(1)) {
      out.data()[idx] = free_energy_density(raw, params, policy);
      ++saturations;
      continue;
    }
    const auto [u, clamped] = detail::guard(raw, policy, std::int64_t(idx));
    saturations += clamped ? 1 : 0;
    Scalar value{};
    switch (fn) {
      case PotentialFn::F:
        value = detail::F_kernel(u, theta, theta_c);
        break;
      case PotentialFn::f:
        value = detail::f_kernel(u, theta, theta_c);
        break;
      case PotentialFn::f_tilde:
        value = detail::f_tilde_kernel(u, theta);
        break;
      case PotentialFn::f_second:
        value = detail::f_second_kernel(u, theta, theta_c);
        break;
    }
    out.data()[idx] = value;
  }
  return {BasicField<Scalar>(field.grid_handle(), std::move(out)), saturations};
}

}  // namespace chlog
