#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chlog/errors.hpp"
#include "chlog/grid.hpp"

namespace chlog {

/// Built-in initial data u0.
///
///   constant(c)                   u = c
///   single_mode(c, k, eps)        u = c + eps cos(k.x)
///   random_bandlimited(kmax, amp) mean-zero trigonometric polynomial with
///                                 max(|k1|, |k2|) <= kmax, coefficients
///                                 uniform in [-1, 1], rescaled so that the
///                                 grid maximum of |u| equals amp
///   two_bump                      -0.4 + 0.8 [b(x - a) + b(x + a)],
///                                 b(x) = exp(4 (cos x1 + cos x2 - 2)),
///                                 a = (pi/2, 0)
struct InitialDataSpec {
  enum class Kind { constant, single_mode, random_bandlimited, two_bump };

  Kind kind = Kind::constant;
  double c = 0;
  int k1 = 0;
  int k2 = 0;
  double eps = 0;
  int kmax = 0;
  double amp = 0;

  static InitialDataSpec constant(double value) {
    return {Kind::constant, value};
  }
  static InitialDataSpec single_mode(double value, int k1, int k2, double eps) {
    InitialDataSpec s{Kind::single_mode, value};
    s.k1 = k1;
    s.k2 = k2;
    s.eps = eps;
    return s;
  }
  static InitialDataSpec random_bandlimited(int kmax, double amp) {
    InitialDataSpec s{Kind::random_bandlimited};
    s.kmax = kmax;
    s.amp = amp;
    return s;
  }
  static InitialDataSpec two_bump() { return {Kind::two_bump}; }
};

/// Separation margin delta0 guaranteed by the kind: ||u0||_inf <= 1 - delta0.
inline double documented_margin(const InitialDataSpec& spec) {
  switch (spec.kind) {
    case InitialDataSpec::Kind::constant:
      return 1.0 - std::abs(spec.c);
    case InitialDataSpec::Kind::single_mode:
      return 1.0 - (std::abs(spec.c) + std::abs(spec.eps));
    case InitialDataSpec::Kind::random_bandlimited:
      return 1.0 - std::abs(spec.amp);
    case InitialDataSpec::Kind::two_bump:
      return 0.5;
  }
  return 0.0;
}

namespace detail {

/// Uniform double in [-1, 1) from the top 53 bits of a 64-bit draw; independent
/// of the standard library's distribution implementations.
inline double uniform_pm1(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

}  // namespace detail

template <typename Scalar = double>
BasicField<Scalar> builtin_initial_data(const InitialDataSpec& spec,
                                        const GridHandle<Scalar>& grid,
                                        std::uint64_t seed = 0) {
  using Kind = InitialDataSpec::Kind;
  if (!(documented_margin(spec) > 0.0)) {
    throw DomainError("initial data violates the separation bound: "
                      "||u0||_inf must stay below 1");
  }
  const int n = grid->n();
  RealArray<Scalar> values(n, n);
  switch (spec.kind) {
    case Kind::constant:
      values.setConstant(Scalar(spec.c));
      break;
    case Kind::single_mode: {
      grid->index_of(spec.k1);
      grid->index_of(spec.k2);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const Scalar phase = Scalar(spec.k1) * grid->coordinate(i) +
                               Scalar(spec.k2) * grid->coordinate(j);
          values(i, j) = Scalar(spec.c) + Scalar(spec.eps) * std::cos(phase);
        }
      }
      break;
    }
    case Kind::random_bandlimited: {
      if (spec.kmax < 1 || spec.kmax >= n / 2) {
        throw DomainError("random_bandlimited: kmax must lie in [1, n/2)");
      }
      if (!(spec.amp > 0.0)) {
        throw DomainError("random_bandlimited: amp must be positive");
      }
      struct Mode {
        int k1, k2;
        double a, b;
      };
      std::mt19937_64 rng(seed);
      std::vector<Mode> modes;
      for (int k1 = 0; k1 <= spec.kmax; ++k1) {
        for (int k2 = -spec.kmax; k2 <= spec.kmax; ++k2) {
          if (k1 == 0 && k2 <= 0) continue;
          const double a = detail::uniform_pm1(rng);
          const double b = detail::uniform_pm1(rng);
          modes.push_back({k1, k2, a, b});
        }
      }
      values.setZero();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double x1 = double(grid->coordinate(i));
          const double x2 = double(grid->coordinate(j));
          double sum = 0.0;
          for (const auto& m : modes) {
            const double phase = m.k1 * x1 + m.k2 * x2;
            sum += m.a * std::cos(phase) + m.b * std::sin(phase);
          }
          values(i, j) = Scalar(sum);
        }
      }
      const Scalar peak = values.abs().maxCoeff();
      values *= Scalar(spec.amp) / peak;
      break;
    }
    case Kind::two_bump: {
      const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
      auto bump = [](Scalar y1, Scalar y2) {
        return std::exp(Scalar(4) * (std::cos(y1) + std::cos(y2) - Scalar(2)));
      };
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const Scalar x1 = grid->coordinate(i);
          const Scalar x2 = grid->coordinate(j);
          values(i, j) = Scalar(-0.4) + Scalar(0.8) * (bump(x1 - half_pi, x2) +
                                                       bump(x1 + half_pi, x2));
        }
      }
      break;
    }
  }
  return BasicField<Scalar>(grid, std::move(values));
}

}  // namespace chlog
