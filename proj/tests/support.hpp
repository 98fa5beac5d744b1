#pragma once

// Shared fixtures for the unit tests: field builders, seeded generators and a
// dense DFT-matrix oracle assembled from direct exponential sums.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "chlog/grid.hpp"

namespace chlog::testing {

template <typename Fn>
Field field_from(const GridHandle<double>& grid, Fn&& fn) {
  const int n = grid->n();
  RealArray<double> v(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) v(i, j) = fn(grid->coordinate(i), grid->coordinate(j));
  }
  return Field(grid, std::move(v));
}

/// Seeded source of random test inputs.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  /// Independent samples in [-amp, amp]; not band-limited.
  Field samples(const GridHandle<double>& grid, double amp) {
    const int n = grid->n();
    RealArray<double> v(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) v(i, j) = uniform(-amp, amp);
    }
    return Field(grid, std::move(v));
  }

  /// Real trigonometric polynomial with max(|k1|, |k2|) <= kmax < n/2,
  /// sup-normalized to amp, optionally shifted by a mean.
  Field bandlimited(const GridHandle<double>& grid, int kmax, double amp,
                    double mean = 0.0) {
    struct Term {
      int k1, k2;
      double a, b;
    };
    std::vector<Term> terms;
    for (int k1 = 0; k1 <= kmax; ++k1) {
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        if (k1 == 0 && k2 <= 0) continue;
        terms.push_back({k1, k2, uniform(-1, 1), uniform(-1, 1)});
      }
    }
    Field f = field_from(grid, [&](double x1, double x2) {
      double s = 0;
      for (const auto& t : terms) {
        s += t.a * std::cos(t.k1 * x1 + t.k2 * x2) + t.b * std::sin(t.k1 * x1 + t.k2 * x2);
      }
      return s;
    });
    f.values() *= amp / f.values().abs().maxCoeff();
    f.values() += mean;
    return f;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Dense operators on an n x n grid acting on the row-major sample vector.
struct DenseDft {
  int n;
  Eigen::MatrixXcd forward;  // samples -> FFT-ordered coefficients
  Eigen::MatrixXcd inverse;
  Eigen::VectorXd ksq;       // |k|^2 per FFT-ordered coefficient

  explicit DenseDft(int n_) : n(n_) {
    const int m = n * n;
    forward.resize(m, m);
    inverse.resize(m, m);
    ksq.resize(m);
    const double h = 2 * std::numbers::pi / n;
    const auto wave = [&](int idx) { return idx < n / 2 ? idx : idx - n; };
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int row = a * n + b;
        const int k1 = wave(a);
        const int k2 = wave(b);
        ksq(row) = k1 * k1 + k2 * k2;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double x1 = -std::numbers::pi + i * h;
            const double x2 = -std::numbers::pi + j * h;
            const std::complex<double> e =
                std::exp(std::complex<double>(0, -(k1 * x1 + k2 * x2)));
            forward(row, i * n + j) = e / double(m);
            inverse(i * n + j, row) = std::conj(e);
          }
        }
      }
    }
  }

  /// Real dense matrix of the Fourier multiplier with symbol s(|k|^2).
  template <typename Sym>
  Eigen::MatrixXd multiplier(Sym&& s) const {
    Eigen::VectorXcd d(ksq.size());
    for (Eigen::Index r = 0; r < ksq.size(); ++r) d(r) = s(ksq(r));
    return (inverse * d.asDiagonal() * forward).real();
  }

  static Eigen::VectorXd flat(const Field& f) {
    Eigen::VectorXd v(f.values().size());
    for (int i = 0; i < f.grid().n(); ++i) {
      for (int j = 0; j < f.grid().n(); ++j) v(i * f.grid().n() + j) = f.values()(i, j);
    }
    return v;
  }
};

inline double max_abs_diff(const Field& a, const Field& b) {
  return (a.values() - b.values()).abs().maxCoeff();
}

}  // namespace chlog::testing
