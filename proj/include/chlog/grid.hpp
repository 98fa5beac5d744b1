#pragma once

// Uniform grids on the torus [-pi, pi)^2, discrete Fourier transforms,
// Fourier multipliers and the norms built on them.
//
// Sample (i, j) sits at x = (-pi + i h, -pi + j h), h = 2 pi / n, and is stored
// row-major at flat index i * n + j. Spectra are stored in FFT order: array
// index m maps to wavenumber m for m < n/2 and m - n otherwise, so every
// wavenumber component lies in {-n/2, ..., n/2 - 1}. Coefficients are
// normalized as c(k) = n^-2 sum_x f(x) e^{-i k.x}, which makes c(0, 0) the mean
// of the field and f(x) = sum_k c(k) e^{i k.x} exactly on the grid.

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chlog/errors.hpp"

namespace chlog {

template <typename Scalar>
using RealArray =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using ComplexArray = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic,
                                  Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kDefaultMaxGridPoints = 4096;

template <typename Scalar>
constexpr Scalar two_pi() {
  return Scalar(2) * std::numbers::pi_v<Scalar>;
}

/// Relative tolerance for "the mean is negligible" checks.
template <typename Scalar>
constexpr Scalar mean_zero_tolerance() {
  return std::max(Scalar(1e-10),
                  Scalar(64) * std::numeric_limits<Scalar>::epsilon());
}

/// Immutable n x n discretization of the torus with its wavenumber tables.
template <typename Scalar>
class BasicGrid {
 public:
  explicit BasicGrid(int n, int max_n = kDefaultMaxGridPoints) : n_(n) {
    if (n % 2 != 0) {
      throw GridError("n must be even (got " + std::to_string(n) + ")");
    }
    if (n < 4) {
      throw GridError("n must be at least 4 (got " + std::to_string(n) + ")");
    }
    if (n > max_n) {
      throw GridError("n = " + std::to_string(n) + " exceeds the ceiling " +
                      std::to_string(max_n));
    }
    k1_.resize(n, n);
    k2_.resize(n, n);
    ksq_.resize(n, n);
    phase_.resize(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int ka = wavenumber(a);
        const int kb = wavenumber(b);
        k1_(a, b) = Scalar(ka);
        k2_(a, b) = Scalar(kb);
        ksq_(a, b) = Scalar(ka * ka + kb * kb);
        // e^{-i k.(-pi)} = (-1)^{k1 + k2}
        phase_(a, b) = ((ka + kb) % 2 == 0) ? Scalar(1) : Scalar(-1);
      }
    }
  }

  int n() const noexcept { return n_; }
  Eigen::Index size() const noexcept { return Eigen::Index(n_) * n_; }
  Scalar spacing() const noexcept { return two_pi<Scalar>() / Scalar(n_); }
  Scalar quad_weight() const noexcept { return spacing() * spacing(); }
  static constexpr Scalar measure() noexcept {
    return two_pi<Scalar>() * two_pi<Scalar>();
  }

  Scalar coordinate(int i) const noexcept {
    return -std::numbers::pi_v<Scalar> + Scalar(i) * spacing();
  }

  /// Wavenumber carried by FFT-ordered index m.
  int wavenumber(int m) const noexcept { return m < n_ / 2 ? m : m - n_; }

  /// FFT-ordered index of wavenumber k, k in {-n/2, ..., n/2 - 1}.
  int index_of(int k) const {
    if (k < -n_ / 2 || k >= n_ / 2) {
      throw GridError("wavenumber " + std::to_string(k) +
                      " is not resolved on an n = " + std::to_string(n_) +
                      " grid");
    }
    return k < 0 ? k + n_ : k;
  }

  const RealArray<Scalar>& k1() const noexcept { return k1_; }
  const RealArray<Scalar>& k2() const noexcept { return k2_; }
  /// |k|^2 per mode.
  const RealArray<Scalar>& ksq() const noexcept { return ksq_; }
  /// (-1)^{k1 + k2}: shift from the DFT origin to x = (-pi, -pi).
  const RealArray<Scalar>& phase() const noexcept { return phase_; }

  friend bool operator==(const BasicGrid& a, const BasicGrid& b) noexcept {
    return a.n_ == b.n_;
  }

 private:
  int n_;
  RealArray<Scalar> k1_, k2_, ksq_, phase_;
};

template <typename Scalar>
using GridHandle = std::shared_ptr<const BasicGrid<Scalar>>;

template <typename Scalar = double>
GridHandle<Scalar> make_grid(int n, int max_n = kDefaultMaxGridPoints) {
  return std::make_shared<const BasicGrid<Scalar>>(n, max_n);
}

/// Real samples of a function on the grid.
template <typename Scalar>
class BasicField {
 public:
  explicit BasicField(GridHandle<Scalar> grid)
      : grid_(std::move(grid)),
        values_(RealArray<Scalar>::Zero(grid_->n(), grid_->n())) {}

  BasicField(GridHandle<Scalar> grid, RealArray<Scalar> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() != grid_->n() || values_.cols() != grid_->n()) {
      throw GridError("field shape does not match an n = " +
                      std::to_string(grid_->n()) + " grid");
    }
    if (!values_.allFinite()) {
      throw DomainError("field contains non-finite samples");
    }
  }

  const BasicGrid<Scalar>& grid() const noexcept { return *grid_; }
  const GridHandle<Scalar>& grid_handle() const noexcept { return grid_; }

  const RealArray<Scalar>& values() const noexcept { return values_; }
  RealArray<Scalar>& values() noexcept { return values_; }

  Scalar mean() const { return values_.mean(); }

 private:
  GridHandle<Scalar> grid_;
  RealArray<Scalar> values_;
};

/// Fourier coefficients of a field, FFT-ordered.
template <typename Scalar>
class BasicSpectrum {
 public:
  explicit BasicSpectrum(GridHandle<Scalar> grid)
      : grid_(std::move(grid)),
        coeffs_(ComplexArray<Scalar>::Zero(grid_->n(), grid_->n())) {}

  BasicSpectrum(GridHandle<Scalar> grid, ComplexArray<Scalar> coeffs)
      : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != grid_->n() || coeffs_.cols() != grid_->n()) {
      throw GridError("spectrum shape does not match an n = " +
                      std::to_string(grid_->n()) + " grid");
    }
  }

  const BasicGrid<Scalar>& grid() const noexcept { return *grid_; }
  const GridHandle<Scalar>& grid_handle() const noexcept { return grid_; }

  const ComplexArray<Scalar>& coeffs() const noexcept { return coeffs_; }
  ComplexArray<Scalar>& coeffs() noexcept { return coeffs_; }

  std::complex<Scalar> coeff(int k1, int k2) const {
    return coeffs_(grid_->index_of(k1), grid_->index_of(k2));
  }
  std::complex<Scalar>& coeff(int k1, int k2) {
    return coeffs_(grid_->index_of(k1), grid_->index_of(k2));
  }

 private:
  GridHandle<Scalar> grid_;
  ComplexArray<Scalar> coeffs_;
};

using Grid = BasicGrid<double>;
using Field = BasicField<double>;
using Spectrum = BasicSpectrum<double>;

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& thread_fft() {
  thread_local Eigen::FFT<Scalar> fft = [] {
    Eigen::FFT<Scalar> f;
    f.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    return f;
  }();
  return fft;
}

/// Unscaled in-place 2D DFT (rows then columns).
template <typename Scalar>
void fft2(ComplexArray<Scalar>& data, bool inverse) {
  using Complex = std::complex<Scalar>;
  auto& fft = thread_fft<Scalar>();
  const Eigen::Index n = data.rows();
  std::vector<Complex> in(static_cast<std::size_t>(n));
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    Complex* row = data.data() + r * n;
    std::copy(row, row + n, in.begin());
    if (inverse) {
      fft.inv(row, in.data(), n);
    } else {
      fft.fwd(row, in.data(), n);
    }
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) in[r] = data(r, c);
    if (inverse) {
      fft.inv(out.data(), in.data(), n);
    } else {
      fft.fwd(out.data(), in.data(), n);
    }
    for (Eigen::Index r = 0; r < n; ++r) data(r, c) = out[r];
  }
}

/// Forward transform of complex samples with the torus normalization.
template <typename Scalar>
ComplexArray<Scalar> forward_complex(const BasicGrid<Scalar>& grid,
                                     ComplexArray<Scalar> samples) {
  fft2<Scalar>(samples, false);
  const Scalar scale = Scalar(1) / Scalar(grid.size());
  samples *= (grid.phase() * scale).template cast<std::complex<Scalar>>();
  return samples;
}

template <typename Scalar>
ComplexArray<Scalar> inverse_complex(const BasicGrid<Scalar>& grid,
                                     ComplexArray<Scalar> coeffs) {
  coeffs *= grid.phase().template cast<std::complex<Scalar>>();
  fft2<Scalar>(coeffs, true);
  return coeffs;
}

inline Eigen::Index mirror(Eigen::Index m, Eigen::Index n) {
  return m == 0 ? 0 : n - m;
}

template <typename Scalar>
void require_same_grid(const BasicGrid<Scalar>& a, const BasicGrid<Scalar>& b,
                       const char* op) {
  if (!(a == b)) {
    throw GridError(std::string(op) + ": operands live on different grids (n = " +
                    std::to_string(a.n()) + " vs n = " + std::to_string(b.n()) +
                    ")");
  }
}

}  // namespace detail

template <typename Scalar>
BasicSpectrum<Scalar> transform(const BasicField<Scalar>& field) {
  ComplexArray<Scalar> samples =
      field.values().template cast<std::complex<Scalar>>();
  return BasicSpectrum<Scalar>(
      field.grid_handle(),
      detail::forward_complex(field.grid(), std::move(samples)));
}

template <typename Scalar>
BasicField<Scalar> inverse_transform(const BasicSpectrum<Scalar>& spectrum) {
  ComplexArray<Scalar> samples =
      detail::inverse_complex(spectrum.grid(), spectrum.coeffs());
  return BasicField<Scalar>(spectrum.grid_handle(), samples.real());
}

/// Transforms two real fields with a single complex FFT of a + i b and
/// separates the results through conjugate symmetry. Both returned spectra are
/// exactly conjugate symmetric.
template <typename Scalar>
std::pair<BasicSpectrum<Scalar>, BasicSpectrum<Scalar>> transform_pair(
    const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  detail::require_same_grid(a.grid(), b.grid(), "transform_pair");
  using Complex = std::complex<Scalar>;
  const auto& grid = a.grid();
  const Eigen::Index n = grid.n();
  ComplexArray<Scalar> z(n, n);
  z.real() = a.values();
  z.imag() = b.values();
  const ComplexArray<Scalar> zhat = detail::forward_complex(grid, std::move(z));
  ComplexArray<Scalar> ahat(n, n);
  ComplexArray<Scalar> bhat(n, n);
  const Complex half(Scalar(0.5), Scalar(0));
  const Complex minus_half_i(Scalar(0), Scalar(-0.5));
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index rm = detail::mirror(r, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const Complex zk = zhat(r, c);
      const Complex zm = std::conj(zhat(rm, detail::mirror(c, n)));
      ahat(r, c) = half * (zk + zm);
      bhat(r, c) = minus_half_i * (zk - zm);
    }
  }
  return {BasicSpectrum<Scalar>(a.grid_handle(), std::move(ahat)),
          BasicSpectrum<Scalar>(a.grid_handle(), std::move(bhat))};
}

/// Tabulates a symbol k -> value over the grid's modes.
template <typename Scalar, typename Fn>
RealArray<Scalar> make_symbol(const BasicGrid<Scalar>& grid, Fn&& fn) {
  RealArray<Scalar> table(grid.n(), grid.n());
  for (int a = 0; a < grid.n(); ++a) {
    for (int b = 0; b < grid.n(); ++b) {
      table(a, b) = fn(grid.wavenumber(a), grid.wavenumber(b));
    }
  }
  return table;
}

/// Symbol of Delta: -|k|^2.
template <typename Scalar>
RealArray<Scalar> laplacian_symbol(const BasicGrid<Scalar>& grid) {
  return -grid.ksq();
}

/// Symbol of Delta^2: |k|^4.
template <typename Scalar>
RealArray<Scalar> bilaplacian_symbol(const BasicGrid<Scalar>& grid) {
  return grid.ksq().square();
}

/// Symbol of |grad|^s: |k|^s. For s < 0 the zero mode is set to 0, i.e. the
/// operator is meant for mean-zero fields.
template <typename Scalar>
RealArray<Scalar> abs_grad_symbol(const BasicGrid<Scalar>& grid, Scalar s) {
  RealArray<Scalar> table = grid.ksq().pow(s / Scalar(2));
  if (s < 0) table(0, 0) = Scalar(0);
  return table;
}

template <typename Scalar, typename Derived>
BasicSpectrum<Scalar> apply_symbol(const BasicSpectrum<Scalar>& spectrum,
                                   const Eigen::ArrayBase<Derived>& symbol) {
  const auto& grid = spectrum.grid();
  if (symbol.rows() != grid.n() || symbol.cols() != grid.n()) {
    throw GridError("apply_symbol: symbol table shape does not match the grid");
  }
  if (!symbol.allFinite()) {
    for (int a = 0; a < grid.n(); ++a) {
      for (int b = 0; b < grid.n(); ++b) {
        if (!std::isfinite(symbol(a, b))) {
          std::ostringstream msg;
          msg << "apply_symbol: symbol is not finite at mode k = ("
              << grid.wavenumber(a) << ", " << grid.wavenumber(b) << ")";
          throw DomainError(msg.str());
        }
      }
    }
  }
  return BasicSpectrum<Scalar>(
      spectrum.grid_handle(),
      spectrum.coeffs() *
          symbol.template cast<std::complex<Scalar>>());
}

template <typename Scalar>
BasicSpectrum<Scalar> galerkin_project(const BasicSpectrum<Scalar>& spectrum,
                                       int cutoff) {
  const auto& grid = spectrum.grid();
  if (cutoff <= 0 || cutoff > grid.n() / 2) {
    throw DomainError("galerkin cutoff " + std::to_string(cutoff) +
                      " outside (0, " + std::to_string(grid.n() / 2) + "]");
  }
  BasicSpectrum<Scalar> out = spectrum;
  const Scalar limit = Scalar(cutoff);
  auto& c = out.coeffs();
  for (int a = 0; a < grid.n(); ++a) {
    for (int b = 0; b < grid.n(); ++b) {
      if (std::max(std::abs(grid.k1()(a, b)), std::abs(grid.k2()(a, b))) >
          limit) {
        c(a, b) = std::complex<Scalar>(0);
      }
    }
  }
  return out;
}

/// Largest max(|k1|, |k2|) carrying a coefficient of modulus above tol.
template <typename Scalar>
int spectral_support(const BasicSpectrum<Scalar>& spectrum, Scalar tol) {
  const auto& grid = spectrum.grid();
  int support = 0;
  for (int a = 0; a < grid.n(); ++a) {
    for (int b = 0; b < grid.n(); ++b) {
      if (std::abs(spectrum.coeffs()(a, b)) > tol) {
        support = std::max({support, std::abs(grid.wavenumber(a)),
                            std::abs(grid.wavenumber(b))});
      }
    }
  }
  return support;
}

// ---------------------------------------------------------------------------
// Norms. Real-space norms use the rectangle rule with weight (2 pi / n)^2;
// spectral norms use sum_k w(k) |c(k)|^2 (2 pi)^2, which equals the quadrature
// value exactly for grid functions (discrete Parseval).

template <typename Scalar>
Scalar l2_norm(const BasicField<Scalar>& f) {
  return std::sqrt(f.grid().quad_weight() * f.values().square().sum());
}

template <typename Scalar>
Scalar linf_norm(const BasicField<Scalar>& f) {
  return f.values().abs().maxCoeff();
}

template <typename Scalar>
Scalar lp_norm(const BasicField<Scalar>& f, Scalar p) {
  if (!(p >= Scalar(1))) throw DomainError("lp_norm requires p >= 1");
  if (std::isinf(p)) return linf_norm(f);
  return std::pow(f.grid().quad_weight() * f.values().abs().pow(p).sum(),
                  Scalar(1) / p);
}

template <typename Scalar>
Scalar l2_norm(const BasicSpectrum<Scalar>& s) {
  return std::sqrt(BasicGrid<Scalar>::measure() * s.coeffs().abs2().sum());
}

template <typename Scalar>
Scalar hs_norm(const BasicSpectrum<Scalar>& s, Scalar order) {
  const auto weight = (Scalar(1) + s.grid().ksq()).pow(order);
  return std::sqrt(BasicGrid<Scalar>::measure() *
                   (weight * s.coeffs().abs2()).sum());
}

/// ||grad f||_2.
template <typename Scalar>
Scalar grad_l2_norm(const BasicSpectrum<Scalar>& s) {
  return std::sqrt(BasicGrid<Scalar>::measure() *
                   (s.grid().ksq() * s.coeffs().abs2()).sum());
}

template <typename Scalar>
bool is_mean_negligible(const BasicSpectrum<Scalar>& s) {
  return std::abs(s.coeffs()(0, 0)) <=
         mean_zero_tolerance<Scalar>() * l2_norm(s);
}

template <typename Scalar>
void require_mean_zero(const BasicSpectrum<Scalar>& s, const char* op) {
  if (!is_mean_negligible(s)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << op << ": field must be mean-zero (|mean| = "
        << std::abs(s.coeffs()(0, 0)) << " exceeds "
        << mean_zero_tolerance<Scalar>() << " * ||f||_2)";
    throw DomainError(msg.str());
  }
}

/// || |grad|^{-1} f ||_2 for mean-zero f.
template <typename Scalar>
Scalar neg_grad_l2_norm(const BasicSpectrum<Scalar>& s) {
  require_mean_zero(s, "neg_grad_l2_norm");
  const auto& ksq = s.grid().ksq();
  const auto inv = (ksq > Scalar(0)).select(ksq.inverse(), Scalar(0));
  return std::sqrt(BasicGrid<Scalar>::measure() *
                   (inv * s.coeffs().abs2()).sum());
}

template <typename Scalar>
Scalar hs_norm(const BasicField<Scalar>& f, Scalar order) {
  return hs_norm(transform(f), order);
}

template <typename Scalar>
Scalar grad_l2_norm(const BasicField<Scalar>& f) {
  return grad_l2_norm(transform(f));
}

template <typename Scalar>
Scalar neg_grad_l2_norm(const BasicField<Scalar>& f) {
  return neg_grad_l2_norm(transform(f));
}

template <typename Scalar>
struct NormSet {
  Scalar l2;
  Scalar linf;
  Scalar lp;
  Scalar h_s;
  Scalar grad_l2;
  /// Empty when the field is not mean-zero.
  std::optional<Scalar> neg_grad_l2;
};

template <typename Scalar>
NormSet<Scalar> norms(const BasicField<Scalar>& f, Scalar p = Scalar(2),
                      Scalar s = Scalar(1)) {
  const auto spectrum = transform(f);
  NormSet<Scalar> out{l2_norm(f),        linf_norm(f),
                      lp_norm(f, p),     hs_norm(spectrum, s),
                      grad_l2_norm(spectrum), std::nullopt};
  if (is_mean_negligible(spectrum)) out.neg_grad_l2 = neg_grad_l2_norm(spectrum);
  return out;
}

/// (-Delta)^{-1} f, the multiplier 1/|k|^2 on mean-zero fields.
template <typename Scalar>
BasicField<Scalar> inverse_laplacian_meanzero(const BasicField<Scalar>& f) {
  const auto spectrum = transform(f);
  require_mean_zero(spectrum, "inverse_laplacian_meanzero");
  const auto& ksq = f.grid().ksq();
  const RealArray<Scalar> symbol =
      (ksq > Scalar(0)).select(ksq.inverse(), Scalar(0));
  return inverse_transform(apply_symbol(spectrum, symbol));
}

}  // namespace chlog
