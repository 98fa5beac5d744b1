#include <cmath>
#include <future>
#include <numbers>
#include <vector>

#include "chlog/grid.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chlog;
using chlog::testing::DenseDft;
using chlog::testing::field_from;
using chlog::testing::Gen;
using chlog::testing::max_abs_diff;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("grid construction and wavenumbers") {
  const auto g4 = make_grid(4);
  CHECK(g4->size() == 16);
  std::vector<int> ks;
  for (int m = 0; m < 4; ++m) ks.push_back(g4->wavenumber(m));
  CHECK(ks == std::vector<int>{0, 1, -2, -1});
  CHECK(g4->index_of(-2) == 2);
  CHECK_THROWS_AS(g4->index_of(2), GridError);

  const auto g64 = make_grid(64);
  CHECK(g64->quad_weight() == doctest::Approx(0.009635).epsilon(1e-4));
  CHECK(g64->quad_weight() == std::pow(2 * pi / 64, 2));
  CHECK(g64->coordinate(0) == -pi);
  CHECK(g64->coordinate(32) == doctest::Approx(0.0));
}

TEST_CASE("grid rejects invalid sizes") {
  CHECK_THROWS_WITH_AS(make_grid(5), doctest::Contains("n must be even"), GridError);
  CHECK_THROWS_AS(make_grid(2), GridError);
  CHECK_THROWS_AS(make_grid(4098), GridError);
  CHECK_NOTHROW(make_grid(4096));
  CHECK_THROWS_AS(make_grid(64, 32), GridError);
}

TEST_CASE("transform of simple fields") {
  const auto grid = make_grid(16);
  const Field c = field_from(grid, [](double, double) { return 0.37; });
  const Spectrum ch = transform(c);
  CHECK(std::abs(ch.coeff(0, 0) - 0.37) <= 1e-14);
  ComplexArray<double> rest = ch.coeffs();
  rest(0, 0) = 0;
  CHECK(rest.abs().maxCoeff() <= 1e-14);

  const Field cs = field_from(grid, [](double x1, double) { return std::cos(x1); });
  Spectrum sh = transform(cs);
  CHECK(std::abs(sh.coeff(1, 0) - 0.5) <= 1e-14);
  CHECK(std::abs(sh.coeff(-1, 0) - 0.5) <= 1e-14);
  sh.coeff(1, 0) = 0;
  sh.coeff(-1, 0) = 0;
  CHECK(sh.coeffs().abs().maxCoeff() <= 1e-14);

  const Field s2 = field_from(grid, [](double, double x2) { return std::sin(2 * x2); });
  const Spectrum s2h = transform(s2);
  CHECK(std::abs(s2h.coeff(0, 2) - std::complex<double>(0, -0.5)) <= 1e-14);
  CHECK(std::abs(s2h.coeff(0, -2) - std::complex<double>(0, 0.5)) <= 1e-14);
}

TEST_CASE("transform round trip on random fields") {
  Gen gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    for (int n : {8, 12, 32}) {
      const auto grid = make_grid(n);
      const Field f = gen.samples(grid, 1.0);
      CHECK(max_abs_diff(inverse_transform(transform(f)), f) <= 1e-12);
    }
  }
}

TEST_CASE("paired transform matches two single transforms") {
  Gen gen(12);
  const auto grid = make_grid(16);
  for (int trial = 0; trial < 5; ++trial) {
    const Field a = gen.samples(grid, 1.0);
    const Field b = gen.samples(grid, 3.0);
    const auto [ah, bh] = transform_pair(a, b);
    CHECK((ah.coeffs() - transform(a).coeffs()).abs().maxCoeff() <= 1e-14);
    CHECK((bh.coeffs() - transform(b).coeffs()).abs().maxCoeff() <= 1e-13);
  }
  CHECK_THROWS_AS(transform_pair(Field(make_grid(8)), Field(make_grid(16))), GridError);
}

TEST_CASE("dense DFT-matrix oracle on n = 4") {
  const auto grid = make_grid(4);
  const DenseDft dft(4);
  Gen gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Field f = gen.samples(grid, 1.0);
    const Eigen::VectorXd v = DenseDft::flat(f);

    const Eigen::VectorXcd c = dft.forward * v.cast<std::complex<double>>();
    const Spectrum fh = transform(f);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) CHECK(std::abs(fh.coeffs()(a, b) - c(a * 4 + b)) <= 1e-12);
    }

    const auto check_op = [&](const Field& got, const Eigen::VectorXd& want) {
      CHECK((DenseDft::flat(got) - want).cwiseAbs().maxCoeff() <= 1e-12);
    };
    check_op(inverse_transform(apply_symbol(fh, laplacian_symbol(*grid))),
             dft.multiplier([](double k2) { return -k2; }) * v);
    check_op(inverse_transform(apply_symbol(fh, bilaplacian_symbol(*grid))),
             dft.multiplier([](double k2) { return k2 * k2; }) * v);
    check_op(inverse_transform(apply_symbol(fh, abs_grad_symbol(*grid, 3.0))),
             dft.multiplier([](double k2) { return std::pow(k2, 1.5); }) * v);

    Field mz = f;
    mz.values() -= f.mean();
    check_op(inverse_laplacian_meanzero(mz),
             dft.multiplier([](double k2) { return k2 > 0 ? 1.0 / k2 : 0.0; }) *
                 DenseDft::flat(mz));
  }
}

TEST_CASE("differential operators on eigenfunctions") {
  const auto grid = make_grid(32);
  const Field c1 = field_from(grid, [](double x1, double) { return std::cos(x1); });
  const Field c2 = field_from(grid, [](double x1, double) { return std::cos(2 * x1); });

  Field neg = c1;
  neg.values() *= -1;
  CHECK(max_abs_diff(inverse_transform(apply_symbol(transform(c1), laplacian_symbol(*grid))),
                     neg) <= 1e-13);
  Field sixteen = c2;
  sixteen.values() *= 16;
  CHECK(max_abs_diff(
            inverse_transform(apply_symbol(transform(c2), bilaplacian_symbol(*grid))),
            sixteen) <= 16 * 1e-12);

  CHECK(max_abs_diff(inverse_laplacian_meanzero(c1), c1) <= 1e-14);
  Field quarter = c2;
  quarter.values() /= 4;
  CHECK(max_abs_diff(inverse_laplacian_meanzero(c2), quarter) <= 1e-14);
}

TEST_CASE("inverse Laplacian requires mean zero") {
  const auto grid = make_grid(8);
  const Field one = field_from(grid, [](double, double) { return 1.0; });
  CHECK_THROWS_WITH_AS(inverse_laplacian_meanzero(one), doctest::Contains("mean-zero"),
                       DomainError);
}

TEST_CASE("apply_symbol rejects non-finite symbols and names the mode") {
  const auto grid = make_grid(8);
  RealArray<double> sym = RealArray<double>::Ones(8, 8);
  sym(grid->index_of(-1), grid->index_of(2)) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(apply_symbol(transform(Field(grid)), sym),
                       doctest::Contains("(-1, 2)"), DomainError);
  CHECK_THROWS_AS(apply_symbol(transform(Field(grid)), RealArray<double>::Ones(4, 4)),
                  GridError);
}

TEST_CASE("make_symbol tabulates by wavenumber") {
  const auto grid = make_grid(8);
  const auto sym = make_symbol(*grid, [](int k1, int k2) { return 10.0 * k1 + k2; });
  CHECK(sym(grid->index_of(-3), grid->index_of(2)) == -28.0);
  CHECK((sym - (10 * grid->k1() + grid->k2())).abs().maxCoeff() == 0.0);
}

TEST_CASE("Galerkin projection") {
  const auto grid = make_grid(16);
  Gen gen(14);
  const Field f = gen.samples(grid, 1.0);
  const Spectrum fh = transform(f);
  CHECK((galerkin_project(fh, 8).coeffs() == fh.coeffs()).all());

  const Field c3 = field_from(grid, [](double x1, double) { return std::cos(3 * x1); });
  CHECK(linf_norm(inverse_transform(galerkin_project(transform(c3), 2))) <= 1e-15);
  CHECK(max_abs_diff(inverse_transform(galerkin_project(transform(c3), 3)), c3) <= 1e-14);

  CHECK_THROWS_AS(galerkin_project(fh, 0), DomainError);
  CHECK_THROWS_AS(galerkin_project(fh, 9), DomainError);

  for (int cutoff = 1; cutoff <= 8; ++cutoff) {
    const Spectrum once = galerkin_project(fh, cutoff);
    const Spectrum twice = galerkin_project(once, cutoff);
    CHECK((once.coeffs() == twice.coeffs()).all());
    CHECK(spectral_support(once, 1e-14) <= cutoff);
  }
}

TEST_CASE("Galerkin projection against direct mode sums") {
  const auto grid = make_grid(12);
  Gen gen(15);
  const Field f = gen.samples(grid, 1.0);
  const int cutoff = 3;
  const Field projected = inverse_transform(galerkin_project(transform(f), cutoff));
  // c(k) = n^-2 sum f e^{-ik.x}, then resum the retained modes.
  const int n = 12;
  std::vector<std::complex<double>> coeff;
  std::vector<std::pair<int, int>> modes;
  for (int k1 = -cutoff; k1 <= cutoff; ++k1) {
    for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
      std::complex<double> c = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          c += f.values()(i, j) *
               std::exp(std::complex<double>(
                   0, -(k1 * grid->coordinate(i) + k2 * grid->coordinate(j))));
        }
      }
      coeff.push_back(c / double(n * n));
      modes.emplace_back(k1, k2);
    }
  }
  const Field direct = field_from(grid, [&](double x1, double x2) {
    std::complex<double> s = 0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      s += coeff[m] *
           std::exp(std::complex<double>(0, modes[m].first * x1 + modes[m].second * x2));
    }
    return s.real();
  });
  CHECK(max_abs_diff(projected, direct) <= 1e-12);
}

TEST_CASE("norms of simple fields") {
  const auto grid = make_grid(32);
  const Field one = field_from(grid, [](double, double) { return 1.0; });
  CHECK(l2_norm(one) == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(linf_norm(one) == 1.0);
  CHECK(lp_norm(one, 3.0) == doctest::Approx(std::pow(4 * pi * pi, 1.0 / 3)).epsilon(1e-14));

  const Field c1 = field_from(grid, [](double x1, double) { return std::cos(x1); });
  const double expect = std::sqrt(2 * pi * pi);
  CHECK(l2_norm(c1) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(grad_l2_norm(c1) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(neg_grad_l2_norm(c1) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(hs_norm(c1, 2.0) == doctest::Approx(2 * pi * std::sqrt(2.0)).epsilon(1e-13));

  const auto ns = norms(c1, 4.0, 2.0);
  CHECK(ns.h_s == doctest::Approx(2 * pi * std::sqrt(2.0)).epsilon(1e-13));
  REQUIRE(ns.neg_grad_l2.has_value());
  CHECK(!norms(one).neg_grad_l2.has_value());
  CHECK_THROWS_AS(neg_grad_l2_norm(one), DomainError);
}

TEST_CASE("H^s norm against a direct weighted mode sum") {
  const auto grid = make_grid(8);
  Gen gen(16);
  for (int trial = 0; trial < 5; ++trial) {
    const Field f = gen.samples(grid, 1.0);
    const double s = gen.uniform(-1.0, 3.0);
    double sum = 0;
    for (int k1 = -4; k1 < 4; ++k1) {
      for (int k2 = -4; k2 < 4; ++k2) {
        std::complex<double> c = 0;
        for (int i = 0; i < 8; ++i) {
          for (int j = 0; j < 8; ++j) {
            c += f.values()(i, j) *
                 std::exp(std::complex<double>(
                     0, -(k1 * grid->coordinate(i) + k2 * grid->coordinate(j))));
          }
        }
        c /= 64.0;
        sum += std::pow(1.0 + k1 * k1 + k2 * k2, s) * std::norm(c);
      }
    }
    CHECK(hs_norm(f, s) == doctest::Approx(2 * pi * std::sqrt(sum)).epsilon(1e-12));
  }
}

TEST_CASE("Parseval on band-limited fields") {
  Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 * gen.integer(4, 16);
    const auto grid = make_grid(n);
    const Field f = gen.bandlimited(grid, gen.integer(1, n / 2 - 1), gen.uniform(0.1, 5),
                                    gen.uniform(-1, 1));
    const double spectral = l2_norm(transform(f));
    CHECK(std::abs(l2_norm(f) - spectral) <= 1e-10 * spectral);
  }
}

TEST_CASE("apply_symbol is linear") {
  Gen gen(18);
  const auto grid = make_grid(16);
  const auto sym = make_symbol(*grid, [](int k1, int k2) {
    return std::cos(0.3 * k1) - 0.1 * k2 * k2 + 2.0;
  });
  for (int trial = 0; trial < 20; ++trial) {
    const Field f = gen.samples(grid, 1.0);
    const Field g = gen.samples(grid, 1.0);
    const double a = gen.uniform(-3, 3);
    const double b = gen.uniform(-3, 3);
    const Field comb(grid, a * f.values() + b * g.values());
    const Field lhs = inverse_transform(apply_symbol(transform(comb), sym));
    const Field rhs(grid,
                    a * inverse_transform(apply_symbol(transform(f), sym)).values() +
                        b * inverse_transform(apply_symbol(transform(g), sym)).values());
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("Laplacian inverts the inverse Laplacian on mean-zero fields") {
  Gen gen(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 * gen.integer(4, 16);
    const auto grid = make_grid(n);
    const Field f = gen.bandlimited(grid, gen.integer(1, n / 2 - 1), 1.0);
    const Field back = inverse_transform(
        apply_symbol(transform(inverse_laplacian_meanzero(f)), laplacian_symbol(*grid)));
    // (-Delta)^{-1} composed with Delta is -identity.
    CHECK(max_abs_diff(Field(grid, -back.values()), f) <= 1e-10);
  }
}

TEST_CASE("transforms are safe to run concurrently") {
  Gen gen(20);
  const auto grid = make_grid(64);
  std::vector<Field> inputs;
  for (int i = 0; i < 8; ++i) inputs.push_back(gen.samples(grid, 1.0));
  std::vector<Spectrum> serial;
  for (const auto& f : inputs) serial.push_back(transform(f));
  std::vector<std::future<Spectrum>> jobs;
  for (const auto& f : inputs) {
    jobs.push_back(std::async(std::launch::async, [&f] { return transform(f); }));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CHECK((jobs[i].get().coeffs() == serial[i].coeffs()).all());
  }
}

TEST_CASE("field construction validates shape and finiteness") {
  const auto grid = make_grid(8);
  CHECK_THROWS_AS(Field(grid, RealArray<double>::Zero(4, 4)), GridError);
  RealArray<double> bad = RealArray<double>::Zero(8, 8);
  bad(3, 3) = std::nan("");
  CHECK_THROWS_AS(Field(grid, bad), DomainError);
}
