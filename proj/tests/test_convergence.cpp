#include <cmath>
#include <vector>

#include "chlog/convergence.hpp"
#include "chlog/initial_data.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chlog;
using chlog::testing::max_abs_diff;

namespace {

const ModelParams kParams(1.0, 1.0, 2.0);

double distance(const Field& a, const Field& b) {
  return l2_norm(Field(a.grid_handle(), a.values() - b.values()));
}

}  // namespace

TEST_CASE("steps_to_reach") {
  CHECK(steps_to_reach(0.5, 1e-3) == 500);
  CHECK(steps_to_reach(0.5, 3.125e-5) == 16000);
  CHECK(steps_to_reach(0.0, 0.1) == 0);
  CHECK_THROWS_AS(steps_to_reach(0.5, 0.3), DomainError);
  CHECK_THROWS_AS(steps_to_reach(0.5, 0.0), DomainError);
}

TEST_CASE("study validation") {
  ConvergenceStudy s{.params = kParams,
                     .initial = InitialDataSpec::random_bandlimited(3, 0.4),
                     .seed = 7,
                     .grid_n = 16,
                     .t_final = 0.1,
                     .taus = {0.02, 0.01, 0.005},
                     .tau_ref = 0.0003125};
  CHECK_NOTHROW(validate(s));
  s.tau_ref = 0.000625;
  CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("16x"), DomainError);
  s.tau_ref = 0.0003125;
  s.taus = {0.01, 0.02, 0.005};
  CHECK_THROWS_AS(validate(s), DomainError);
  s.taus = {0.03, 0.01};
  CHECK_THROWS_AS(validate(s), DomainError);
}

TEST_CASE("reference of a constant state is the state") {
  const auto grid = make_grid(16);
  const Field c = builtin_initial_data(InitialDataSpec::constant(-0.25), grid);
  for (double t : {0.1, 1.0}) {
    const auto ref = reference_solution(c, kParams, t, 0.01);
    CHECK((ref.final_state.u.values() == c.values()).all());
  }
}

TEST_CASE("reference solution is deterministic") {
  const auto grid = make_grid(32);
  const Field u0 = builtin_initial_data(InitialDataSpec::random_bandlimited(4, 0.4), grid, 3);
  const auto a = reference_solution(u0, kParams, 0.05, 1e-3, SchemeKind::semi_implicit, 0);
  const auto b = reference_solution(u0, kParams, 0.05, 1e-3, SchemeKind::semi_implicit, 0);
  CHECK((a.final_state.u.values() == b.final_state.u.values()).all());
}

TEST_CASE("Richardson self-consistency of the reference") {
  const auto grid = make_grid(32);
  const Field u0 = builtin_initial_data(InitialDataSpec::random_bandlimited(4, 0.4), grid, 3);
  const double t = 0.1;
  const double tau = 1e-3;
  const auto r1 = reference_solution(u0, kParams, t, tau, SchemeKind::semi_implicit, 0);
  const auto r2 = reference_solution(u0, kParams, t, tau / 2, SchemeKind::semi_implicit, 0);
  const auto r4 = reference_solution(u0, kParams, t, tau / 4, SchemeKind::semi_implicit, 0);
  const double d1 = distance(r1.final_state.u, r2.final_state.u);
  const double d2 = distance(r2.final_state.u, r4.final_state.u);
  CHECK(d1 / d2 >= 1.7);
  CHECK(d1 / d2 <= 2.3);
  // halving changes the reference by C tau with C bounded across levels
  CHECK(d2 / (tau / 2) <= d1 / tau * 1.05);
}

TEST_CASE("linear regime matches exponential decay of the linearized equation") {
  const auto grid = make_grid(16);
  const double eps = 1e-6;
  const double t = 0.5;
  for (const auto [k1, k2] : std::vector<std::pair<int, int>>{{1, 1}, {1, 0}, {0, 1}}) {
    const Field u0 = builtin_initial_data(InitialDataSpec::single_mode(0.0, k1, k2, eps), grid);
    const auto ref = reference_solution(u0, kParams, t, 1e-5, SchemeKind::semi_implicit, 0);
    const double ksq = k1 * k1 + k2 * k2;
    const double rate =
        -(kParams.nu() * ksq * ksq - kParams.theta_c() * ksq + kParams.theta() * ksq);
    const double want = eps * std::exp(rate * t);
    const double got = 2 * transform(ref.final_state.u).coeff(k1, k2).real();
    CHECK(std::abs(got - want) <= 1e-4 * std::abs(want));
  }
}

TEST_CASE("guard aborts invalidate the reference") {
  const auto grid = make_grid(8);
  Field u(grid);
  u.values()(0, 0) = 0.999999;
  // tau = 0.5 from a nearly singular sample drives the iterate out of (-1, 1)
  CHECK_THROWS_AS(reference_solution(u, kParams, 1.0, 0.5), StudyAborted);
}

TEST_CASE("observed order on synthetic curves") {
  std::vector<ErrorPoint> linear, quadratic;
  for (double tau : {0.1, 0.05, 0.025, 0.0125}) {
    linear.push_back({tau, 3 * tau});
    quadratic.push_back({tau, 5 * tau * tau});
  }
  const auto p1 = observed_order(linear);
  CHECK(!p1.degenerate);
  CHECK(p1.p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p1.fit_residual <= 1e-12);
  CHECK(observed_order(quadratic).p == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(observed_order(std::vector<ErrorPoint>{{0.1, 0.3}, {0.05, 0.15}}).degenerate);
  linear[2].error = 0.0;
  const auto deg = observed_order(linear);
  CHECK(deg.degenerate);
  CHECK(deg.reason.find("noise floor") != std::string::npos);
}

TEST_CASE("error curve of a constant state is zero") {
  ConvergenceStudy s{.params = kParams,
                     .initial = InitialDataSpec::constant(0.3),
                     .grid_n = 16,
                     .t_final = 0.1,
                     .taus = {0.02, 0.01, 0.005},
                     .tau_ref = 0.0003125};
  const auto curve = error_curve(s);
  REQUIRE(curve.points.size() == 3);
  for (const auto& pt : curve.points) CHECK(pt.error == 0.0);
  CHECK(observed_order(curve.points).degenerate);
}

TEST_CASE("error curve is first order and monotone") {
  ConvergenceStudy s{.params = kParams,
                     .initial = InitialDataSpec::random_bandlimited(3, 0.4),
                     .seed = 7,
                     .grid_n = 32,
                     .t_final = 0.2,
                     .taus = {0.008, 0.004, 0.002, 0.001},
                     .tau_ref = 6.25e-5};
  const auto curve = error_curve(s);
  REQUIRE(curve.points.size() == 4);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].tau == s.taus[i]);
    if (i > 0) {
      CHECK(curve.points[i].error <= 1.05 * curve.points[i - 1].error);
      const double ratio = curve.points[i - 1].error / curve.points[i].error;
      CHECK(ratio >= 1.7);
      CHECK(ratio <= 2.3);
    }
  }
  const auto fit = observed_order(curve.points);
  CHECK(fit.p >= 0.8);
  CHECK(fit.p <= 1.2);
  CHECK(fit.fit_residual <= 0.1);
}

TEST_CASE("band-limited noise") {
  const auto grid = make_grid(32);
  const Field a = band_limited_noise(grid, 3, 1e-3, 5);
  CHECK(l2_norm(a) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(std::abs(a.mean()) <= 1e-18);
  CHECK(spectral_support(transform(a), 1e-15) <= 3);
  CHECK((band_limited_noise(grid, 3, 1e-3, 5).values() == a.values()).all());
  CHECK(!(band_limited_noise(grid, 3, 1e-3, 6).values() == a.values()).all());
  CHECK_THROWS_AS(band_limited_noise(grid, 16, 1.0, 1), DomainError);

  const auto forcing = noise_forcing(grid, 2, 0.5, 10);
  CHECK(max_abs_diff(inverse_transform(forcing(3)), band_limited_noise(grid, 2, 0.5, 13)) <=
        1e-16);
}

namespace {

GapExperiment gap_setup(const GridHandle<double>& grid, double perturbation, double forcing_l2,
                        std::int64_t steps) {
  const Field v0 = builtin_initial_data(InitialDataSpec::random_bandlimited(3, 0.4), grid, 7);
  Field v1 = v0;
  if (perturbation > 0) v1.values() += band_limited_noise(grid, 1, perturbation, 1).values();
  GapExperiment ex{SchemeConfig{.kind = SchemeKind::semi_implicit, .tau = 1e-3, .params = kParams},
                   v0, v1, steps, {}};
  if (forcing_l2 > 0) ex.forcing = noise_forcing(grid, 2, forcing_l2, 100);
  return ex;
}

}  // namespace

TEST_CASE("near-solution gap without perturbation is zero") {
  const auto grid = make_grid(32);
  const auto rep = near_solution_gap(gap_setup(grid, 0, 0, 50));
  REQUIRE(rep.gap_sq.size() == 51);
  for (double g : rep.gap_sq) CHECK(g == 0.0);
  CHECK(rep.c1 == 0.0);
  CHECK(rep.dominated);
}

TEST_CASE("near-solution gap requires equal means") {
  const auto grid = make_grid(16);
  auto ex = gap_setup(grid, 1e-6, 0, 5);
  ex.v0_tilde.values() += 1e-6;
  CHECK_THROWS_WITH_AS(near_solution_gap(ex), doctest::Contains("same mean"), DomainError);
}

TEST_CASE("initial gap stays under the envelope") {
  const auto grid = make_grid(32);
  const auto rep = near_solution_gap(gap_setup(grid, 1e-6, 0, 300));
  CHECK(rep.gap_sq.front() == doctest::Approx(1e-12).epsilon(1e-9));
  CHECK(rep.dominated);
  CHECK(rep.c1 < 50);
  for (std::size_t m = 0; m < rep.gap_sq.size(); ++m) {
    CHECK(rep.gap_sq[m] <=
          std::exp(rep.times[m] * rep.c1 / kParams.nu()) * rep.envelope_base[m] * (1 + 1e-12));
  }
}

TEST_CASE("forcing-driven gap: envelope and linear response") {
  const auto grid = make_grid(32);
  const auto full = near_solution_gap(gap_setup(grid, 0, 1e-6, 200));
  const auto half = near_solution_gap(gap_setup(grid, 0, 5e-7, 200));
  CHECK(full.dominated);
  CHECK(half.dominated);
  CHECK(full.c1 < 50);
  CHECK(full.envelope_base.back() > 0);
  const double ratio = std::sqrt(full.gap_sq.back() / half.gap_sq.back());
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 2.5);
  CHECK(std::abs(full.c1 - half.c1) <= 0.1 * std::max(1.0, full.c1));
}
