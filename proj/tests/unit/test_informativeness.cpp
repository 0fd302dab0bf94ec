#include <cmath>
#include <random>
#include <vector>

#include "carinfo/informativeness.hpp"
#include "doctest.h"

using namespace carinfo;

namespace {

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

}  // namespace

TEST_SUITE("informativeness") {
  TEST_CASE("conjugate posterior") {
    auto p = beta_posterior(0, 0, {1, 1});
    CHECK(p.a == 1);
    CHECK(p.b == 1);
    p = beta_posterior(70, 594, {2, 3});
    CHECK(p.a == 72);
    CHECK(p.b == 527);
    p = beta_posterior(6, 600, {6, 594});
    CHECK(p.a == 12);
    CHECK(p.b == 1188);
    CHECK(p.mean() == doctest::Approx(0.01).epsilon(1e-14));
    CHECK_THROWS_AS(beta_posterior(7, 6, {1, 1}), DomainError);
    CHECK_THROWS_AS(beta_posterior(-1, 6, {1, 1}), DomainError);
    CHECK_THROWS_AS(beta_posterior(1, -6, {1, 1}), DomainError);
    CHECK_THROWS_AS(beta_posterior(1, 6, {0, 1}), DomainError);
  }

  TEST_CASE("delta-method moments") {
    auto m = delta_moments({0.0, 0.25});
    CHECK(m.mean == 0.5);
    CHECK(m.variance == doctest::Approx(0.015625).epsilon(1e-15));

    m = delta_moments({-4.59512, 0.168067});
    CHECK(m.mean == doctest::Approx(0.0100).epsilon(1e-3));
    CHECK(rel(m.variance, 3564.0 / (600.0 * 600.0 * 601.0)) < 1e-4);

    m = delta_moments({std::log(0.5), 324.0 / 1368.0});
    CHECK(m.mean == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(rel(m.variance, 72.0 / (18.0 * 18.0 * 19.0)) < 1e-12);
  }

  TEST_CASE("beta to logitnormal") {
    auto p = beta_to_logitnormal({6, 594});
    CHECK(p.mu == doctest::Approx(-4.59511985013459).epsilon(1e-12));
    CHECK(rel(p.sigma2, 360000.0 / 2141964.0) < 1e-14);
    p = beta_to_logitnormal({3.5, 3.5});
    CHECK(p.mu == 0.0);
    p = beta_to_logitnormal({6, 12});
    CHECK(p.mu == doctest::Approx(std::log(0.5)).epsilon(1e-15));
    CHECK(rel(p.sigma2, 324.0 / 1368.0) < 1e-14);
  }

  TEST_CASE("logitnormal informativeness") {
    CHECK(std::fabs(logitnormal_informativeness(beta_to_logitnormal({6, 594})) - 6.0) < 1e-10);
    CHECK(logitnormal_informativeness({0, 1}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(logitnormal_informativeness({0, 100}) == doctest::Approx(-0.48).epsilon(1e-14));
  }

  TEST_CASE("logitnormal to beta") {
    const auto b = logitnormal_to_beta(beta_to_logitnormal({6, 594}));
    CHECK(rel(b.a, 6) < 1e-9);
    CHECK(rel(b.b, 594) < 1e-9);
    // mu = 0 with a_hat = k gives (k, k): sigma2 = 2 / (k + 0.5).
    const auto s = logitnormal_to_beta({0.0, 2.0 / 7.5});
    CHECK(rel(s.a, 7.0) < 1e-12);
    CHECK(rel(s.b, 7.0) < 1e-12);
    CHECK_THROWS_AS(logitnormal_to_beta({0, 100}), DomainError);
  }

  TEST_CASE("CAR informativeness bound") {
    CHECK(car_informativeness({0, 0.5, 1, 3}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(car_informativeness({0, 1, 1, 2}) == doctest::Approx(0.5).epsilon(1e-15));
    // tau2 -> 0 and m -> infinity collapse to the independent measure.
    const double limit = car_informativeness({-1.3, 0.4, 1e-12, 1'000'000'000});
    CHECK(rel(limit, logitnormal_informativeness({-1.3, 0.4})) < 1e-8);

    CHECK(global_informativeness({0, 0.5, 1, 3}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(global_informativeness({0.3, 0.2, 0.7, 1}) == global_informativeness({0.3, 0.2, 0.7, 9}));
    CHECK(global_informativeness({0.3, 0.4, 0.7, 1}) < global_informativeness({0.3, 0.2, 0.7, 1}));
    CHECK(global_informativeness({0.3, 0.2, 0.7, 1}, 5) == car_informativeness({0.3, 0.2, 0.7, 5}));
    CHECK_THROWS_AS(car_informativeness({0, 0.5, 1, 0}), DomainError);
    CHECK_THROWS_AS(car_informativeness({0, -0.5, 1, 3}), DomainError);
  }

  TEST_CASE("variance bounds from informativeness bounds") {
    auto b = informativeness_sigma2_bounds(0.0, 0.0, 100.0);
    CHECK(b.sigma2_lo == doctest::Approx(2.0 / 100.5).epsilon(1e-15));
    CHECK(b.sigma2_hi == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_FALSE(b.unbounded_above);
    CHECK(b.gamma_lo() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(b.gamma_hi() == doctest::Approx(50.25).epsilon(1e-15));

    for (double mu : {-9.0, -4.59512, -1.0, 0.0, 2.0, 8.0}) {
      for (double a_hi : {0.5, 6.0, 100.0}) {
        const auto s = informativeness_sigma2_bounds(mu, 0.1, a_hi);
        CHECK(rel(logitnormal_informativeness({mu, s.sigma2_lo}), a_hi) < 1e-9);
        CHECK(rel(logitnormal_informativeness({mu, s.sigma2_hi}), 0.1) < 1e-9);
      }
    }
    b = informativeness_sigma2_bounds(-4.59512, 0.0, 6.0);
    CHECK(rel(b.sigma2_lo, 360000.0 / 2141964.0) < 1e-6);

    // a_lo + p <= 0 cannot happen for a_lo >= 0 except at p -> 0.
    b = informativeness_sigma2_bounds(-800.0, 0.0, 10.0);
    CHECK(b.unbounded_above);
    CHECK(std::isinf(b.sigma2_hi));
    CHECK(b.gamma_lo() == 0.0);
    CHECK_THROWS_AS(informativeness_sigma2_bounds(0.0, 5.0, 5.0), DomainError);
    CHECK_THROWS_AS(informativeness_sigma2_bounds(0.0, -1.0, 5.0), DomainError);
  }

  TEST_CASE("round trip over a log grid") {
    for (double a : log_grid(0.5, 50.0, 50))
      for (double b : log_grid(0.5, 5000.0, 50)) {
        const auto ln = beta_to_logitnormal({a, b});
        REQUIRE(rel(logitnormal_informativeness(ln), a) < 1e-9);
        const auto back = logitnormal_to_beta(ln);
        REQUIRE(rel(back.a, a) < 1e-9);
        REQUIRE(rel(back.b, b) < 1e-9);
      }
  }

  TEST_CASE("moment match is an identity") {
    for (double a : log_grid(0.5, 50.0, 12))
      for (double b : log_grid(0.5, 5000.0, 12)) {
        const BetaParams p{a, b};
        const auto m = delta_moments(beta_to_logitnormal(p));
        CHECK(rel(m.mean, p.mean()) < 1e-12);
        CHECK(rel(m.variance, p.variance()) < 1e-12);
      }
  }

  TEST_CASE("monotonicity") {
    for (double mu : {-5.0, 0.0, 3.0}) {
      double prev = INFINITY;
      for (double s2 = 0.01; s2 < 20; s2 *= 1.3) {
        const double a = logitnormal_informativeness({mu, s2});
        CHECK(a < prev);
        prev = a;
      }
    }
    double prev_s = INFINITY, prev_t = INFINITY;
    for (double v = 0.01; v < 20; v *= 1.3) {
      const double as = car_informativeness({-2.0, v, 0.5, 4});
      const double at = car_informativeness({-2.0, 0.5, v, 4});
      CHECK(as < prev_s);
      CHECK(at < prev_t);
      prev_s = as;
      prev_t = at;
    }
  }

  TEST_CASE("large |mu| stays finite") {
    for (double mu : {-700.0, -40.0, 40.0, 700.0}) {
      const auto m = delta_moments({mu, 1.0});
      CHECK(std::isfinite(m.mean));
      CHECK(std::isfinite(m.variance));
      CHECK(std::isfinite(car_informativeness({mu, 1.0, 1.0, 3})));
    }
    CHECK(inv_logit(-800.0) >= 0.0);
    CHECK(inv_logit(800.0) == 1.0);
    CHECK(logitnormal_informativeness({40.0, 1.0}) == doctest::Approx(std::exp(40.0)).epsilon(1e-12));
  }

  TEST_CASE("delta-method mean against Monte Carlo") {
    // Oracle: 10^7 logitnormal draws per setting. Slack 0.12 relative is the
    // largest gap between the delta mean and the exact logitnormal mean over
    // a in [4, 50], b in [4, 5000] (reached at a = 4, b = 5000) found by
    // quadrature, rounded up.
    std::mt19937_64 rng(20240915);
    std::normal_distribution<double> z(0.0, 1.0);
    const BetaParams settings[] = {{4, 5000}, {6, 594}, {6, 12}, {20, 20}, {50, 500}};
    for (const auto& prior : settings) {
      CAPTURE(prior.a);
      CAPTURE(prior.b);
      const auto p = beta_to_logitnormal(prior);
      const double sd = std::sqrt(p.sigma2);
      const int draws = 10'000'000;
      double s = 0, s2 = 0;
      for (int i = 0; i < draws; ++i) {
        const double v = inv_logit(p.mu + sd * z(rng));
        s += v;
        s2 += v * v;
      }
      const double mean = s / draws;
      const double se = std::sqrt((s2 / draws - mean * mean) / draws);
      const double delta = delta_moments(p).mean;
      CHECK(std::fabs(delta - mean) <= 3 * se + 0.12 * mean);
    }
  }
}
