#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/beta.hpp>

#include "carinfo/diagnostics.hpp"
#include "carinfo/models.hpp"
#include "carinfo/sample_stats.hpp"
#include "carinfo/simulation.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace carinfo;

namespace {

CountData single(long long y, long long n) { return CountData{{"R1"}, {n}, {y}, "all"}; }

double ks_distance(std::vector<double> x, const boost::math::beta_distribution<>& d) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = boost::math::cdf(d, x[i]);
    worst = std::max({worst, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return worst;
}

double mc_se(const std::vector<double>& x) {
  return sample_sd(x) / std::sqrt(effective_sample_size(x).value);
}

const ChainConfig kShort{6000, 2000, 2, 11};

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("count data validation") {
    CHECK_NOTHROW(single(3, 5).validate());
    CHECK_THROWS_AS(single(6, 5).validate(), DomainError);
    CHECK_THROWS_AS(single(-1, 5).validate(), DomainError);
    CountData bad{{"A", "B"}, {1}, {0, 0}, "s"};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK(CountData{{"A", "B"}, {10, 5}, {1, 2}, "s"}.total_events() == 3);
  }

  TEST_CASE("beta-binomial with a fixed prior matches the conjugate posterior") {
    // Kolmogorov-Smirnov threshold fixed in advance: the 1% critical value
    // 1.63 / sqrt(n) at n = 5000 draws.
    for (const BetaParams prior : {BetaParams{6, 594}, BetaParams{6, 12}}) {
      const long long y = 3, n = 40;
      BetaBinomialOptions opt;
      opt.fixed_prior = prior;
      const auto fit = fit_beta_binomial(single(y, n), ChainConfig{}, opt);
      REQUIRE(fit.draws() == 5000);
      const auto pi = fit.pi_draws(0);
      const auto post = beta_posterior(y, n, prior);
      const double se = mc_se(pi);
      CHECK(std::fabs(sample_mean(pi) - post.mean()) < 3 * se);
      // Standard error of the sample variance from the fourth central moment.
      const double m = sample_mean(pi);
      double m2 = 0, m4 = 0;
      for (double v : pi) {
        const double d = (v - m) * (v - m);
        m2 += d;
        m4 += d * d;
      }
      m2 /= static_cast<double>(pi.size());
      m4 /= static_cast<double>(pi.size());
      const double var_se = std::sqrt((m4 - m2 * m2) / effective_sample_size(pi).value);
      CHECK(std::fabs(m2 - post.variance()) < 3 * var_se);
      CHECK(ks_distance(pi, boost::math::beta_distribution<>(post.a, post.b)) < 1.63 / std::sqrt(5000.0));
    }
  }

  TEST_CASE("beta-binomial hierarchy") {
    const auto data = generate_dataset(100, 12, 0.1, 4);
    const auto fit = fit_beta_binomial(data, kShort);
    CHECK(fit.informativeness_column == "a");
    const auto a = fit.informativeness_draws();
    for (double v : a) REQUIRE((v > 0 && v < 100));
    const auto pi0 = fit.samples.column("pi0");
    CHECK(sample_mean(pi0) == doctest::Approx(0.1).epsilon(0.15));
    for (std::size_t i = 0; i < fit.regions(); ++i)
      for (double v : fit.pi_draws(i)) REQUIRE((v > 0 && v < 1));

    CHECK_THROWS_AS(fit_beta_binomial(single(1, 10), kShort), DomainError);
    CHECK_THROWS_AS(fit_beta_binomial(CountData{{"A", "B"}, {0, 0}, {0, 0}, "s"}, kShort), DomainError);
  }

  TEST_CASE("logitnormal draws respect the informativeness bounds") {
    const auto data = generate_dataset(60, 8, 0.2, 5);
    const auto fit = fit_logitnormal(data, kShort);
    CHECK(fit.informativeness_column == "a_hat");
    for (double v : fit.informativeness_draws()) REQUIRE((v > 0 && v < 100));
    for (double v : fit.samples.column("mu")) REQUIRE((v > -10 && v < 10));

    LogitNormalOptions narrow;
    narrow.a_lo = 2;
    narrow.a_hi = 6;
    const auto f2 = fit_logitnormal(data, kShort, narrow);
    for (double v : f2.informativeness_draws()) REQUIRE((v > 2 && v < 6));
    const auto mu = f2.samples.column("mu");
    const auto gamma = f2.samples.column("gamma");
    for (std::size_t r = 0; r < mu.size(); ++r)
      REQUIRE(logitnormal_informativeness({mu[r], 1.0 / gamma[r]}) == doctest::Approx(f2.informativeness_draws()[r]));
  }

  TEST_CASE("logitnormal with a fixed prior and no data returns the prior") {
    LogitNormalOptions opt;
    opt.fixed_prior = LogitNormalParams{-1.0, 0.5};
    const auto fit = fit_logitnormal(single(0, 0), ChainConfig{40000, 5000, 5, 2}, opt);
    std::vector<double> theta;
    for (double p : fit.pi_draws(0)) theta.push_back(logit(p));
    CHECK(std::fabs(sample_mean(theta) + 1.0) < 4 * mc_se(theta));
    CHECK(sample_sd(theta) == doctest::Approx(std::sqrt(0.5)).epsilon(0.05));
  }

  TEST_CASE("CAR: sum-to-zero, columns and a_hat0 consistency") {
    const auto g = fixtures::pa_graph();
    const auto a = fixtures::armstrong(g);
    const auto fit = fit_car(a.data, CarModelSpec{.graph = g}, kShort);
    CHECK(fit.informativeness_column == "a_hat0");
    const auto& s = fit.samples;
    std::vector<std::size_t> zc;
    for (const auto& id : g.region_ids()) zc.push_back(s.index(z_column(id)));
    for (std::size_t r = 0; r < s.rows(); ++r) {
      double sum = 0;
      for (auto c : zc) sum += s.at(r, c);
      REQUIRE(std::fabs(sum) < 1e-8);
      const double b0 = s.at(r, s.index("beta0"));
      const double s2 = s.at(r, s.index("sigma2"));
      const double t2 = s.at(r, s.index("tau2"));
      REQUIRE(s.at(r, s.index("a_hat0")) == global_informativeness({b0, s2, t2, 1}));
    }
    CHECK(fit.diagnostics.parameters.size() >= 4);
  }

  TEST_CASE("CAR constraint is exact") {
    const auto g = fixtures::pa_graph();
    const auto data = fixtures::strong_spatial(g);
    for (const auto c : {InformativenessConstraint{0, 5}, InformativenessConstraint{8, 12}}) {
      CarModelSpec spec{.graph = g};
      spec.constraint = c;
      const auto fit = fit_car(data, spec, kShort);
      for (double v : fit.informativeness_draws()) REQUIRE(c.contains(v));
      const auto sum = posterior_informativeness(fit);
      CHECK(sum.q975 < c.a0_max);
      CHECK(sum.q025 > c.a0_min);
    }
  }

  TEST_CASE("CAR with an infeasible constraint fails with an explanation") {
    const auto g = fixtures::pa_graph();
    const auto data = fixtures::strong_spatial(g);
    CarModelSpec spec{.graph = g};
    spec.fixed_beta0 = 0.0;
    spec.fixed_sigma2 = 1.0;
    spec.fixed_tau2 = 1.0;
    spec.constraint = InformativenessConstraint{0, 0.5};
    CHECK_THROWS_AS(fit_car(data, spec, kShort), ChainError);
  }

  TEST_CASE("CAR rejects graph/data mismatch and bad specs") {
    const auto g = fixtures::pa_graph();
    auto data = fixtures::strong_spatial(g);
    std::swap(data.region_ids[0], data.region_ids[1]);
    CHECK_THROWS(fit_car(data, CarModelSpec{.graph = g}, kShort));
    data = fixtures::strong_spatial(g);
    data.region_ids.pop_back();
    data.n.pop_back();
    data.y.pop_back();
    CHECK_THROWS(fit_car(data, CarModelSpec{.graph = g}, kShort));
    CarModelSpec bad{.graph = g};
    bad.constraint = InformativenessConstraint{5, 5};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.constraint.reset();
    bad.fix_spatial_zero = true;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }

  TEST_CASE("CAR with large fixed variances is close to a flat prior") {
    const auto g = fixtures::pa_graph();
    CountData data = fixtures::strong_spatial(g);
    const std::size_t k = 10;
    data.n[k] = 1000;
    data.y[k] = 500;
    CarModelSpec spec{.graph = g};
    spec.fixed_sigma2 = 100.0;
    spec.fixed_tau2 = 100.0;
    const auto fit = fit_car(data, spec, kShort);
    CHECK(std::fabs(sample_mean(fit.pi_draws(k)) - 0.5) < 0.01);
  }

  TEST_CASE("CAR with the spatial term removed nests the logitnormal model") {
    const auto g = fixtures::pa_graph();
    const auto data = fixtures::strong_spatial(g);
    const LogitNormalParams prior{-2.0, 0.3};

    CarModelSpec spec{.graph = g};
    spec.fixed_beta0 = prior.mu;
    spec.fixed_sigma2 = prior.sigma2;
    spec.fixed_tau2 = 1e-10;
    spec.fix_spatial_zero = true;
    const auto car = fit_car(data, spec, ChainConfig{20000, 5000, 3, 21});

    LogitNormalOptions opt;
    opt.fixed_prior = prior;
    const auto ln = fit_logitnormal(data, ChainConfig{20000, 5000, 3, 22}, opt);

    int outside = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto a = car.pi_draws(i);
      const auto b = ln.pi_draws(i);
      const double se = std::hypot(mc_se(a), mc_se(b));
      if (std::fabs(sample_mean(a) - sample_mean(b)) > 4 * se) ++outside;
    }
    CHECK(outside <= 1);
  }

  TEST_CASE("posterior informativeness summary") {
    FitResult fit;
    fit.samples = PosteriorSamples({"a"}, 4);
    for (std::size_t r = 0; r < 4; ++r) fit.samples.at(r, 0) = 2.5;
    fit.informativeness_column = "a";
    const auto s = posterior_informativeness(fit);
    CHECK(s.mean == 2.5);
    CHECK(s.median == 2.5);
    CHECK(s.q025 == 2.5);
    CHECK(s.q975 == 2.5);
  }

  TEST_CASE("fits are reproducible") {
    const auto data = generate_dataset(30, 8, 0.2, 8);
    CHECK(fit_beta_binomial(data, kShort).samples == fit_beta_binomial(data, kShort).samples);
    CHECK(fit_logitnormal(data, kShort).samples == fit_logitnormal(data, kShort).samples);
  }
}
