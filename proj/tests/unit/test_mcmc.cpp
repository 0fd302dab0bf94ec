#include <cmath>
#include <random>
#include <vector>

#include "carinfo/diagnostics.hpp"
#include "carinfo/mcmc.hpp"
#include "carinfo/random.hpp"
#include "carinfo/sample_stats.hpp"
#include "doctest.h"

using namespace carinfo;

namespace {

// x ~ Normal(mean, sd) by random-walk Metropolis.
class NormalToy : public ChainModel {
 public:
  NormalToy(double mean, double sd) : mean_(mean), sd_(sd) {}
  std::vector<BlockSpec> blocks() const override { return {{"x", 1, 0.1}}; }
  std::vector<std::string> column_names() const override { return {"x", "scale"}; }
  void initialize(Rng&) override { x_ = mean_ + 10 * sd_; }
  bool in_support() const override { return std::isfinite(x_); }
  void sweep(SweepContext& ctx) override {
    auto target = [&](double v) { return -0.5 * (v - mean_) * (v - mean_) / (sd_ * sd_); };
    double lp = target(x_);
    ctx.random_walk(0, 0, x_, lp, target);
    scale_ = ctx.scale(0);
  }
  void write_draw(std::span<double> row) const override {
    row[0] = x_;
    row[1] = scale_;
  }

 private:
  double mean_, sd_;
  double x_ = 0, scale_ = 0;
};

// Goes non-finite at a chosen iteration.
class Exploding : public ChainModel {
 public:
  std::vector<BlockSpec> blocks() const override { return {{"x"}}; }
  std::vector<std::string> column_names() const override { return {"x"}; }
  void initialize(Rng&) override {}
  bool in_support() const override { return true; }
  void sweep(SweepContext& ctx) override {
    double x = 0;
    double lp = 0;
    auto target = [&](double) { return ctx.iteration() >= 37 ? NAN : 0.0; };
    ctx.random_walk(0, 0, x, lp, target);
  }
  void write_draw(std::span<double> row) const override { row[0] = 0; }
};

class BadStart : public ChainModel {
 public:
  std::vector<BlockSpec> blocks() const override { return {{"x"}}; }
  std::vector<std::string> column_names() const override { return {"x"}; }
  void initialize(Rng&) override {}
  bool in_support() const override { return false; }
  void sweep(SweepContext&) override {}
  void write_draw(std::span<double> row) const override { row[0] = 0; }
};

// A constrained block whose support is empty apart from the start point.
class Stuck : public ChainModel {
 public:
  std::vector<BlockSpec> blocks() const override { return {{"v", 1, 1.0, true}}; }
  std::vector<std::string> column_names() const override { return {"v"}; }
  void initialize(Rng&) override {}
  bool in_support() const override { return true; }
  void sweep(SweepContext& ctx) override {
    double lp = 0;
    ctx.random_walk(0, 0, v_, lp, [&](double v) { return v == v_ ? 0.0 : -kInf; });
  }
  void write_draw(std::span<double> row) const override { row[0] = v_; }

 private:
  double v_ = 0;
};

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(n);
  double v = z(rng) / std::sqrt(1 - phi * phi);
  for (auto& e : x) {
    v = phi * v + z(rng);
    e = v;
  }
  return x;
}

}  // namespace

TEST_SUITE("mcmc-engine") {
  TEST_CASE("default schedule retains 5000 draws") {
    ChainConfig c;
    CHECK(c.iterations == 20000);
    CHECK(c.burn_in == 5000);
    CHECK(c.thin == 3);
    CHECK(c.retained() == 5000);
    NormalToy toy(0, 1);
    const auto s = run_chain(toy, c);
    CHECK(s.rows() == 5000);
    CHECK(s.cols() == 2);

    ChainConfig odd{1000, 100, 7};
    NormalToy toy2(0, 1);
    CHECK(run_chain(toy2, odd).rows() == (1000 - 100) / 7);
  }

  TEST_CASE("invalid schedules are rejected") {
    CHECK_THROWS_AS((ChainConfig{100, 100, 1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChainConfig{100, 10, 0}.validate()), std::invalid_argument);
    ChainConfig c{100, 10, 1};
    c.adapt_window = 50;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }

  TEST_CASE("normal toy target is calibrated") {
    NormalToy toy(3.0, 2.0);
    ChainConfig c;
    c.seed = 99;
    const auto s = run_chain(toy, c);
    const auto x = s.column("x");
    const auto ess = effective_sample_size(x).value;
    CHECK(std::fabs(sample_mean(x) - 3.0) < 3 * 2.0 / std::sqrt(ess));
    CHECK(sample_sd(x) == doctest::Approx(2.0).epsilon(0.1));
    REQUIRE(s.acceptance.size() == 1);
    CHECK(s.acceptance[0].rate() == doctest::Approx(0.44).epsilon(0.15));
  }

  TEST_CASE("same seed, same draws; different seed, different draws") {
    NormalToy a(0, 1), b(0, 1), c(0, 1);
    ChainConfig cfg{3000, 1000, 2, 5};
    const auto sa = run_chain(a, cfg);
    const auto sb = run_chain(b, cfg);
    CHECK(sa == sb);
    cfg.seed = 6;
    CHECK_FALSE(run_chain(c, cfg) == sa);
    NormalToy d(0, 1);
    cfg.seed = 5;
    cfg.stream = 1;
    CHECK_FALSE(run_chain(d, cfg) == sa);
  }

  TEST_CASE("proposal scales are frozen after adaptation") {
    NormalToy toy(0, 1);
    const auto s = run_chain(toy, ChainConfig{4000, 1000, 1, 3});
    const auto sc = s.column("scale");
    for (double v : sc) REQUIRE(v == sc.front());
  }

  TEST_CASE("failure modes") {
    Exploding e;
    try {
      run_chain(e, ChainConfig{100, 10, 1});
      FAIL("expected ChainError");
    } catch (const ChainError& err) {
      CHECK(std::string(err.what()).find("iteration 37") != std::string::npos);
    }
    BadStart b;
    CHECK_THROWS_AS(run_chain(b, ChainConfig{100, 10, 1}), ChainError);
    Stuck s;
    try {
      run_chain(s, ChainConfig{100, 20, 1});
      FAIL("expected ChainError");
    } catch (const ChainError& err) {
      CHECK(std::string(err.what()).find("constrained support appears empty") != std::string::npos);
    }
  }

  TEST_CASE("effective sample size") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> white(20000);
    for (auto& v : white) v = z(rng);
    const auto w = effective_sample_size(white);
    CHECK_FALSE(w.degenerate);
    CHECK(w.value <= 20000.0);
    CHECK(std::fabs(w.value - 20000.0) / 20000.0 < 0.15);

    const auto x = ar1(20000, 0.9, 2);
    const double expected = 20000.0 * 0.1 / 1.9;
    CHECK(std::fabs(effective_sample_size(x).value - expected) / expected < 0.25);
    CHECK(integrated_autocorrelation_time(x) == doctest::Approx(19.0).epsilon(0.25));

    const std::vector<double> constant(50, 4.2);
    const auto c = effective_sample_size(constant);
    CHECK(c.degenerate);
    CHECK(c.value == 50.0);
    CHECK_THROWS_AS(effective_sample_size(std::vector<double>(9, 1.0)), std::invalid_argument);
  }

  TEST_CASE("Geweke z-scores") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(0.0, 1.0);
    int exceed = 0;
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> w(2000);
      for (auto& v : w) v = z(rng);
      if (std::fabs(geweke(w)) >= 3) ++exceed;
    }
    CHECK(exceed <= 3);

    std::vector<double> trend(2000);
    for (std::size_t i = 0; i < trend.size(); ++i) trend[i] = 5.0 * static_cast<double>(i) / 2000.0 + z(rng);
    CHECK(std::fabs(geweke(trend)) > 3);

    CHECK_THROWS_AS(geweke(std::vector<double>(50, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(geweke(ar1(1000, 0.1, 4), 0.6, 0.5), std::invalid_argument);
  }

  TEST_CASE("diagnostics summarize every column") {
    NormalToy toy(0, 1);
    const auto s = run_chain(toy, ChainConfig{3000, 1000, 1});
    const auto d = diagnose(s, {"x"});
    REQUIRE(d.parameters.size() == 1);
    CHECK(d.parameters[0].ess > 0);
    CHECK(d.parameters[0].ess <= 2000);
    CHECK(std::isfinite(d.parameters[0].geweke_z));
    for (const auto& a : d.acceptance) {
      CHECK(a.rate() >= 0.0);
      CHECK(a.rate() <= 1.0);
    }
  }

  TEST_CASE("seed derivation and variates") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    auto rng = make_rng(7, {1});
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double v = beta(rng, 6, 594);
      REQUIRE(v > 0.0);
      REQUIRE(v < 1.0);
      s += v;
      s2 += v * v;
    }
    const double mean = s / n;
    CHECK(mean == doctest::Approx(0.01).epsilon(0.01));
    CHECK((s2 / n - mean * mean) == doctest::Approx(1.6472545757e-5).epsilon(0.03));
    // Tiny shapes stay strictly inside (0, 1).
    for (int i = 0; i < 10000; ++i) {
      const double v = beta(rng, 0.01, 0.01);
      REQUIRE(v > 0.0);
      REQUIRE(v < 1.0);
    }
  }
}
