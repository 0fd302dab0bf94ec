#include <algorithm>

#include "carinfo/informativeness.hpp"
#include "carinfo/simd/kernels.hpp"
#include "common.hpp"

namespace carinfo {
namespace {

enum Block : std::size_t { kTheta, kMu, kGamma };

class LogitNormalModel final : public ChainModel {
 public:
  LogitNormalModel(const CountData& data, const LogitNormalOptions& options)
      : data_(data), opt_(options), theta_(data.size(), 0.0) {}

  std::vector<BlockSpec> blocks() const override {
    std::vector<double> scales(data_.size());
    const double prior_prec = opt_.fixed_prior ? 1.0 / opt_.fixed_prior->sigma2 : 1.0;
    for (std::size_t i = 0; i < data_.size(); ++i) scales[i] = detail::theta_scale(data_.y[i], data_.n[i], prior_prec);
    return {{"theta", data_.size(), 1.0, false, std::move(scales)}, {"mu", 1, 0.2, false}, {"gamma", 1, 0.3, false}};
  }

  std::vector<std::string> column_names() const override {
    std::vector<std::string> names{"mu", "gamma", "sigma2", "pi0", "a_hat"};
    for (const auto& id : data_.region_ids) names.push_back(pi_column(id));
    return names;
  }

  void initialize(Rng&) override {
    const double pooled = detail::pooled_logit(data_);
    for (std::size_t i = 0; i < data_.size(); ++i) {
      theta_[i] = detail::empirical_logit(data_.y[i], data_.n[i], pooled);
    }
    if (opt_.fixed_prior) {
      mu_ = opt_.fixed_prior->mu;
      gamma_ = 1.0 / opt_.fixed_prior->sigma2;
      return;
    }
    mu_ = std::clamp(pooled, opt_.mu_lo + 0.1, opt_.mu_hi - 0.1);
    const double ss = simd::sum_sq_dev(theta_, mu_);
    const double spread = data_.size() > 1 ? ss / static_cast<double>(data_.size() - 1) : 1.0;
    gamma_ = 1.0 / std::max(spread, 1e-3);
    const auto [lo, hi] = gamma_bounds(mu_);
    if (!(gamma_ > lo && gamma_ < hi)) gamma_ = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo + 1.0;
  }

  bool in_support() const override {
    for (double t : theta_) {
      if (!std::isfinite(t)) return false;
    }
    if (opt_.fixed_prior) return true;
    if (!(mu_ > opt_.mu_lo && mu_ < opt_.mu_hi)) return false;
    const double a_hat = logitnormal_informativeness({mu_, 1.0 / gamma_});
    return a_hat > opt_.a_lo && a_hat < opt_.a_hi;
  }

  void sweep(SweepContext& ctx) override {
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const long long y = data_.y[i], n = data_.n[i];
      auto target = [&](double t) {
        const double d = t - mu_;
        return detail::binomial_logit_loglik(t, y, n) - 0.5 * gamma_ * d * d;
      };
      double lp = target(theta_[i]);
      ctx.random_walk(kTheta, i, theta_[i], lp, target);
    }
    if (opt_.fixed_prior) return;

    const auto count = static_cast<double>(data_.size());
    const double mean = simd::sum(theta_) / count;
    const double ss_mean = simd::sum_sq_dev(theta_, mean);

    // mu: Normal likelihood times the uniform prior on gamma, whose range
    // moves with mu.
    auto mu_target = [&](double m) {
      if (!(m > opt_.mu_lo && m < opt_.mu_hi)) return -kInf;
      const auto [lo, hi] = gamma_bounds(m);
      if (!(gamma_ > lo && gamma_ < hi)) return -kInf;
      const double ss = ss_mean + count * (m - mean) * (m - mean);
      return -0.5 * gamma_ * ss - std::log(hi - lo);
    };
    double lp_mu = mu_target(mu_);
    ctx.random_walk(kMu, 0, mu_, lp_mu, mu_target);

    // gamma: Gamma(count/2 + 1, ss/2) truncated to the informativeness range.
    const double ss = simd::sum_sq_dev(theta_, mu_);
    const double shape = 0.5 * count + 1.0;
    const double rate = 0.5 * ss;
    const auto [lo, hi] = gamma_bounds(mu_);
    auto inside = [&](double g) { return g > lo && g < hi; };
    auto exact = detail::rejection_draw([&] { return gamma_rate(ctx.rng(), shape, rate); }, inside);
    if (exact) {
      gamma_ = *exact;
      ctx.record(kGamma, true);
    } else {
      auto log_target = [&](double lg) {
        const double g = std::exp(lg);
        if (!inside(g)) return -kInf;
        return shape * lg - rate * g;  // includes the log-scale Jacobian
      };
      double lg = std::log(gamma_);
      double lp = log_target(lg);
      ctx.random_walk(kGamma, 0, lg, lp, log_target);
      gamma_ = std::exp(lg);
    }
  }

  void write_draw(std::span<double> row) const override {
    const LogitNormalParams p{mu_, 1.0 / gamma_};
    row[0] = mu_;
    row[1] = gamma_;
    row[2] = p.sigma2;
    row[3] = inv_logit(mu_);
    row[4] = logitnormal_informativeness(p);
    for (std::size_t i = 0; i < theta_.size(); ++i) row[5 + i] = inv_logit(theta_[i]);
  }

 private:
  std::pair<double, double> gamma_bounds(double mu) const {
    const auto b = informativeness_sigma2_bounds(mu, opt_.a_lo, opt_.a_hi);
    return {b.gamma_lo(), b.gamma_hi()};
  }

  const CountData& data_;
  LogitNormalOptions opt_;
  std::vector<double> theta_;
  double mu_ = 0.0;
  double gamma_ = 1.0;
};

}  // namespace

FitResult fit_logitnormal(const CountData& data, const ChainConfig& config, const LogitNormalOptions& options) {
  data.validate();
  if (data.size() == 0) throw DomainError("logitnormal fit needs at least one region");
  if (options.fixed_prior) {
    validate(*options.fixed_prior);
  } else {
    if (!(options.a_lo >= 0.0 && options.a_lo < options.a_hi)) {
      throw DomainError("informativeness support is empty: need 0 <= a_lo < a_hi");
    }
    if (!(options.mu_lo < options.mu_hi)) throw DomainError("mu prior range is empty");
  }
  LogitNormalModel model(data, options);
  auto samples = run_chain(model, config);
  return detail::finish_fit(ModelKind::logitnormal, data, std::move(samples), "a_hat",
                            {"mu", "gamma", "pi0", "a_hat"});
}

}  // namespace carinfo
