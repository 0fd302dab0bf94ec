#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>

#include "carinfo/informativeness.hpp"
#include "common.hpp"

namespace carinfo {
namespace {

constexpr double kMaxA = 100.0;

double lgam(double x) { return boost::math::lgamma(x); }

class BetaBinomialModel final : public ChainModel {
 public:
  BetaBinomialModel(const CountData& data, const BetaBinomialOptions& options)
      : data_(data), fixed_(options.fixed_prior), pi_(data.size(), 0.5) {}

  std::vector<BlockSpec> blocks() const override {
    return {{"a", 1, 0.5, false}, {"pi0", 1, 0.3, false}, {"pi", 1, 1.0, false}};
  }

  std::vector<std::string> column_names() const override {
    std::vector<std::string> names{"a", "b", "pi0"};
    for (const auto& id : data_.region_ids) names.push_back(pi_column(id));
    return names;
  }

  void initialize(Rng&) override {
    if (fixed_) {
      a_ = fixed_->a;
      pi0_ = fixed_->mean();
    } else {
      a_ = 10.0;
      const double pooled = static_cast<double>(data_.total_events()) / static_cast<double>(data_.total_trials());
      pi0_ = std::clamp(pooled, 1e-3, 1.0 - 1e-3);
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      pi_[i] = (static_cast<double>(data_.y[i]) + 0.5) / (static_cast<double>(data_.n[i]) + 1.0);
    }
    log_post_ = fixed_ ? 0.0 : log_target(a_, pi0_);
  }

  bool in_support() const override {
    if (!(pi0_ > 0.0 && pi0_ < 1.0)) return false;
    if (!fixed_ && !(a_ > 0.0 && a_ < kMaxA)) return false;
    return std::all_of(pi_.begin(), pi_.end(), [](double p) { return p > 0.0 && p < 1.0; });
  }

  void sweep(SweepContext& ctx) override {
    if (!fixed_) {
      // (a, pi0) with the region rates integrated out; uniform priors become
      // logistic Jacobians on the unbounded scales.
      double u = logit(a_ / kMaxA);
      ctx.random_walk(0, 0, u, log_post_, [&](double v) { return log_target(kMaxA * inv_logit(v), pi0_); });
      a_ = kMaxA * inv_logit(u);
      double w = logit(pi0_);
      ctx.random_walk(1, 0, w, log_post_, [&](double v) { return log_target(a_, inv_logit(v)); });
      pi0_ = inv_logit(w);
    }
    // Region rates only feed the output, so they are drawn when recorded.
    if (ctx.retaining()) {
      const double b = b_of(a_, pi0_);
      for (std::size_t i = 0; i < data_.size(); ++i) {
        const auto post = beta_posterior(data_.y[i], data_.n[i], {a_, b});
        pi_[i] = beta(ctx.rng(), post.a, post.b);
      }
      ctx.record(2, true);
    }
  }

  void write_draw(std::span<double> row) const override {
    row[0] = a_;
    row[1] = b_of(a_, pi0_);
    row[2] = pi0_;
    std::copy(pi_.begin(), pi_.end(), row.begin() + 3);
  }

 private:
  double b_of(double a, double pi0) const {
    if (fixed_) return fixed_->b;
    return a * (1.0 - pi0) / pi0;
  }

  // log p(y | a, b) + log|d(a, pi0)/d(u, w)|
  double log_target(double a, double pi0) const {
    if (!(a > 0.0 && a < kMaxA) || !(pi0 > 0.0 && pi0 < 1.0)) return -kInf;
    const double b = b_of(a, pi0);
    double ll = 0.0;
    std::size_t informative = 0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto n = static_cast<double>(data_.n[i]);
      if (data_.n[i] == 0) continue;
      const auto y = static_cast<double>(data_.y[i]);
      ll += lgam(y + a) + lgam(n - y + b) - lgam(n + a + b);
      ++informative;
    }
    ll += static_cast<double>(informative) * (lgam(a + b) - lgam(a) - lgam(b));
    const double jac = std::log(a) + std::log1p(-a / kMaxA) + std::log(pi0) + std::log1p(-pi0);
    return ll + jac;
  }

  const CountData& data_;
  std::optional<BetaParams> fixed_;
  double a_ = 10.0;
  double pi0_ = 0.5;
  double log_post_ = 0.0;
  std::vector<double> pi_;
};

}  // namespace

FitResult fit_beta_binomial(const CountData& data, const ChainConfig& config, const BetaBinomialOptions& options) {
  data.validate();
  if (options.fixed_prior) {
    validate(*options.fixed_prior);
    if (data.size() < 1) throw DomainError("beta-binomial fit needs at least one region");
  } else {
    if (data.size() < 2) throw DomainError("hierarchical beta-binomial fit needs at least two regions");
    if (data.total_trials() == 0) throw DomainError("all trial counts are zero; the data carry no information");
  }
  BetaBinomialModel model(data, options);
  auto samples = run_chain(model, config);
  return detail::finish_fit(ModelKind::beta_binomial, data, std::move(samples), "a", {"a", "b", "pi0"});
}

}  // namespace carinfo
