#include <algorithm>

#include "carinfo/informativeness.hpp"
#include "carinfo/simd/kernels.hpp"
#include "common.hpp"

namespace carinfo {

void CarModelSpec::validate() const {
  if (graph.empty()) throw DomainError("CAR model needs a non-empty adjacency graph");
  for (const auto& p : {sigma2_prior, tau2_prior}) {
    if (!(p.shape > 0.0) || !(p.scale > 0.0)) throw DomainError("inverse-gamma prior parameters must be positive");
  }
  if (m0 < 1) throw DomainError("reference neighbor count m0 must be at least 1");
  if (constraint) {
    if (!(constraint->a0_min >= 0.0)) throw DomainError("a0_min must be non-negative");
    if (!(constraint->a0_min < constraint->a0_max)) throw DomainError("constraint bounds must satisfy a0_min < a0_max");
  }
  if (fixed_sigma2 && !(*fixed_sigma2 > 0.0)) throw DomainError("fixed sigma2 must be positive");
  if (fixed_tau2 && !(*fixed_tau2 > 0.0)) throw DomainError("fixed tau2 must be positive");
  if (fix_spatial_zero && !fixed_tau2) throw DomainError("pinning the spatial effects at zero requires a fixed tau2");
}

namespace {

enum Block : std::size_t { kTheta, kZ, kBeta0, kSigma2, kTau2 };

constexpr double kInitialVariance = 0.1;

class CarModel final : public ChainModel {
 public:
  CarModel(const CountData& data, const CarModelSpec& spec)
      : data_(data),
        spec_(spec),
        count_(static_cast<double>(data.size())),
        theta_(data.size(), 0.0),
        z_(data.size(), 0.0) {
    const auto& g = spec_.graph;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j : g.neighbors(i)) {
        if (j > i) {
          edge_i_.push_back(i);
          edge_j_.push_back(j);
        }
      }
    }
    edge_diff_.resize(edge_i_.size());
    // The intrinsic CAR density has rank I - (number of components).
    car_rank_ = count_ - static_cast<double>(g.component_count());
  }

  std::vector<BlockSpec> blocks() const override {
    const bool guarded = spec_.constraint.has_value();
    std::vector<double> scales(data_.size());
    const double prior_prec = 1.0 / spec_.fixed_sigma2.value_or(kInitialVariance);
    for (std::size_t i = 0; i < data_.size(); ++i) scales[i] = detail::theta_scale(data_.y[i], data_.n[i], prior_prec);
    return {{"theta", data_.size(), 1.0, false, std::move(scales)},
            {"z", 1, 1.0, false},
            {"beta0", 1, 0.1, guarded},
            {"sigma2", 1, 0.3, guarded},
            {"tau2", 1, 0.3, guarded}};
  }

  std::vector<std::string> column_names() const override {
    std::vector<std::string> names{"beta0", "sigma2", "tau2", "a_hat0"};
    for (const auto& id : data_.region_ids) names.push_back(pi_column(id));
    for (const auto& id : data_.region_ids) names.push_back(z_column(id));
    return names;
  }

  void initialize(Rng&) override {
    const double pooled = detail::pooled_logit(data_);
    for (std::size_t i = 0; i < data_.size(); ++i) {
      theta_[i] = detail::empirical_logit(data_.y[i], data_.n[i], pooled);
    }
    std::fill(z_.begin(), z_.end(), 0.0);
    beta0_ = spec_.fixed_beta0.value_or(pooled);
    sigma2_ = spec_.fixed_sigma2.value_or(kInitialVariance);
    tau2_ = spec_.fixed_tau2.value_or(kInitialVariance);

    // Move the variances into the constrained region; a_hat0 falls as they grow.
    if (spec_.constraint) {
      const bool free_var = !spec_.fixed_sigma2 || !spec_.fixed_tau2;
      for (int k = 0; k < 400 && free_var && !admissible(beta0_, sigma2_, tau2_); ++k) {
        const double factor = a_hat0(beta0_, sigma2_, tau2_) >= spec_.constraint->a0_max ? 1.5 : 1.0 / 1.5;
        if (!spec_.fixed_sigma2) sigma2_ *= factor;
        if (!spec_.fixed_tau2) tau2_ *= factor;
      }
      if (!admissible(beta0_, sigma2_, tau2_)) {
        throw ChainError("no admissible initial state satisfies the informativeness constraint");
      }
    }
  }

  bool in_support() const override {
    if (!(sigma2_ > 0.0) || !(tau2_ > 0.0) || !std::isfinite(beta0_)) return false;
    if (spec_.constraint && !admissible(beta0_, sigma2_, tau2_)) return false;
    return std::all_of(theta_.begin(), theta_.end(), [](double t) { return std::isfinite(t); });
  }

  void sweep(SweepContext& ctx) override {
    update_theta(ctx);
    if (!spec_.fix_spatial_zero) update_z(ctx);
    if (!spec_.fixed_beta0) update_beta0(ctx);
    if (!spec_.fixed_sigma2) update_sigma2(ctx);
    if (!spec_.fixed_tau2) update_tau2(ctx);
  }

  void write_draw(std::span<double> row) const override {
    const std::size_t n = data_.size();
    row[0] = beta0_;
    row[1] = sigma2_;
    row[2] = tau2_;
    row[3] = a_hat0(beta0_, sigma2_, tau2_);
    for (std::size_t i = 0; i < n; ++i) row[4 + i] = inv_logit(theta_[i]);
    std::copy(z_.begin(), z_.end(), row.begin() + static_cast<std::ptrdiff_t>(4 + n));
  }

 private:
  double a_hat0(double beta0, double sigma2, double tau2) const {
    return global_informativeness({beta0, sigma2, tau2, spec_.m0}, spec_.m0);
  }

  bool admissible(double beta0, double sigma2, double tau2) const {
    return !spec_.constraint || spec_.constraint->contains(a_hat0(beta0, sigma2, tau2));
  }

  void update_theta(SweepContext& ctx) {
    const double prec = 1.0 / sigma2_;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double centre = beta0_ + z_[i];
      const long long y = data_.y[i], n = data_.n[i];
      auto target = [&](double t) {
        const double d = t - centre;
        return detail::binomial_logit_loglik(t, y, n) - 0.5 * prec * d * d;
      };
      double lp = target(theta_[i]);
      ctx.random_walk(kTheta, i, theta_[i], lp, target);
    }
  }

  // Full conditional of z_i combines theta_i's Normal(beta0 + z_i, sigma2)
  // with the CAR conditional Normal(mean of neighbors, tau2 / m_i).
  void update_z(SweepContext& ctx) {
    const auto& g = spec_.graph;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      double nb = 0.0;
      for (std::size_t j : g.neighbors(i)) nb += z_[j];
      const double m = static_cast<double>(g.neighbor_count(i));
      const double prec = 1.0 / sigma2_ + m / tau2_;
      const double mean = ((theta_[i] - beta0_) / sigma2_ + nb / tau2_) / prec;
      z_[i] = mean + standard_normal(ctx.rng()) / std::sqrt(prec);
    }
    simd::shift(z_, -simd::sum(z_) / count_);
    ctx.record(kZ, true);
  }

  void update_beta0(SweepContext& ctx) {
    const double mean = (simd::sum(theta_) - simd::sum(z_)) / count_;
    const double sd = std::sqrt(sigma2_ / count_);
    auto inside = [&](double b) { return admissible(b, sigma2_, tau2_); };
    if (auto exact = detail::rejection_draw([&] { return normal(ctx.rng(), mean, sd); }, inside)) {
      beta0_ = *exact;
      ctx.record(kBeta0, true);
      return;
    }
    auto target = [&](double b) {
      if (!inside(b)) return -kInf;
      const double d = b - mean;
      return -0.5 * d * d / (sd * sd);
    };
    double lp = target(beta0_);
    ctx.random_walk(kBeta0, 0, beta0_, lp, target);
  }

  // Inverse-gamma full conditional IG(shape, scale), truncated to the
  // constraint set when one is active.
  template <class Inside>
  double draw_variance(SweepContext& ctx, std::size_t block, double current, double shape, double scale, Inside inside) {
    if (auto exact = detail::rejection_draw([&] { return 1.0 / gamma_rate(ctx.rng(), shape, scale); }, inside)) {
      ctx.record(block, true);
      return *exact;
    }
    auto target = [&](double lv) {
      const double v = std::exp(lv);
      if (!inside(v)) return -kInf;
      return -shape * lv - scale / v;  // log density of log(v)
    };
    double lv = std::log(current);
    double lp = target(lv);
    ctx.random_walk(block, 0, lv, lp, target);
    return std::exp(lv);
  }

  void update_sigma2(SweepContext& ctx) {
    const double ss = simd::sum_sq_resid(theta_, z_, beta0_);
    const double shape = spec_.sigma2_prior.shape + 0.5 * count_;
    const double scale = spec_.sigma2_prior.scale + 0.5 * ss;
    sigma2_ = draw_variance(ctx, kSigma2, sigma2_, shape, scale, [&](double v) { return admissible(beta0_, v, tau2_); });
  }

  void update_tau2(SweepContext& ctx) {
    for (std::size_t e = 0; e < edge_i_.size(); ++e) edge_diff_[e] = z_[edge_i_[e]] - z_[edge_j_[e]];
    const double quad = simd::sum_sq_dev(edge_diff_, 0.0);
    const double shape = spec_.tau2_prior.shape + 0.5 * car_rank_;
    const double scale = spec_.tau2_prior.scale + 0.5 * quad;
    tau2_ = draw_variance(ctx, kTau2, tau2_, shape, scale, [&](double v) { return admissible(beta0_, sigma2_, v); });
  }

  const CountData& data_;
  const CarModelSpec& spec_;
  double count_;
  double car_rank_ = 0.0;
  std::vector<double> theta_;
  std::vector<double> z_;
  std::vector<std::size_t> edge_i_, edge_j_;
  std::vector<double> edge_diff_;
  double beta0_ = 0.0;
  double sigma2_ = kInitialVariance;
  double tau2_ = kInitialVariance;
};

}  // namespace

FitResult fit_car(const CountData& data, const CarModelSpec& spec, const ChainConfig& config) {
  data.validate();
  spec.validate();
  if (data.region_ids != spec.graph.region_ids()) {
    throw DomainError("count data regions do not match the adjacency graph (same ids in the same order required)");
  }
  CarModel model(data, spec);
  auto samples = run_chain(model, config);
  auto fit = detail::finish_fit(ModelKind::car, data, std::move(samples), "a_hat0", {"beta0", "sigma2", "tau2", "a_hat0"});
  fit.constraint = spec.constraint;
  fit.m0 = spec.m0;
  return fit;
}

}  // namespace carinfo
