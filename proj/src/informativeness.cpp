#include "carinfo/informativeness.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace carinfo {
namespace {

// Beyond this |x|, e^x is handled in a form that cannot overflow early.
constexpr double kExpGuard = 30.0;

}  // namespace

double inv_logit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double one_plus_exp(double x) {
  if (x > kExpGuard) return std::exp(x) * (1.0 + std::exp(-x));
  return 1.0 + std::exp(x);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

void validate(const BetaParams& p) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b)) {
    throw DomainError("beta parameters must be finite and positive");
  }
}

void validate(const LogitNormalParams& p) {
  if (!std::isfinite(p.mu)) throw DomainError("logitnormal location must be finite");
  if (!(p.sigma2 > 0.0) || !std::isfinite(p.sigma2)) throw DomainError("logitnormal variance must be finite and positive");
}

void validate(const CarHyperState& h) {
  if (!std::isfinite(h.xbeta)) throw DomainError("linear predictor must be finite");
  if (!(h.sigma2 > 0.0) || !(h.tau2 > 0.0)) throw DomainError("CAR variances must be positive");
  if (h.m < 1) throw DomainError("neighbor count must be at least 1");
}

BetaParams beta_posterior(long long y, long long n, const BetaParams& prior) {
  validate(prior);
  if (y < 0 || n < 0) throw DomainError("counts must be non-negative");
  if (y > n) throw DomainError("event count " + std::to_string(y) + " exceeds trial count " + std::to_string(n));
  return {static_cast<double>(y) + prior.a, static_cast<double>(n - y) + prior.b};
}

Moments delta_moments(const LogitNormalParams& p) {
  validate(p);
  const double mean = inv_logit(p.mu);
  // h'(mu) = e^mu / (1 + e^mu)^2 = h(mu) (1 - h(mu))
  const double slope = mean * inv_logit(-p.mu);
  return {mean, p.sigma2 * slope * slope};
}

LogitNormalParams beta_to_logitnormal(const BetaParams& prior) {
  validate(prior);
  const double a = prior.a, b = prior.b, s = a + b;
  return {std::log(a) - std::log(b), s * s / (a * b * (s + 1.0))};
}

double logitnormal_informativeness(const LogitNormalParams& p) {
  validate(p);
  return one_plus_exp(p.mu) / p.sigma2 - inv_logit(p.mu);
}

BetaParams logitnormal_to_beta(const LogitNormalParams& p) {
  const double a_hat = logitnormal_informativeness(p);
  if (!(a_hat > 0.0)) {
    throw DomainError("logitnormal prior is too diffuse to match a beta prior (implied a = " + std::to_string(a_hat) + ")");
  }
  return {a_hat, a_hat * std::exp(-p.mu)};
}

double car_informativeness(const CarHyperState& h) {
  validate(h);
  const double var_bound = h.sigma2 + (h.sigma2 + h.tau2) / static_cast<double>(h.m);
  return one_plus_exp(h.xbeta) / var_bound - inv_logit(h.xbeta);
}

double global_informativeness(const CarHyperState& h, int m0) {
  CarHyperState ref = h;
  ref.m = m0;
  return car_informativeness(ref);
}

Sigma2Bounds informativeness_sigma2_bounds(double mu, double a_lo, double a_hi) {
  if (!std::isfinite(mu)) throw DomainError("mu must be finite");
  if (!(a_lo >= 0.0) || !(a_lo < a_hi)) throw DomainError("informativeness bounds must satisfy 0 <= a_lo < a_hi");
  const double p = inv_logit(mu);
  const double scale = one_plus_exp(mu);
  Sigma2Bounds out{};
  out.sigma2_lo = scale / (a_hi + p);
  if (a_lo + p <= 0.0) {
    out.sigma2_hi = std::numeric_limits<double>::infinity();
    out.unbounded_above = true;
  } else {
    out.sigma2_hi = scale / (a_lo + p);
    out.unbounded_above = false;
  }
  return out;
}

}  // namespace carinfo
