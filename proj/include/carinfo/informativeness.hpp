#pragma once

// Closed-form mathematics linking beta and logitnormal priors on a binomial
// rate, and the "equivalent prior events" informativeness measures for
// independent logitnormal priors and for the BYM/CAR prior.

#include <stdexcept>

namespace carinfo {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Beta(a, b) prior: a prior events, b prior non-events.
struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  double mean() const { return a / (a + b); }
  double variance() const {
    const double s = a + b;
    return a * b / (s * s * (s + 1.0));
  }
};

/// logit(pi) ~ Normal(mu, sigma2).
struct LogitNormalParams {
  double mu = 0.0;
  double sigma2 = 1.0;
};

/// Arguments of the CAR informativeness bound for one region.
struct CarHyperState {
  double xbeta = 0.0;  // linear predictor
  double sigma2 = 1.0; // heterogeneity variance
  double tau2 = 1.0;   // CAR conditional variance
  int m = 3;           // neighbor count
};

struct Moments {
  double mean;
  double variance;
};

/// Reference neighbor count used for the global informativeness.
inline constexpr int kReferenceNeighbors = 3;

// Numerically guarded pieces of the inverse-logit.
double inv_logit(double x);
/// 1 + e^x without overflow for large |x|.
double one_plus_exp(double x);
double logit(double p);

void validate(const BetaParams& p);
void validate(const LogitNormalParams& p);
void validate(const CarHyperState& h);

/// Conjugate update: Beta(y + a, n - y + b). Throws DomainError unless
/// 0 <= y <= n.
BetaParams beta_posterior(long long y, long long n, const BetaParams& prior);

/// First-order (delta-method) mean and variance of inv_logit(theta) for
/// theta ~ Normal(mu, sigma2): mean = h(mu), variance = h'(mu)^2 sigma2.
Moments delta_moments(const LogitNormalParams& p);

/// Moment-matched logitnormal prior: mu = log(a/b),
/// sigma2 = (a+b)^2 / (a b (a+b+1)).
LogitNormalParams beta_to_logitnormal(const BetaParams& prior);

/// a_hat = (1 + e^mu)/sigma2 - e^mu/(1 + e^mu). Negative values (very
/// diffuse priors) are returned unclamped.
double logitnormal_informativeness(const LogitNormalParams& p);

/// Inverse of beta_to_logitnormal: (a_hat, a_hat e^{-mu}). Throws
/// DomainError when the implied a_hat is not positive.
BetaParams logitnormal_to_beta(const LogitNormalParams& p);

/// Lower bound on the informativeness of the BYM prior for a region with
/// `h.m` neighbors: the logitnormal measure evaluated at the conditional
/// variance bound sigma2 + (sigma2 + tau2)/m.
double car_informativeness(const CarHyperState& h);

/// car_informativeness at m = m0 (default 3), ignoring h.m.
double global_informativeness(const CarHyperState& h, int m0 = kReferenceNeighbors);

/// Logit-scale variance interval that keeps a_hat within (a_lo, a_hi) at a
/// fixed mu. `sigma2_hi` is +infinity (and `unbounded_above` set) when
/// a_lo + e^mu/(1+e^mu) <= 0, i.e. no variance is too large.
struct Sigma2Bounds {
  double sigma2_lo;
  double sigma2_hi;
  bool unbounded_above;

  /// Precision (gamma = 1/sigma2) interval; gamma_lo is 0 when unbounded.
  double gamma_lo() const { return unbounded_above ? 0.0 : 1.0 / sigma2_hi; }
  double gamma_hi() const { return 1.0 / sigma2_lo; }
};

/// Solves a_hat(mu, sigma2) = a for sigma2: (1 + e^mu)/(a + e^mu/(1+e^mu)).
/// Requires 0 <= a_lo < a_hi.
Sigma2Bounds informativeness_sigma2_bounds(double mu, double a_lo, double a_hi);

}  // namespace carinfo
