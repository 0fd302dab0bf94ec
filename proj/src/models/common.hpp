#pragma once

#include <cmath>
#include <optional>

#include "carinfo/mcmc.hpp"
#include "carinfo/models.hpp"

namespace carinfo::detail {

/// log(1 + e^x)
inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// Binomial log-likelihood in theta = logit(pi), without the constant.
inline double binomial_logit_loglik(double theta, long long y, long long n) {
  return static_cast<double>(y) * theta - static_cast<double>(n) * softplus(theta);
}

/// Empirical logit with a continuity correction for y in {0, n}; falls back
/// to `fallback` when n = 0.
double empirical_logit(long long y, long long n, double fallback);

/// Pooled logit of all events over all trials, corrected like empirical_logit.
double pooled_logit(const CountData& data);

/// Initial random-walk scale for theta_i given prior precision.
double theta_scale(long long y, long long n, double prior_precision);

/// Retry budget for exact draws from truncated full conditionals.
inline constexpr int kRejectionTries = 50;

template <class Draw, class Inside>
std::optional<double> rejection_draw(Draw&& draw, Inside&& inside, int tries = kRejectionTries) {
  for (int t = 0; t < tries; ++t) {
    const double x = draw();
    if (inside(x)) return x;
  }
  return std::nullopt;
}

FitResult finish_fit(ModelKind kind, const CountData& data, PosteriorSamples samples, std::string informativeness_column,
                     std::vector<std::string> diagnostic_columns);

}  // namespace carinfo::detail
