#include "carinfo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "carinfo/simd/kernels.hpp"

namespace carinfo {
namespace {

constexpr std::size_t kMinDraws = 10;

struct Autocorrelation {
  double mean;
  double variance;  // biased (divides by N)
  double tau;       // integrated autocorrelation time
  bool constant;
};

Autocorrelation autocorrelation(std::span<const double> x) {
  const std::size_t n = x.size();
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return {*lo, 0.0, 1.0, true};
  const double mean = simd::sum(x) / static_cast<double>(n);
  std::vector<double> c(x.begin(), x.end());
  simd::shift(c, -mean);
  const double gamma0 = simd::sum_sq_dev(c, 0.0) / static_cast<double>(n);
  if (!(gamma0 > 0.0)) return {mean, 0.0, 1.0, true};

  auto rho = [&](std::size_t k) {
    const std::span<const double> all(c);
    return simd::dot(all.first(n - k), all.subspan(k)) / static_cast<double>(n) / gamma0;
  };

  // Sum of adjacent pairs Gamma_m = rho(2m) + rho(2m+1), truncated at the first
  // non-positive pair and forced to be non-increasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = (m == 0 ? 1.0 : rho(2 * m)) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  return {mean, gamma0, std::max(tau, std::numeric_limits<double>::min()), false};
}

void require_length(std::size_t n, const char* what) {
  if (n < kMinDraws) throw std::invalid_argument(std::string(what) + " needs at least 10 draws");
}

}  // namespace

double integrated_autocorrelation_time(std::span<const double> draws) {
  require_length(draws.size(), "autocorrelation time");
  return autocorrelation(draws).tau;
}

EssEstimate effective_sample_size(std::span<const double> draws) {
  require_length(draws.size(), "effective sample size");
  const double n = static_cast<double>(draws.size());
  const auto ac = autocorrelation(draws);
  if (ac.constant) return {n, true};
  return {std::clamp(n / ac.tau, std::numeric_limits<double>::min(), n), false};
}

double geweke(std::span<const double> draws, double first_frac, double last_frac) {
  if (!(first_frac > 0.0 && first_frac < 1.0) || !(last_frac > 0.0 && last_frac < 1.0)) {
    throw std::invalid_argument("Geweke window fractions must lie in (0, 1)");
  }
  if (first_frac + last_frac > 1.0) throw std::invalid_argument("Geweke windows overlap");
  const std::size_t n = draws.size();
  const auto n_a = static_cast<std::size_t>(std::floor(first_frac * static_cast<double>(n)));
  const auto n_b = static_cast<std::size_t>(std::floor(last_frac * static_cast<double>(n)));
  if (n_a < kMinDraws || n_b < kMinDraws) throw std::invalid_argument("Geweke windows need at least 10 draws each");

  const auto a = autocorrelation(draws.first(n_a));
  const auto b = autocorrelation(draws.last(n_b));
  const double var = a.variance * a.tau / static_cast<double>(n_a) + b.variance * b.tau / static_cast<double>(n_b);
  const double diff = a.mean - b.mean;
  if (!(var > 0.0)) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / std::sqrt(var);
}

Diagnostics diagnose(const PosteriorSamples& samples, const std::vector<std::string>& names) {
  Diagnostics out;
  out.acceptance = samples.acceptance;
  const auto& which = names.empty() ? samples.names() : names;
  for (const auto& name : which) {
    const auto col = samples.column(name);
    ParameterDiagnostics d{name, static_cast<double>(col.size()), true, std::numeric_limits<double>::quiet_NaN()};
    if (col.size() >= kMinDraws) {
      const auto ess = effective_sample_size(col);
      d.ess = ess.value;
      d.degenerate = ess.degenerate;
      if (col.size() >= 10 * kMinDraws) d.geweke_z = geweke(col);
    }
    out.parameters.push_back(std::move(d));
  }
  return out;
}

}  // namespace carinfo
