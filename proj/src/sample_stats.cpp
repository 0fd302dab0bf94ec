#include "carinfo/sample_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carinfo/simd/kernels.hpp"

namespace carinfo {

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of an empty sample");
  return simd::sum(x) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(simd::sum_sq_dev(x, sample_mean(x)) / static_cast<double>(x.size() - 1));
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability must lie in [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> quantiles(std::span<const double> x, std::span<const double> probs) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) out.push_back(quantile_sorted(sorted, p));
  return out;
}

double quantile(std::span<const double> x, double p) { return quantiles(x, std::span<const double>(&p, 1)).front(); }

}  // namespace carinfo
