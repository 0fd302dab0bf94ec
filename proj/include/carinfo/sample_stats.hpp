#pragma once

#include <span>
#include <vector>

namespace carinfo {

double sample_mean(std::span<const double> x);
/// Unbiased (n - 1) standard deviation; 0 for fewer than two values.
double sample_sd(std::span<const double> x);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of already sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

/// Quantiles of unsorted data; throws std::invalid_argument on empty input
/// or probabilities outside [0, 1].
std::vector<double> quantiles(std::span<const double> x, std::span<const double> probs);
double quantile(std::span<const double> x, double p);

}  // namespace carinfo
