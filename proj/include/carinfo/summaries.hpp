#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carinfo/models.hpp"

namespace carinfo {

/// y_i / n_i; empty for regions with no trials.
std::vector<std::optional<double>> crude_rates(const CountData& data);
std::vector<std::optional<double>> crude_rates(const FitResult& fit);

struct RegionSummary {
  std::string region_id;
  long long n = 0;
  long long y = 0;
  std::optional<double> crude_rate;
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> quantiles;  // aligned with SummaryTable::probs
};

struct SummaryTable {
  ModelKind kind{};
  std::string stratum;
  std::vector<double> probs;
  std::vector<RegionSummary> rows;
  InformativenessSummary informativeness{};
  std::string informativeness_column;
};

/// Posterior mean, sd and the requested quantiles of every pi_i. Throws
/// std::invalid_argument for an empty or out-of-range quantile list.
SummaryTable summarize(const FitResult& fit, std::span<const double> probs);

/// Rate ratio comparison / reference for one region.
struct DisparityEstimate {
  std::string region_id;
  double mean = 0.0;
  double median = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  /// Equal-tailed 95% interval excludes 1.
  bool significant = false;
};

/// Summary of per-draw ratio values.
DisparityEstimate summarize_ratio(std::string region_id, std::span<const double> ratio_draws);

/// Per-region ratio pi_comparison / pi_reference, pairing draws by index.
/// Throws std::invalid_argument on region or draw-count mismatch.
std::vector<DisparityEstimate> disparity(const FitResult& comparison, const FitResult& reference);

}  // namespace carinfo
