#pragma once

#include <span>
#include <string>
#include <vector>

#include "carinfo/mcmc.hpp"

namespace carinfo {

struct EssEstimate {
  double value;
  /// Constant series: value is N and no autocorrelation was estimated.
  bool degenerate;
};

/// Effective sample size by Geyer's initial monotone positive sequence.
/// Requires at least 10 draws; the result lies in (0, N].
EssEstimate effective_sample_size(std::span<const double> draws);

/// Integrated autocorrelation time (N / ESS before clamping). 1 for a
/// constant series.
double integrated_autocorrelation_time(std::span<const double> draws);

/// Geweke z-score comparing the means of the first `first_frac` and last
/// `last_frac` of the series, each with a spectral-density-at-zero variance
/// from the autocorrelation time. Throws std::invalid_argument when the
/// windows overlap or either holds fewer than 10 draws.
double geweke(std::span<const double> draws, double first_frac = 0.1, double last_frac = 0.5);

struct ParameterDiagnostics {
  std::string name;
  double ess;
  bool degenerate;
  /// NaN when the series is too short for the default windows.
  double geweke_z;
};

struct Diagnostics {
  std::vector<ParameterDiagnostics> parameters;
  std::vector<BlockAcceptance> acceptance;
};

/// Diagnostics for the named columns (all columns when `names` is empty).
Diagnostics diagnose(const PosteriorSamples& samples, const std::vector<std::string>& names = {});

}  // namespace carinfo
