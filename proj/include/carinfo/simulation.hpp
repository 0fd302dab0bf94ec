#pragma once

// Beta-binomial simulation study comparing the hierarchical beta-binomial and
// logitnormal fits on the same generated datasets.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carinfo/mcmc.hpp"
#include "carinfo/models.hpp"

namespace carinfo {

struct ScenarioGrid {
  std::vector<std::size_t> regions{50, 100, 200};
  std::vector<double> a{4, 8, 12, 16, 20};
  std::vector<double> pi0{0.01, 0.05, 0.10, 0.20, 0.40};
  std::size_t replicates = 100;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t cell_count() const { return regions.size() * a.size() * pi0.size(); }
};

struct Scenario {
  std::size_t index;
  std::size_t regions;
  double a;
  double pi0;
};

/// Cells in grid order: regions outermost, then a, then pi0.
std::vector<Scenario> enumerate_cells(const ScenarioGrid& grid);

/// Trial counts are uniform on [ceil(1/pi0), floor(20/pi0)], so that the
/// expected event count lies in [1, 20].
struct TrialRange {
  long long lo;
  long long hi;
};
TrialRange trial_range(double pi0);

/// y_i ~ Bin(n_i, pi_i), pi_i ~ Beta(a, a (1 - pi0) / pi0), n_i from trial_range.
CountData generate_dataset(std::size_t regions, double a, double pi0, std::uint64_t seed);

struct ModelEstimate {
  bool ok = false;
  double informativeness = 0.0;  // posterior mean of a (beta) or a_hat (logitnormal)
  double pi0 = 0.0;              // posterior mean of pi0
  std::string error;
};

struct ReplicateResult {
  std::size_t replicate = 0;
  ModelEstimate beta;
  ModelEstimate logitnormal;
};

struct CellResult {
  Scenario scenario;
  std::vector<ReplicateResult> replicates;
};

struct StudyResult {
  std::vector<CellResult> cells;
  bool empty() const { return cells.empty(); }
};

using StudyProgress = std::function<void(std::size_t done, std::size_t total)>;

/// Fits both models to every replicate of every cell. Per-fit seeds derive
/// from (grid.seed, cell, replicate), so the result does not depend on
/// `jobs`. Fit failures are recorded in the replicate, not thrown.
StudyResult run_study(const ScenarioGrid& grid, const ChainConfig& chain, std::size_t jobs = 1,
                      const StudyProgress& progress = {});

enum class StudyTarget { informativeness, pi0 };

struct RmseComparison {
  Scenario scenario;
  std::size_t used = 0;  // replicates where both fits succeeded
  double rmse_logitnormal = 0.0;
  double rmse_beta = 0.0;
  /// rmse_logitnormal / rmse_beta; > 1 favors the beta-binomial model.
  double ratio = 0.0;
  bool defined = false;  // false when no usable replicate or rmse_beta == 0
};

std::vector<RmseComparison> rmse_ratio(const StudyResult& result, StudyTarget target);

}  // namespace carinfo
