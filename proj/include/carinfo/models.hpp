#pragma once

// The three fitted model families:
//   * hierarchical beta-binomial, a ~ Unif(0, 100), pi0 = a/(a+b) ~ Unif(0, 1);
//   * hierarchical logitnormal, mu ~ Unif(-10, 10) and precision gamma uniform
//     on the interval that keeps the implied informativeness inside bounds;
//   * BYM/CAR, logit(pi_i) ~ N(beta0 + z_i, sigma2), z ~ ICAR(tau2), with an
//     optional constraint on the global informativeness a_hat0.

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "carinfo/diagnostics.hpp"
#include "carinfo/informativeness.hpp"
#include "carinfo/mcmc.hpp"
#include "carinfo/region_graph.hpp"

namespace carinfo {

/// Events `y` out of `n` trials per region for one stratum.
struct CountData {
  std::vector<std::string> region_ids;
  std::vector<long long> n;
  std::vector<long long> y;
  std::string stratum;

  std::size_t size() const { return region_ids.size(); }
  /// Throws DomainError on length mismatch, negative counts or y > n.
  void validate() const;
  long long total_trials() const;
  long long total_events() const;
};

struct InverseGammaPrior {
  double shape;
  double scale;  // density proportional to x^-(shape+1) exp(-scale/x)
};

/// Keeps a_hat0 = global_informativeness(...) inside (a0_min, a0_max).
struct InformativenessConstraint {
  double a0_min = 0.0;
  double a0_max = std::numeric_limits<double>::infinity();
  bool contains(double a0) const { return a0 > a0_min && a0 < a0_max; }
};

struct CarModelSpec {
  RegionGraph graph;
  InverseGammaPrior sigma2_prior{1.0, 1.0 / 100.0};
  InverseGammaPrior tau2_prior{1.0, 1.0 / 7.0};
  std::optional<InformativenessConstraint> constraint{};
  /// Reference neighbor count for a_hat0.
  int m0 = kReferenceNeighbors;

  // Optional pins, holding a parameter at a fixed value instead of sampling it.
  std::optional<double> fixed_beta0{};
  std::optional<double> fixed_sigma2{};
  std::optional<double> fixed_tau2{};
  /// Hold every spatial effect at zero (requires fixed_tau2).
  bool fix_spatial_zero = false;

  void validate() const;
};

struct BetaBinomialOptions {
  /// Hold (a, b) fixed; only the region rates are sampled.
  std::optional<BetaParams> fixed_prior;
};

struct LogitNormalOptions {
  /// Support of the implied informativeness a_hat.
  double a_lo = 0.0;
  double a_hi = 100.0;
  /// Uniform prior range of mu.
  double mu_lo = -10.0;
  double mu_hi = 10.0;
  /// Hold (mu, sigma2) fixed; only the region rates are sampled.
  std::optional<LogitNormalParams> fixed_prior;
};

enum class ModelKind { beta_binomial, logitnormal, car };

std::string_view model_name(ModelKind kind);

struct FitResult {
  ModelKind kind{};
  std::string stratum;
  std::vector<std::string> region_ids;
  std::vector<long long> n;
  std::vector<long long> y;

  /// Hyperparameters, the informativeness draw and one "pi[<region>]"
  /// column per region (CAR fits also carry "z[<region>]").
  PosteriorSamples samples;
  /// Column holding the per-draw informativeness ("a", "a_hat" or "a_hat0").
  std::string informativeness_column;
  Diagnostics diagnostics;

  std::optional<InformativenessConstraint> constraint{};
  int m0 = kReferenceNeighbors;

  std::size_t draws() const { return samples.rows(); }
  std::size_t regions() const { return region_ids.size(); }
  std::vector<double> pi_draws(std::size_t region) const;
  std::vector<double> informativeness_draws() const;
};

std::string pi_column(const std::string& region_id);
std::string z_column(const std::string& region_id);

/// Conjugate hierarchy. The hyperparameters are updated by random-walk
/// Metropolis on logit scales against the beta-binomial marginal likelihood,
/// then each pi_i is drawn from Beta(y_i + a, n_i - y_i + b).
FitResult fit_beta_binomial(const CountData& data, const ChainConfig& config, const BetaBinomialOptions& options = {});

/// Logitnormal hierarchy with per-region random-walk updates of
/// theta_i = logit(pi_i), and mu, gamma restricted so that a_hat lies in
/// (a_lo, a_hi) at every draw.
FitResult fit_logitnormal(const CountData& data, const ChainConfig& config, const LogitNormalOptions& options = {});

/// BYM/CAR model. `data.region_ids` must match `spec.graph` order.
FitResult fit_car(const CountData& data, const CarModelSpec& spec, const ChainConfig& config);

struct InformativenessSummary {
  double mean;
  double median;
  double q025;
  double q975;
};

InformativenessSummary posterior_informativeness(const FitResult& fit);

}  // namespace carinfo
