#include "common.hpp"

#include <algorithm>

#include "carinfo/informativeness.hpp"
#include "carinfo/sample_stats.hpp"

namespace carinfo {

void CountData::validate() const {
  if (n.size() != region_ids.size() || y.size() != region_ids.size()) {
    throw DomainError("count data columns have different lengths");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (n[i] < 0 || y[i] < 0) throw DomainError("negative count for region '" + region_ids[i] + "'");
    if (y[i] > n[i]) throw DomainError("events exceed trials for region '" + region_ids[i] + "'");
  }
}

long long CountData::total_trials() const {
  long long s = 0;
  for (auto v : n) s += v;
  return s;
}

long long CountData::total_events() const {
  long long s = 0;
  for (auto v : y) s += v;
  return s;
}

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::beta_binomial: return "beta-binomial";
    case ModelKind::logitnormal: return "logitnormal";
    case ModelKind::car: return "car";
  }
  return "unknown";
}

std::string pi_column(const std::string& region_id) { return "pi[" + region_id + "]"; }
std::string z_column(const std::string& region_id) { return "z[" + region_id + "]"; }

std::vector<double> FitResult::pi_draws(std::size_t region) const {
  return samples.column(pi_column(region_ids.at(region)));
}

std::vector<double> FitResult::informativeness_draws() const { return samples.column(informativeness_column); }

namespace detail {

double empirical_logit(long long y, long long n, double fallback) {
  if (n <= 0) return fallback;
  if (y == 0 || y == n) {
    const double p = (static_cast<double>(y) + 0.5) / (static_cast<double>(n) + 1.0);
    return logit(p);
  }
  return logit(static_cast<double>(y) / static_cast<double>(n));
}

double pooled_logit(const CountData& data) {
  return empirical_logit(data.total_events(), data.total_trials(), 0.0);
}

double theta_scale(long long y, long long n, double prior_precision) {
  double p = n > 0 ? (static_cast<double>(y) + 0.5) / (static_cast<double>(n) + 1.0) : 0.5;
  const double info = static_cast<double>(n) * p * (1.0 - p) + prior_precision;
  return 2.4 / std::sqrt(std::max(info, 1e-6));
}

FitResult finish_fit(ModelKind kind, const CountData& data, PosteriorSamples samples, std::string informativeness_column,
                     std::vector<std::string> diagnostic_columns) {
  FitResult fit;
  fit.kind = kind;
  fit.stratum = data.stratum;
  fit.region_ids = data.region_ids;
  fit.n = data.n;
  fit.y = data.y;
  fit.diagnostics = diagnose(samples, diagnostic_columns);
  fit.samples = std::move(samples);
  fit.informativeness_column = std::move(informativeness_column);
  return fit;
}

}  // namespace detail

InformativenessSummary posterior_informativeness(const FitResult& fit) {
  const auto draws = fit.informativeness_draws();
  const double probs[] = {0.5, 0.025, 0.975};
  const auto q = quantiles(draws, probs);
  return {sample_mean(draws), q[0], q[1], q[2]};
}

}  // namespace carinfo
