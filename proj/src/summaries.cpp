#include "carinfo/summaries.hpp"

#include <stdexcept>

#include "carinfo/sample_stats.hpp"

namespace carinfo {
namespace {

std::vector<std::optional<double>> rates(const std::vector<long long>& n, const std::vector<long long>& y) {
  std::vector<std::optional<double>> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] > 0) out[i] = static_cast<double>(y[i]) / static_cast<double>(n[i]);
  }
  return out;
}

}  // namespace

std::vector<std::optional<double>> crude_rates(const CountData& data) {
  data.validate();
  return rates(data.n, data.y);
}

std::vector<std::optional<double>> crude_rates(const FitResult& fit) { return rates(fit.n, fit.y); }

SummaryTable summarize(const FitResult& fit, std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("at least one quantile is required");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantiles must lie in [0, 1]");
  }
  SummaryTable table;
  table.kind = fit.kind;
  table.stratum = fit.stratum;
  table.probs.assign(probs.begin(), probs.end());
  table.informativeness = posterior_informativeness(fit);
  table.informativeness_column = fit.informativeness_column;

  const auto crude = crude_rates(fit);
  for (std::size_t i = 0; i < fit.regions(); ++i) {
    const auto draws = fit.pi_draws(i);
    RegionSummary row;
    row.region_id = fit.region_ids[i];
    row.n = i < fit.n.size() ? fit.n[i] : 0;
    row.y = i < fit.y.size() ? fit.y[i] : 0;
    row.crude_rate = i < crude.size() ? crude[i] : std::nullopt;
    row.mean = sample_mean(draws);
    row.sd = sample_sd(draws);
    row.quantiles = quantiles(draws, probs);
    table.rows.push_back(std::move(row));
  }
  return table;
}

DisparityEstimate summarize_ratio(std::string region_id, std::span<const double> ratio_draws) {
  const double probs[] = {0.5, 0.025, 0.975};
  const auto q = quantiles(ratio_draws, probs);
  DisparityEstimate d;
  d.region_id = std::move(region_id);
  d.mean = sample_mean(ratio_draws);
  d.median = q[0];
  d.q025 = q[1];
  d.q975 = q[2];
  d.significant = d.q025 > 1.0 || d.q975 < 1.0;
  return d;
}

std::vector<DisparityEstimate> disparity(const FitResult& comparison, const FitResult& reference) {
  if (comparison.region_ids != reference.region_ids) {
    throw std::invalid_argument("disparity fits cover different regions or orderings");
  }
  if (comparison.draws() != reference.draws()) {
    throw std::invalid_argument("disparity fits have different numbers of retained draws");
  }
  std::vector<DisparityEstimate> out;
  std::vector<double> ratio(comparison.draws());
  for (std::size_t i = 0; i < comparison.regions(); ++i) {
    const auto num = comparison.pi_draws(i);
    const auto den = reference.pi_draws(i);
    for (std::size_t k = 0; k < ratio.size(); ++k) ratio[k] = num[k] / den[k];
    out.push_back(summarize_ratio(comparison.region_ids[i], ratio));
  }
  return out;
}

}  // namespace carinfo
