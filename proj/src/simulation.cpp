#include "carinfo/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "carinfo/random.hpp"
#include "carinfo/sample_stats.hpp"

namespace carinfo {
namespace {

// Guards against 1/pi0 landing a hair above an integer.
constexpr double kRangeSlack = 1e-9;

enum Stream : std::uint64_t { kData = 0, kBetaChain = 1, kLogitChain = 2 };

ModelEstimate estimate(const FitResult& fit, const char* pi0_column) {
  ModelEstimate e;
  e.ok = true;
  e.informativeness = sample_mean(fit.informativeness_draws());
  e.pi0 = sample_mean(fit.samples.column(pi0_column));
  return e;
}

template <class Fit>
ModelEstimate guarded(Fit&& fit) {
  try {
    return fit();
  } catch (const std::exception& ex) {
    ModelEstimate e;
    e.error = ex.what();
    return e;
  }
}

}  // namespace

void ScenarioGrid::validate() const {
  if (regions.empty() || a.empty() || pi0.empty()) throw std::invalid_argument("scenario grid lists must not be empty");
  for (auto r : regions) {
    if (r == 0) throw std::invalid_argument("region counts must be positive");
  }
  for (double v : a) {
    if (!(v > 0.0)) throw std::invalid_argument("informativeness levels must be positive");
  }
  for (double p : pi0) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("pi0 levels must lie in (0, 1)");
    trial_range(p);
  }
}

std::vector<Scenario> enumerate_cells(const ScenarioGrid& grid) {
  std::vector<Scenario> cells;
  for (auto r : grid.regions) {
    for (double a : grid.a) {
      for (double p : grid.pi0) cells.push_back({cells.size(), r, a, p});
    }
  }
  return cells;
}

TrialRange trial_range(double pi0) {
  if (!(pi0 > 0.0 && pi0 < 1.0)) throw std::invalid_argument("pi0 must lie in (0, 1)");
  const auto lo = static_cast<long long>(std::ceil(1.0 / pi0 - kRangeSlack));
  const auto hi = static_cast<long long>(std::floor(20.0 / pi0 + kRangeSlack));
  if (lo > hi) throw std::invalid_argument("empty trial range for pi0");
  return {lo, hi};
}

CountData generate_dataset(std::size_t regions, double a, double pi0, std::uint64_t seed) {
  if (regions == 0) throw std::invalid_argument("need at least one region");
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  const auto range = trial_range(pi0);
  const double b = a * (1.0 - pi0) / pi0;
  Rng rng(seed);
  CountData data;
  data.stratum = "simulated";
  for (std::size_t i = 0; i < regions; ++i) {
    const long long n = uniform_int(rng, range.lo, range.hi);
    const double p = beta(rng, a, b);
    data.region_ids.push_back("R" + std::to_string(i + 1));
    data.n.push_back(n);
    data.y.push_back(binomial(rng, n, p));
  }
  return data;
}

StudyResult run_study(const ScenarioGrid& grid, const ChainConfig& chain, std::size_t jobs, const StudyProgress& progress) {
  grid.validate();
  chain.validate();
  StudyResult result;
  if (grid.replicates == 0) return result;

  const auto cells = enumerate_cells(grid);
  for (const auto& c : cells) {
    CellResult cr{c, std::vector<ReplicateResult>(grid.replicates)};
    result.cells.push_back(std::move(cr));
  }

  const std::size_t total = cells.size() * grid.replicates;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t cell = task / grid.replicates;
      const std::size_t rep = task % grid.replicates;
      const auto& sc = cells[cell];
      auto& out = result.cells[cell].replicates[rep];
      out.replicate = rep;

      const auto data = generate_dataset(sc.regions, sc.a, sc.pi0, derive_seed(grid.seed, {cell, rep, kData}));
      ChainConfig cfg = chain;
      cfg.stream = 0;
      cfg.seed = derive_seed(grid.seed, {cell, rep, kBetaChain});
      out.beta = guarded([&] { return estimate(fit_beta_binomial(data, cfg), "pi0"); });
      cfg.seed = derive_seed(grid.seed, {cell, rep, kLogitChain});
      out.logitnormal = guarded([&] { return estimate(fit_logitnormal(data, cfg), "pi0"); });

      const auto finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, total);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, total);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return result;
}

std::vector<RmseComparison> rmse_ratio(const StudyResult& result, StudyTarget target) {
  std::vector<RmseComparison> out;
  for (const auto& cell : result.cells) {
    RmseComparison cmp;
    cmp.scenario = cell.scenario;
    const double truth = target == StudyTarget::informativeness ? cell.scenario.a : cell.scenario.pi0;
    double se_ln = 0.0, se_bb = 0.0;
    for (const auto& rep : cell.replicates) {
      if (!rep.beta.ok || !rep.logitnormal.ok) continue;
      const double ln = target == StudyTarget::informativeness ? rep.logitnormal.informativeness : rep.logitnormal.pi0;
      const double bb = target == StudyTarget::informativeness ? rep.beta.informativeness : rep.beta.pi0;
      se_ln += (ln - truth) * (ln - truth);
      se_bb += (bb - truth) * (bb - truth);
      ++cmp.used;
    }
    if (cmp.used > 0) {
      cmp.rmse_logitnormal = std::sqrt(se_ln / static_cast<double>(cmp.used));
      cmp.rmse_beta = std::sqrt(se_bb / static_cast<double>(cmp.used));
      if (cmp.rmse_beta > 0.0) {
        cmp.ratio = cmp.rmse_logitnormal / cmp.rmse_beta;
        cmp.defined = true;
      }
    }
    out.push_back(cmp);
  }
  return out;
}

}  // namespace carinfo
