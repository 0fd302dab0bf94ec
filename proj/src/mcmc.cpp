#include "carinfo/mcmc.hpp"

#include <algorithm>

namespace carinfo {

void ChainConfig::validate() const {
  if (iterations == 0) throw std::invalid_argument("iterations must be positive");
  if (burn_in >= iterations) throw std::invalid_argument("burn-in must be smaller than the number of iterations");
  if (thin == 0) throw std::invalid_argument("thinning factor must be at least 1");
  if (adaptation_iterations() > burn_in) throw std::invalid_argument("adaptation window must lie within burn-in");
}

SweepContext::SweepContext(std::vector<BlockSpec> blocks, Rng& rng) : rng_(&rng) {
  blocks_.reserve(blocks.size());
  for (auto& spec : blocks) {
    Block b;
    b.log_scale.assign(spec.width, std::log(spec.initial_scale));
    if (!spec.initial_scales.empty()) {
      if (spec.initial_scales.size() != spec.width) throw std::invalid_argument("initial scale count must equal block width");
      for (std::size_t k = 0; k < spec.width; ++k) b.log_scale[k] = std::log(spec.initial_scales[k]);
    }
    b.adapt_count.assign(spec.width, 0);
    b.spec = std::move(spec);
    blocks_.push_back(std::move(b));
  }
}

void SweepContext::adapt(std::size_t block, std::size_t k, double alpha) {
  if (!adapting_) return;
  auto& b = blocks_[block];
  const double step = std::pow(static_cast<double>(++b.adapt_count[k]), -0.6);
  b.log_scale[k] = std::clamp(b.log_scale[k] + step * (alpha - kTargetAcceptance), -30.0, 10.0);
}

void SweepContext::record(std::size_t block, bool accepted) {
  auto& b = blocks_[block];
  ++b.window_proposed;
  if (accepted) ++b.window_accepted;
  if (counting_) {
    ++b.proposed;
    if (accepted) ++b.accepted;
  }
}

void SweepContext::non_finite(std::size_t block, const char* what) const {
  throw NonFiniteDensity("non-finite log-density at " + std::string(what) + " in block '" + blocks_[block].spec.name + "'");
}

void SweepContext::begin_iteration(std::size_t iteration, bool adapting, bool counting, bool retaining) {
  iteration_ = iteration;
  adapting_ = adapting;
  counting_ = counting;
  retaining_ = retaining;
}

std::vector<BlockAcceptance> SweepContext::acceptance() const {
  std::vector<BlockAcceptance> out;
  for (const auto& b : blocks_) out.push_back({b.spec.name, b.proposed, b.accepted});
  return out;
}

std::vector<std::string> SweepContext::stuck_blocks() const {
  std::vector<std::string> out;
  for (const auto& b : blocks_) {
    if (b.spec.must_move && b.window_proposed > 0 && b.window_accepted == 0) out.push_back(b.spec.name);
  }
  return out;
}

void SweepContext::reset_window() {
  for (auto& b : blocks_) b.window_proposed = b.window_accepted = 0;
}

PosteriorSamples::PosteriorSamples(std::vector<std::string> names, std::size_t rows)
    : names_(std::move(names)), rows_(rows), values_(rows * names_.size(), 0.0) {}

std::optional<std::size_t> PosteriorSamples::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t PosteriorSamples::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw std::out_of_range("no sampled quantity named '" + std::string(name) + "'");
}

std::vector<double> PosteriorSamples::column(std::size_t c) const {
  if (c >= cols()) throw std::out_of_range("column index out of range");
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

PosteriorSamples run_chain(ChainModel& model, const ChainConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed, {config.stream});

  model.initialize(rng);
  if (!model.in_support()) throw ChainError("model rejects its own initial state");

  SweepContext ctx(model.blocks(), rng);
  PosteriorSamples out(model.column_names(), config.retained());
  out.config = config;

  const std::size_t adapt_end = config.adaptation_iterations();
  std::size_t next_row = 0;
  for (std::size_t t = 0; t < config.iterations; ++t) {
    const bool retain = t >= config.burn_in && (t - config.burn_in + 1) % config.thin == 0 && next_row < out.rows();
    ctx.begin_iteration(t, t < adapt_end, t >= config.burn_in, retain);
    try {
      model.sweep(ctx);
    } catch (const NonFiniteDensity& e) {
      throw ChainError(std::string(e.what()) + " (iteration " + std::to_string(t) + ")");
    }

    if (adapt_end > 0 && t + 1 == adapt_end) {
      if (auto stuck = ctx.stuck_blocks(); !stuck.empty()) {
        throw ChainError("constrained support appears empty: block '" + stuck.front() +
                         "' rejected every proposal during the adaptation window");
      }
    }

    if (retain) {
      if (!model.in_support()) {
        throw std::logic_error("retained draw outside model support at iteration " + std::to_string(t));
      }
      auto row = out.row(next_row++);
      model.write_draw(row);
      for (double v : row) {
        if (!std::isfinite(v)) throw ChainError("non-finite sampled value at iteration " + std::to_string(t));
      }
    }
  }
  out.acceptance = ctx.acceptance();
  return out;
}

}  // namespace carinfo
