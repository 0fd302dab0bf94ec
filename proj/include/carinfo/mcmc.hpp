#pragma once

// Seed-reproducible Metropolis-within-Gibbs driver.
//
// A model owns its state and describes one sweep over its update blocks.
// The driver owns the schedule (burn-in, thinning), the random engine, the
// random-walk proposal scales and their Robbins-Monro adaptation, which is
// frozen once the adaptation window (part of burn-in) ends.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "carinfo/random.hpp"

namespace carinfo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ChainConfig {
  std::size_t iterations = 20000;
  std::size_t burn_in = 5000;
  std::size_t thin = 3;
  std::uint64_t seed = 1;
  /// Substream under `seed`; independent fits sharing a seed use distinct streams.
  std::uint64_t stream = 0;
  /// Iterations of proposal adaptation; defaults to the whole burn-in.
  std::optional<std::size_t> adapt_window{};

  std::size_t adaptation_iterations() const { return adapt_window.value_or(burn_in); }
  std::size_t retained() const { return (iterations - burn_in) / thin; }
  /// Throws std::invalid_argument when the schedule is inconsistent.
  void validate() const;
};

/// Raised when a chain cannot proceed (bad initial state, non-finite
/// density, empty constrained support).
class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown from inside a model update when a log-density evaluates to NaN
/// or +inf. The driver rethrows it as ChainError with the iteration index.
class NonFiniteDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One update block. `width` coordinates share the block name but get
/// their own proposal scale (e.g. one per region).
struct BlockSpec {
  std::string name;
  std::size_t width = 1;
  double initial_scale = 1.0;
  /// Abort if the block never accepts a move during the adaptation window;
  /// used for blocks whose support is a constraint set.
  bool must_move = false;
  /// Per-coordinate starting scales (size `width`); overrides initial_scale.
  std::vector<double> initial_scales = {};
};

struct BlockAcceptance {
  std::string name;
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  double rate() const { return proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed); }
};

/// Scalar random-walk target acceptance rate.
inline constexpr double kTargetAcceptance = 0.44;

class SweepContext {
 public:
  SweepContext(std::vector<BlockSpec> blocks, Rng& rng);

  Rng& rng() { return *rng_; }
  std::size_t iteration() const { return iteration_; }
  bool adapting() const { return adapting_; }
  /// True when the state after this sweep will be recorded. Models may skip
  /// draws that nothing else in the sweep depends on.
  bool retaining() const { return retaining_; }

  double scale(std::size_t block, std::size_t k = 0) const { return std::exp(blocks_[block].log_scale[k]); }

  /// One random-walk Metropolis step on an unbounded coordinate. `log_p`
  /// must hold log_target(x) on entry; both are updated on acceptance.
  /// log_target may return -inf outside the support.
  template <class LogTarget>
  bool random_walk(std::size_t block, std::size_t k, double& x, double& log_p, LogTarget&& log_target) {
    check_finite(log_p, block, "current state");
    const double proposal = x + scale(block, k) * standard_normal(*rng_);
    const double log_q = log_target(proposal);
    if (std::isnan(log_q) || log_q == kInf) check_finite(log_q, block, "proposal");
    const double log_ratio = log_q - log_p;
    const bool accept = log_ratio >= 0.0 || std::log(uniform_open(*rng_)) < log_ratio;
    adapt(block, k, log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio));
    record(block, accept);
    if (accept) {
      x = proposal;
      log_p = log_q;
    }
    return accept;
  }

  /// Counts the outcome of an update that is not a plain random walk
  /// (exact Gibbs draws count as accepted).
  void record(std::size_t block, bool accepted);

  // Driver interface.
  void begin_iteration(std::size_t iteration, bool adapting, bool counting, bool retaining);
  std::vector<BlockAcceptance> acceptance() const;
  /// Names of must_move blocks that accepted nothing since the last reset.
  std::vector<std::string> stuck_blocks() const;
  void reset_window();

 private:
  struct Block {
    BlockSpec spec;
    std::vector<double> log_scale;
    std::vector<std::size_t> adapt_count;
    std::size_t proposed = 0, accepted = 0;
    std::size_t window_proposed = 0, window_accepted = 0;
  };

  void adapt(std::size_t block, std::size_t k, double alpha);
  [[noreturn]] void non_finite(std::size_t block, const char* what) const;
  void check_finite(double v, std::size_t block, const char* what) const {
    if (std::isnan(v) || std::isinf(v)) non_finite(block, what);
  }

  std::vector<Block> blocks_;
  Rng* rng_;
  std::size_t iteration_ = 0;
  bool adapting_ = false;
  bool counting_ = false;
  bool retaining_ = false;
};

/// What the driver needs from a model.
class ChainModel {
 public:
  virtual ~ChainModel() = default;

  virtual std::vector<BlockSpec> blocks() const = 0;
  /// Names of the values written per retained draw.
  virtual std::vector<std::string> column_names() const = 0;
  /// Sets the initial state. May throw ChainError.
  virtual void initialize(Rng& rng) = 0;
  virtual bool in_support() const = 0;
  virtual void sweep(SweepContext& ctx) = 0;
  virtual void write_draw(std::span<double> row) const = 0;
};

/// Retained draws, row-major (rows = draws, columns = named values).
class PosteriorSamples {
 public:
  PosteriorSamples() = default;
  PosteriorSamples(std::vector<std::string> names, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws std::out_of_range for unknown names.
  std::size_t index(std::string_view name) const;

  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols(), cols()}; }
  std::vector<double> column(std::size_t c) const;
  std::vector<double> column(std::string_view name) const { return column(index(name)); }
  const std::vector<double>& values() const { return values_; }

  ChainConfig config;
  std::vector<BlockAcceptance> acceptance;

  friend bool operator==(const PosteriorSamples& a, const PosteriorSamples& b) {
    return a.names_ == b.names_ && a.rows_ == b.rows_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::string> names_;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

/// Runs one chain. Deterministic given (model, config). Throws ChainError
/// if the model rejects its initial state, a log-density is non-finite
/// (message carries the iteration), or a must_move block is stuck for the
/// whole adaptation window.
PosteriorSamples run_chain(ChainModel& model, const ChainConfig& config);

}  // namespace carinfo
