#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "carinfo/models.hpp"
#include "carinfo/simulation.hpp"
#include "carinfo/summaries.hpp"

namespace carinfo {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Counts

struct CountRow {
  std::string region_id;
  std::string stratum;
  long long n = 0;
  long long y = 0;
  friend bool operator==(const CountRow&, const CountRow&) = default;
};

struct CountTable {
  std::vector<CountRow> rows;
  std::string provenance;
  std::vector<std::string> warnings;

  /// Distinct strata in first-appearance order.
  std::vector<std::string> strata() const;

  /// Rows of one stratum as CountData. With a graph, regions follow graph
  /// order and every graph region must be present exactly once; without
  /// one, file order is kept. Throws IoError otherwise.
  CountData select(const std::string& stratum, const RegionGraph* graph = nullptr) const;
};

/// Reads `region_id,stratum,n,y` CSV. Errors name the offending line.
CountTable load_counts(std::istream& in);
CountTable load_counts_file(const std::string& path);
void write_counts(std::ostream& out, const CountTable& table);

// ---------------------------------------------------------------------------
// Fit configuration: `key = value` lines, `#` comments. Keys match the CLI
// long flags (model, seed, iterations, burn-in, thin, adapt-window,
// constrain-a0, a0-min, m0, sigma2-shape, sigma2-scale, tau2-shape,
// tau2-scale, a-lo, a-hi, stratum, quantiles).

struct FitConfig {
  std::optional<std::string> model;
  ChainConfig chain;
  std::optional<double> a0_max;
  double a0_min = 0.0;
  int m0 = kReferenceNeighbors;
  InverseGammaPrior sigma2_prior{1.0, 1.0 / 100.0};
  InverseGammaPrior tau2_prior{1.0, 1.0 / 7.0};
  double a_lo = 0.0;
  double a_hi = 100.0;
  std::optional<std::string> stratum;
  std::vector<double> quantiles{0.025, 0.5, 0.975};

  /// Stable `key=value` rendering, used for hashing and the sidecar.
  std::string canonical() const;
  std::optional<InformativenessConstraint> constraint() const;
};

/// Applies every recognised key to `base`; throws IoError on unknown keys
/// or unparsable values.
FitConfig parse_config(std::istream& in, FitConfig base = {});
FitConfig parse_config_file(const std::string& path, FitConfig base = {});

// ---------------------------------------------------------------------------
// Output

/// 12 significant digits; "NA" for NaN.
std::string format_number(double v);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string config_hash(const std::string& text);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Sidecar keys shared by every fit: seed, schedule, config hash, constraint
/// settings, software version.
Metadata fit_metadata(const FitResult& fit, const FitConfig& config);

void write_metadata(std::ostream& out, const Metadata& meta);
Metadata load_metadata(std::istream& in);

/// Header row of column names, one row per retained draw.
void write_samples_csv(std::ostream& out, const PosteriorSamples& samples);
PosteriorSamples load_samples_csv(std::istream& in);

/// Rebuilds the parts of a FitResult that summaries and disparities need
/// from a samples table: region ids from the "pi[...]" columns and the
/// informativeness column. Counts are left at zero.
FitResult fit_from_samples(PosteriorSamples samples, ModelKind kind);

void write_summary_csv(std::ostream& out, const SummaryTable& table);
void write_disparity_csv(std::ostream& out, const std::vector<DisparityEstimate>& rows);
void write_diagnostics_csv(std::ostream& out, const Diagnostics& diagnostics);
void write_study_replicates_csv(std::ostream& out, const StudyResult& study);
void write_study_cells_csv(std::ostream& out, const StudyResult& study);

struct ResultBundle {
  const FitResult* fit = nullptr;
  const SummaryTable* summary = nullptr;
  const std::vector<DisparityEstimate>* disparities = nullptr;
  const StudyResult* study = nullptr;
  Metadata metadata;
};

/// Writes whichever artifacts are present plus `metadata.txt` into `dir`
/// (created if needed) and returns the paths written. Output is byte-stable
/// for identical inputs. Throws IoError if the destination is not writable.
std::vector<std::filesystem::path> write_results(const ResultBundle& bundle, const std::filesystem::path& dir);

}  // namespace carinfo
