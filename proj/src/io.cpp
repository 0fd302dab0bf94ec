#include "carinfo/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "carinfo/version.hpp"

namespace carinfo {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string field = trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    out.push_back(std::move(field));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::optional<long long> parse_integer(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != end) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& s) {
  if (s == "NA" || s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf" || s == "Inf") return std::numeric_limits<double>::infinity();
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != end) return std::nullopt;
  return v;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::string prob_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "q%.6g", p);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> CountTable::strata() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.stratum) == out.end()) out.push_back(r.stratum);
  return out;
}

CountData CountTable::select(const std::string& stratum, const RegionGraph* graph) const {
  std::vector<const CountRow*> picked;
  for (const auto& r : rows)
    if (r.stratum == stratum) picked.push_back(&r);
  if (picked.empty()) throw IoError("no rows for stratum '" + stratum + "'");

  CountData data;
  data.stratum = stratum;
  auto push = [&](const CountRow& r) {
    data.region_ids.push_back(r.region_id);
    data.n.push_back(r.n);
    data.y.push_back(r.y);
  };
  if (!graph) {
    for (const auto* r : picked) push(*r);
    return data;
  }

  std::map<std::string, const CountRow*> by_id;
  for (const auto* r : picked) {
    if (!graph->contains(r->region_id))
      throw IoError("region '" + r->region_id + "' in stratum '" + stratum + "' is not in the adjacency graph");
    by_id[r->region_id] = r;
  }
  std::vector<std::string> missing;
  for (const auto& id : graph->region_ids())
    if (!by_id.count(id)) missing.push_back(id);
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 5) list += ", ...";
    throw IoError("stratum '" + stratum + "' has no counts for " + std::to_string(missing.size()) +
                  " graph region(s): " + list);
  }
  for (const auto& id : graph->region_ids()) push(*by_id.at(id));
  return data;
}

CountTable load_counts(std::istream& in) {
  CountTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (!have_header && read_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields != std::vector<std::string>{"region_id", "stratum", "n", "y"})
      throw IoError(at_line(lineno) + "expected header 'region_id,stratum,n,y'");
    have_header = true;
  }
  if (!have_header) throw IoError("counts input is empty (missing header 'region_id,stratum,n,y')");

  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw IoError(at_line(lineno) + "malformed row: expected 4 fields, found " + std::to_string(f.size()));
    if (f[0].empty()) throw IoError(at_line(lineno) + "malformed row: empty region_id");
    const auto n = parse_integer(f[2]);
    const auto y = parse_integer(f[3]);
    if (!n || !y) throw IoError(at_line(lineno) + "malformed row: n and y must be integers");
    if (*n < 0 || *y < 0) throw IoError(at_line(lineno) + "negative count");
    if (*y > *n) throw IoError(at_line(lineno) + "y = " + f[3] + " exceeds n = " + f[2]);
    const auto key = std::make_pair(f[0], f[1]);
    if (const auto it = seen.find(key); it != seen.end())
      throw IoError(at_line(lineno) + "duplicate (region_id, stratum) = (" + f[0] + ", " + f[1] + "), first seen on line " +
                    std::to_string(it->second));
    seen.emplace(key, lineno);
    table.rows.push_back({f[0], f[1], *n, *y});
  }
  if (table.rows.empty()) table.warnings.push_back("counts input has a header but no data rows");
  for (const auto& r : table.rows)
    if (r.n == 0) table.warnings.push_back("region '" + r.region_id + "' (" + r.stratum + ") has zero trials");
  return table;
}

CountTable load_counts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open counts file '" + path + "'");
  auto table = load_counts(in);
  table.provenance = path;
  return table;
}

void write_counts(std::ostream& out, const CountTable& table) {
  out << "region_id,stratum,n,y\n";
  for (const auto& r : table.rows) out << r.region_id << ',' << r.stratum << ',' << r.n << ',' << r.y << '\n';
}

// ---------------------------------------------------------------------------

std::optional<InformativenessConstraint> FitConfig::constraint() const {
  if (!a0_max) return std::nullopt;
  return InformativenessConstraint{a0_min, *a0_max};
}

std::string FitConfig::canonical() const {
  std::ostringstream os;
  os << "model=" << model.value_or("") << '\n'
     << "seed=" << chain.seed << '\n'
     << "stream=" << chain.stream << '\n'
     << "iterations=" << chain.iterations << '\n'
     << "burn-in=" << chain.burn_in << '\n'
     << "thin=" << chain.thin << '\n'
     << "adapt-window=" << (chain.adapt_window ? std::to_string(*chain.adapt_window) : "") << '\n'
     << "constrain-a0=" << (a0_max ? format_number(*a0_max) : "") << '\n'
     << "a0-min=" << format_number(a0_min) << '\n'
     << "m0=" << m0 << '\n'
     << "sigma2-prior=" << format_number(sigma2_prior.shape) << ',' << format_number(sigma2_prior.scale) << '\n'
     << "tau2-prior=" << format_number(tau2_prior.shape) << ',' << format_number(tau2_prior.scale) << '\n'
     << "a-range=" << format_number(a_lo) << ',' << format_number(a_hi) << '\n'
     << "stratum=" << stratum.value_or("") << '\n'
     << "quantiles=";
  for (std::size_t i = 0; i < quantiles.size(); ++i) os << (i ? "," : "") << format_number(quantiles[i]);
  os << '\n';
  return os.str();
}

FitConfig parse_config(std::istream& in, FitConfig base) {
  CLI::ConfigBase reader;
  reader.comment('#')->valueSeparator('=')->arrayBounds('[', ']')->arrayDelimiter(',');
  std::vector<CLI::ConfigItem> items;
  try {
    items = reader.from_config(in);
  } catch (const std::exception& e) {
    throw IoError(std::string("config: ") + e.what());
  }

  FitConfig cfg = std::move(base);
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key = item.fullname();
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return c == '_' ? '-' : static_cast<char>(std::tolower(c)); });

    std::vector<std::string> values;
    for (const auto& raw : item.inputs)
      for (auto& part : split_csv(raw))
        if (!part.empty()) values.push_back(part);
    const std::string joined = join(values, ",");
    auto bad = [&](const char* what) { return IoError("config key '" + key + "': " + what + " (got '" + joined + "')"); };
    auto one_double = [&]() {
      if (values.size() != 1) throw bad("expected one number");
      const auto v = parse_double(values[0]);
      if (!v || std::isnan(*v)) throw bad("expected a number");
      return *v;
    };
    auto one_count = [&]() -> std::uint64_t {
      if (values.size() != 1) throw bad("expected one integer");
      const auto v = parse_integer(values[0]);
      if (!v || *v < 0) throw bad("expected a non-negative integer");
      return static_cast<std::uint64_t>(*v);
    };

    if (key == "model") {
      if (values.size() != 1) throw bad("expected one model name");
      cfg.model = values[0];
    } else if (key == "seed") {
      cfg.chain.seed = one_count();
    } else if (key == "iterations") {
      cfg.chain.iterations = one_count();
    } else if (key == "burn-in") {
      cfg.chain.burn_in = one_count();
    } else if (key == "thin") {
      cfg.chain.thin = one_count();
    } else if (key == "adapt-window") {
      cfg.chain.adapt_window = one_count();
    } else if (key == "constrain-a0") {
      cfg.a0_max = one_double();
    } else if (key == "a0-min") {
      cfg.a0_min = one_double();
    } else if (key == "m0") {
      cfg.m0 = static_cast<int>(one_count());
    } else if (key == "sigma2-shape") {
      cfg.sigma2_prior.shape = one_double();
    } else if (key == "sigma2-scale") {
      cfg.sigma2_prior.scale = one_double();
    } else if (key == "tau2-shape") {
      cfg.tau2_prior.shape = one_double();
    } else if (key == "tau2-scale") {
      cfg.tau2_prior.scale = one_double();
    } else if (key == "a-lo") {
      cfg.a_lo = one_double();
    } else if (key == "a-hi") {
      cfg.a_hi = one_double();
    } else if (key == "stratum") {
      if (values.size() != 1) throw bad("expected one stratum");
      cfg.stratum = values[0];
    } else if (key == "quantiles") {
      if (values.empty()) throw bad("expected a list of probabilities");
      cfg.quantiles.clear();
      for (const auto& v : values) {
        const auto p = parse_double(v);
        if (!p || !(*p > 0.0 && *p < 1.0)) throw bad("probabilities must lie in (0, 1)");
        cfg.quantiles.push_back(*p);
      }
    } else {
      throw IoError("config: unknown key '" + item.fullname() + "'");
    }
  }
  return cfg;
}

FitConfig parse_config_file(const std::string& path, FitConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Metadata fit_metadata(const FitResult& fit, const FitConfig& config) {
  const auto& c = fit.samples.config;
  Metadata m;
  m.emplace_back("software", std::string("carinfo ") + kVersion);
  m.emplace_back("model", std::string(model_name(fit.kind)));
  m.emplace_back("stratum", fit.stratum);
  m.emplace_back("regions", std::to_string(fit.regions()));
  m.emplace_back("seed", std::to_string(c.seed));
  m.emplace_back("stream", std::to_string(c.stream));
  m.emplace_back("iterations", std::to_string(c.iterations));
  m.emplace_back("burn_in", std::to_string(c.burn_in));
  m.emplace_back("thin", std::to_string(c.thin));
  m.emplace_back("adapt_window", std::to_string(c.adaptation_iterations()));
  m.emplace_back("draws", std::to_string(fit.draws()));
  m.emplace_back("config_hash", config_hash(config.canonical()));
  m.emplace_back("constrained", fit.constraint ? "true" : "false");
  m.emplace_back("a0_min", fit.constraint ? format_number(fit.constraint->a0_min) : "NA");
  m.emplace_back("a0_max", fit.constraint ? format_number(fit.constraint->a0_max) : "NA");
  if (fit.kind == ModelKind::car) m.emplace_back("m0", std::to_string(fit.m0));
  m.emplace_back("informativeness_column", fit.informativeness_column);
  for (const auto& a : fit.diagnostics.acceptance) m.emplace_back("acceptance." + a.name, format_number(a.rate()));
  return m;
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << k << " = " << v << '\n';
}

Metadata load_metadata(std::istream& in) {
  Metadata meta;
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw IoError(at_line(lineno) + "expected 'key = value'");
    meta.emplace_back(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return meta;
}

void write_samples_csv(std::ostream& out, const PosteriorSamples& samples) {
  out << join(samples.names(), ",") << '\n';
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const auto row = samples.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

PosteriorSamples load_samples_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> names;
  while (names.empty() && read_line(in, line)) {
    ++lineno;
    if (!trim(line).empty()) names = split_csv(line);
  }
  if (names.empty()) throw IoError("samples input is empty");

  std::vector<std::vector<double>> rows;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != names.size())
      throw IoError(at_line(lineno) + "expected " + std::to_string(names.size()) + " fields, found " + std::to_string(f.size()));
    std::vector<double> row;
    row.reserve(f.size());
    for (const auto& s : f) {
      const auto v = parse_double(s);
      if (!v) throw IoError(at_line(lineno) + "non-numeric value '" + s + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  PosteriorSamples samples(names, rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), samples.row(r).begin());
  return samples;
}

FitResult fit_from_samples(PosteriorSamples samples, ModelKind kind) {
  FitResult fit;
  fit.kind = kind;
  for (const auto& name : samples.names())
    if (name.size() > 4 && name.starts_with("pi[") && name.back() == ']') fit.region_ids.push_back(name.substr(3, name.size() - 4));
  if (fit.region_ids.empty()) throw IoError("samples carry no 'pi[...]' columns");
  fit.n.assign(fit.region_ids.size(), 0);
  fit.y.assign(fit.region_ids.size(), 0);
  const char* column = kind == ModelKind::beta_binomial ? "a" : kind == ModelKind::logitnormal ? "a_hat" : "a_hat0";
  if (!samples.find(column)) throw IoError(std::string("samples lack the informativeness column '") + column + "'");
  fit.informativeness_column = column;
  fit.samples = std::move(samples);
  return fit;
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  const auto& col = table.informativeness_column;
  out << "region_id,n,y,crude_rate,mean,sd";
  for (double p : table.probs) out << ',' << prob_label(p);
  out << ',' << col << "_mean," << col << "_median," << col << "_q0.025," << col << "_q0.975\n";
  const auto& inf = table.informativeness;
  const std::string inf_cols =
      format_number(inf.mean) + ',' + format_number(inf.median) + ',' + format_number(inf.q025) + ',' + format_number(inf.q975);
  for (const auto& r : table.rows) {
    out << r.region_id << ',' << r.n << ',' << r.y << ',' << format_optional(r.crude_rate) << ',' << format_number(r.mean) << ','
        << format_number(r.sd);
    for (double q : r.quantiles) out << ',' << format_number(q);
    out << ',' << inf_cols << '\n';
  }
}

void write_disparity_csv(std::ostream& out, const std::vector<DisparityEstimate>& rows) {
  out << "region_id,ratio_mean,ratio_median,ratio_q0.025,ratio_q0.975,significant\n";
  for (const auto& r : rows)
    out << r.region_id << ',' << format_number(r.mean) << ',' << format_number(r.median) << ',' << format_number(r.q025) << ','
        << format_number(r.q975) << ',' << (r.significant ? "true" : "false") << '\n';
}

void write_diagnostics_csv(std::ostream& out, const Diagnostics& diagnostics) {
  out << "parameter,ess,degenerate,geweke_z\n";
  for (const auto& p : diagnostics.parameters)
    out << p.name << ',' << format_number(p.ess) << ',' << (p.degenerate ? "true" : "false") << ',' << format_number(p.geweke_z) << '\n';
}

void write_study_replicates_csv(std::ostream& out, const StudyResult& study) {
  out << "cell,regions,a,pi0,replicate,model,ok,informativeness,pi0_estimate,error\n";
  for (const auto& cell : study.cells) {
    const auto& s = cell.scenario;
    for (const auto& rep : cell.replicates) {
      for (const auto* est : {&rep.beta, &rep.logitnormal}) {
        std::string err = est->error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << s.index << ',' << s.regions << ',' << format_number(s.a) << ',' << format_number(s.pi0) << ',' << rep.replicate << ','
            << (est == &rep.beta ? "beta-binomial" : "logitnormal") << ',' << (est->ok ? "true" : "false") << ','
            << (est->ok ? format_number(est->informativeness) : "NA") << ',' << (est->ok ? format_number(est->pi0) : "NA") << ','
            << err << '\n';
      }
    }
  }
}

void write_study_cells_csv(std::ostream& out, const StudyResult& study) {
  const auto a_cmp = rmse_ratio(study, StudyTarget::informativeness);
  const auto p_cmp = rmse_ratio(study, StudyTarget::pi0);
  out << "cell,regions,a,pi0,used,mean_a_beta,mean_a_logitnormal,mean_pi0_beta,mean_pi0_logitnormal,"
         "rmse_a_beta,rmse_a_logitnormal,rmse_ratio_a,rmse_pi0_beta,rmse_pi0_logitnormal,rmse_ratio_pi0\n";
  for (std::size_t i = 0; i < study.cells.size(); ++i) {
    const auto& cell = study.cells[i];
    const auto& s = cell.scenario;
    double sums[4] = {0, 0, 0, 0};
    std::size_t used = 0;
    for (const auto& rep : cell.replicates) {
      if (!rep.beta.ok || !rep.logitnormal.ok) continue;
      ++used;
      sums[0] += rep.beta.informativeness;
      sums[1] += rep.logitnormal.informativeness;
      sums[2] += rep.beta.pi0;
      sums[3] += rep.logitnormal.pi0;
    }
    out << s.index << ',' << s.regions << ',' << format_number(s.a) << ',' << format_number(s.pi0) << ',' << used;
    for (double v : sums) out << ',' << (used ? format_number(v / static_cast<double>(used)) : "NA");
    for (const auto* cmp : {&a_cmp[i], &p_cmp[i]}) {
      const bool any = cmp->used > 0;
      out << ',' << (any ? format_number(cmp->rmse_beta) : "NA") << ',' << (any ? format_number(cmp->rmse_logitnormal) : "NA") << ','
          << (cmp->defined ? format_number(cmp->ratio) : "NA");
    }
    out << '\n';
  }
}

std::vector<std::filesystem::path> write_results(const ResultBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));

  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const auto& writer) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    writer(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
    written.push_back(path);
  };

  if (bundle.fit) {
    emit("samples.csv", [&](std::ostream& o) { write_samples_csv(o, bundle.fit->samples); });
    emit("diagnostics.csv", [&](std::ostream& o) { write_diagnostics_csv(o, bundle.fit->diagnostics); });
  }
  if (bundle.summary) emit("summary.csv", [&](std::ostream& o) { write_summary_csv(o, *bundle.summary); });
  if (bundle.disparities) emit("disparity.csv", [&](std::ostream& o) { write_disparity_csv(o, *bundle.disparities); });
  if (bundle.study) {
    emit("study_replicates.csv", [&](std::ostream& o) { write_study_replicates_csv(o, *bundle.study); });
    emit("study_cells.csv", [&](std::ostream& o) { write_study_cells_csv(o, *bundle.study); });
  }
  emit("metadata.txt", [&](std::ostream& o) { write_metadata(o, bundle.metadata); });
  return written;
}

}  // namespace carinfo
