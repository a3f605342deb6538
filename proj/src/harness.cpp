#include "ccd/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "ccd/errors.hpp"
#include "ccd/parallel.hpp"
#include "ccd/rng.hpp"

namespace ccd::harness {

namespace {

// Sub-stream tags under the run seed.
constexpr std::uint64_t kDatasetStream = 11;
constexpr std::uint64_t kMonteCarloStream = 12;

struct Line {
  std::size_t row;  // 1-based line number in the file
  std::vector<std::string> cells;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Line> split_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string text;
  std::size_t row = 0;
  while (std::getline(in, text)) {
    ++row;
    if (trim(text).empty()) continue;
    Line line{row, {}};
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) line.cells.push_back(trim(cell));
    if (!text.empty() && text.back() == ',') line.cells.emplace_back();
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw InputError("empty CSV input");
  return lines;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool all_numeric(const std::vector<std::string>& cells) {
  double v = 0.0;
  return std::all_of(cells.begin(), cells.end(),
                     [&](const std::string& c) { return parse_double(c, v); });
}

bool parse_int(const std::string& s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

// Integer labels are kept as written; anything else is numbered by first
// appearance.
std::vector<int> encode_labels(const std::vector<std::string>& raw,
                               std::vector<std::string>& names) {
  std::vector<int> ids(raw.size());
  bool integral = true;
  for (std::size_t i = 0; i < raw.size() && integral; ++i) integral = parse_int(raw[i], ids[i]);
  names.clear();
  if (integral) {
    std::map<int, std::string> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) seen.emplace(ids[i], raw[i]);
    for (const auto& [id, name] : seen) names.push_back(name);
    return ids;
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, fresh] = index.try_emplace(raw[i], static_cast<int>(names.size()));
    if (fresh) names.push_back(raw[i]);
    ids[i] = it->second;
  }
  return ids;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<int> labels_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  auto lines = split_lines(in);
  std::size_t column = 0;
  std::size_t start = 0;
  const auto& head = lines.front().cells;
  if (!all_numeric(head)) {
    const auto it = std::find(head.begin(), head.end(), "label");
    if (it != head.end()) {
      column = static_cast<std::size_t>(it - head.begin());
      start = 1;
    } else if (head.size() == 1) {
      start = 1;
    } else {
      throw InputError("'" + path + "' has no `label` column");
    }
  } else if (head.size() != 1) {
    throw InputError("'" + path + "' has several columns but no `label` header");
  }
  std::vector<std::string> raw;
  for (std::size_t i = start; i < lines.size(); ++i) {
    if (lines[i].cells.size() != head.size()) {
      throw ParseError(lines[i].row, "expected " + std::to_string(head.size()) + " cells, got " +
                                         std::to_string(lines[i].cells.size()));
    }
    raw.push_back(lines[i].cells[column]);
  }
  if (raw.empty()) throw InputError("'" + path + "' holds no labels");
  std::vector<std::string> names;
  return encode_labels(raw, names);
}

std::vector<Method> parse_methods(const std::string& name) {
  std::string low;
  for (char c : name) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (low == "all") return {Method::UN, Method::RK, Method::KS};
  return {parse_method(name)};
}

bool has(const std::vector<Method>& ms, Method m) {
  return std::find(ms.begin(), ms.end(), m) != ms.end();
}

double resolved_alpha(const std::optional<double>& alpha, Method m, std::size_t dim) {
  return alpha ? *alpha : schedule_alpha(m, dim);
}

template <typename E>
[[noreturn]] void rethrow_with_seed(const E& e, std::uint64_t seed) {
  throw E("dataset seed " + std::to_string(seed) + ": " + e.what());
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

void score_regular(const synth::LabeledDataset& ds, const std::vector<int>& labels,
                   ReplicateRow& row) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (ds.true_labels[i] != static_cast<int>(ds.k_true)) keep.push_back(i);
  }
  std::vector<int> pred;
  std::vector<int> truth;
  for (std::size_t i : keep) {
    pred.push_back(labels[i]);
    truth.push_back(ds.true_labels[i]);
  }
  row.ari_regular = adjusted_rand_index(pred, truth);
  row.sil_regular =
      count_clusters(pred) >= 2 ? avg_silhouette(ds.points.subset(keep), pred) : 0.0;
}

json ball_json(const CoveringBall& b) {
  return {{"center", b.center}, {"radius", b.radius}};
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV

PointSet zscore(const PointSet& ps) {
  const std::size_t n = ps.size();
  const std::size_t dim = ps.dim();
  std::vector<double> coords = ps.coords();
  for (std::size_t a = 0; a < dim; ++a) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += coords[i * dim + a];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = coords[i * dim + a] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double& v = coords[i * dim + a];
      v -= mean;
      if (sd > 0.0) v /= sd;
    }
  }
  return PointSet(n, dim, std::move(coords));
}

CsvTable read_csv(std::istream& in, bool normalize) {
  auto lines = split_lines(in);
  const std::size_t width = lines.front().cells.size();
  std::vector<std::string> header;
  std::size_t start = 0;
  std::optional<std::size_t> label_col;
  if (!all_numeric(lines.front().cells)) {
    header = lines.front().cells;
    start = 1;
    const auto it = std::find(header.begin(), header.end(), "label");
    if (it != header.end()) {
      label_col = static_cast<std::size_t>(it - header.begin());
      header.erase(it);
    }
  }
  const std::size_t dim = width - (label_col ? 1 : 0);
  if (dim == 0) throw InputError("CSV has no feature columns");
  if (start == lines.size()) throw InputError("CSV has a header but no data rows");

  std::vector<double> coords;
  coords.reserve((lines.size() - start) * dim);
  std::vector<std::string> raw_labels;
  for (std::size_t i = start; i < lines.size(); ++i) {
    const Line& line = lines[i];
    if (line.cells.size() != width) {
      throw ParseError(line.row, "expected " + std::to_string(width) + " cells, got " +
                                     std::to_string(line.cells.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) {
        raw_labels.push_back(line.cells[c]);
        continue;
      }
      double v = 0.0;
      if (!parse_double(line.cells[c], v)) {
        throw ParseError(line.row, "non-numeric cell '" + line.cells[c] + "' in column " +
                                       std::to_string(c + 1));
      }
      if (!std::isfinite(v)) throw ParseError(line.row, "non-finite value in column " + std::to_string(c + 1));
      coords.push_back(v);
    }
  }

  const std::size_t n = lines.size() - start;
  CsvTable table{PointSet(n, dim, std::move(coords)), std::nullopt, {}, std::move(header)};
  if (label_col) table.labels = encode_labels(raw_labels, table.label_names);
  if (normalize) table.points = zscore(table.points);
  return table;
}

CsvTable ingest_csv(const std::string& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in, normalize);
}

void write_csv(std::ostream& out, const PointSet& ps, const std::vector<int>* labels) {
  if (labels && labels->size() != ps.size()) {
    throw InputError("label count does not match point count");
  }
  for (std::size_t a = 0; a < ps.dim(); ++a) out << (a ? "," : "") << 'x' << a;
  if (labels) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = ps.point(i);
    for (std::size_t a = 0; a < p.size(); ++a) out << (a ? "," : "") << format_double(p[a]);
    if (labels) out << ',' << (*labels)[i];
    out << '\n';
  }
}

std::vector<int> read_labels(const std::string& path) { return labels_from_file(path); }

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InputError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot replace '" + path + "'");
  }
}

// ---------------------------------------------------------------------------
// Configuration

double schedule_alpha(Method m, std::size_t dim) {
  switch (m) {
    case Method::UN: {
      static constexpr std::pair<std::size_t, double> kTable[] = {
          {2, 0.15}, {3, 0.10}, {5, 0.05}, {10, 0.01}, {20, 0.001}};
      auto best = kTable[0];
      for (const auto& entry : kTable) {
        const auto gap = [&](std::size_t d) { return d > dim ? d - dim : dim - d; };
        if (gap(entry.first) < gap(best.first)) best = entry;
      }
      return best.second;
    }
    case Method::RK:
      return dim < 10 ? 0.01 : 0.001;
    case Method::KS:
      return 0.0;
  }
  return 0.0;
}

SrtConfig resolve_srt(double alpha, std::size_t mc_replicates, bool descending,
                      std::uint64_t seed) {
  SrtConfig cfg;
  cfg.alpha = alpha;
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  cfg.num_replicates = std::max(mc_replicates, min_replicates(alpha));
  cfg.descending = descending;
  cfg.rng_seed = seed;
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (methods.empty()) throw ConfigError("no method selected");
  if (replicates == 0) throw ConfigError("replicates must be positive");
  if (mc_replicates == 0) throw ConfigError("mc_replicates must be positive");
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (spec.n < spec.k) throw ConfigError("need at least one point per cluster");
  if (!(spec.noise_level >= 0.0 && spec.noise_level <= 1.0)) {
    throw ConfigError("noise level must lie in [0, 1]");
  }
  synth::centers(spec.dim, spec.k, spec.noise_study);
  if (!(spec.gaussian_sd_scale > 0.0)) throw ConfigError("sd_scale must be positive");
  if (has(methods, Method::KS) && !delta_root && delta_grid.empty()) {
    throw ConfigError("KS needs delta_root or a delta_grid");
  }
  if (delta_root && !(*delta_root > 0.0)) throw ConfigError("delta_root must be positive");
  for (double x : delta_grid) {
    if (!(x > 0.0)) throw ConfigError("delta_grid values must be positive");
  }
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("run spec must be a JSON object");
  static const char* kKeys[] = {"family", "d", "n", "k", "noise", "noise_study", "sd_scale",
                                "method", "methods", "alpha", "mc_replicates",
                                "descending", "flexible", "rk_include_center",
                                "delta_root", "delta_grid",
                                "replicates", "seed", "timing"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError("unknown run spec key '" + key + "'");
    }
  }
  RunConfig cfg;
  try {
    if (j.contains("family")) cfg.spec.family = synth::parse_family(j.at("family").get<std::string>());
    cfg.spec.dim = j.value("d", cfg.spec.dim);
    cfg.spec.n = j.value("n", cfg.spec.n);
    cfg.spec.k = j.value("k", cfg.spec.k);
    cfg.spec.noise_level = j.value("noise", cfg.spec.noise_level);
    cfg.spec.noise_study = j.value("noise_study", cfg.spec.noise_study);
    cfg.spec.gaussian_sd_scale = j.value("sd_scale", cfg.spec.gaussian_sd_scale);
    if (j.contains("method") && j.contains("methods")) {
      throw ConfigError("give either `method` or `methods`, not both");
    }
    if (j.contains("method")) cfg.methods = parse_methods(j.at("method").get<std::string>());
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j.at("methods")) {
        for (Method x : parse_methods(m.get<std::string>())) {
          if (!has(cfg.methods, x)) cfg.methods.push_back(x);
        }
      }
    }
    if (j.contains("alpha")) {
      const auto& a = j.at("alpha");
      if (a.is_string()) {
        if (a.get<std::string>() != "paper") throw ConfigError("alpha must be a number or \"paper\"");
        cfg.alpha.reset();
      } else {
        cfg.alpha = a.get<double>();
      }
    }
    cfg.mc_replicates = j.value("mc_replicates", cfg.mc_replicates);
    cfg.descending = j.value("descending", cfg.descending);
    cfg.flexible = j.value("flexible", cfg.flexible);
    cfg.rk_include_center = j.value("rk_include_center", cfg.rk_include_center);
    if (j.contains("delta_root") && !j.at("delta_root").is_null()) {
      cfg.delta_root = j.at("delta_root").get<double>();
    }
    if (j.contains("delta_grid")) cfg.delta_grid = j.at("delta_grid").get<std::vector<double>>();
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.timing = j.value("timing", cfg.timing);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run spec: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  json j{{"family", synth::to_string(cfg.spec.family)},
         {"d", cfg.spec.dim},
         {"n", cfg.spec.n},
         {"k", cfg.spec.k},
         {"noise", cfg.spec.noise_level},
         {"noise_study", cfg.spec.noise_study},
         {"sd_scale", cfg.spec.gaussian_sd_scale},
         {"methods", methods},
         {"mc_replicates", cfg.mc_replicates},
         {"descending", cfg.descending},
         {"flexible", cfg.flexible},
         {"rk_include_center", cfg.rk_include_center},
         {"delta_grid", cfg.delta_grid},
         {"replicates", cfg.replicates},
         {"seed", cfg.seed},
         {"timing", cfg.timing}};
  j["alpha"] = cfg.alpha ? json(*cfg.alpha) : json("paper");
  j["delta_root"] = cfg.delta_root ? json(*cfg.delta_root) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Runs

const MethodSummary& RunReport::summary(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return s;
  }
  throw InputError("report has no results for " + to_string(m));
}

std::uint64_t dataset_seed(std::uint64_t run_seed, std::size_t replicate) {
  return rng::derive(run_seed, {kDatasetStream, replicate});
}

std::uint64_t monte_carlo_seed(std::uint64_t run_seed) {
  return rng::derive(run_seed, {kMonteCarloStream});
}

KsSearch ks_grid_search(const PointSet& ps, const DistanceMatrix& dm,
                        std::span<const double> delta_roots, bool flexible) {
  if (delta_roots.empty()) throw ConfigError("KS grid search needs at least one value");
  std::optional<KsSearch> best;
  for (double root : delta_roots) {
    ClusterOptions opts;
    opts.method = Method::KS;
    opts.delta = std::pow(root, static_cast<double>(ps.dim()));
    opts.flexible = flexible;
    Clustering c = cluster(ps, dm, opts);
    if (!best || c.avg_silhouette > best->clustering.avg_silhouette) {
      best = KsSearch{std::move(c), root};
    }
  }
  return std::move(*best);
}

void aggregate(MethodSummary& summary, std::size_t k_true) {
  const auto& rows = summary.rows;
  if (rows.empty()) throw InputError("cannot aggregate an empty run");
  const auto count = static_cast<double>(rows.size());
  double ari = 0.0;
  double sil = 0.0;
  double ari_reg = 0.0;
  double sil_reg = 0.0;
  bool regular = true;
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (const auto& r : rows) {
    ari += r.ari;
    sil += r.sil;
    regular = regular && r.ari_regular && r.sil_regular;
    if (regular) {
      ari_reg += *r.ari_regular;
      sil_reg += *r.sil_regular;
    }
    runs.emplace_back(r.k_hat, k_true);
  }
  summary.mean_ari = ari / count;
  summary.mean_sil = sil / count;
  summary.success_rate = success_rate(runs);
  summary.mean_ari_regular.reset();
  summary.mean_sil_regular.reset();
  if (regular) {
    summary.mean_ari_regular = ari_reg / count;
    summary.mean_sil_regular = sil_reg / count;
  }
}

RunReport run_bench(const RunConfig& cfg) {
  cfg.validate();
  RunReport report;
  report.config = cfg;
  report.mc_seed = monte_carlo_seed(cfg.seed);

  const std::size_t dim = cfg.spec.dim;
  std::map<std::size_t, std::unique_ptr<NullTables>> tables;  // keyed by N
  std::vector<std::optional<SrtConfig>> srt(cfg.methods.size());
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    MethodSummary s;
    s.method = cfg.methods[m];
    if (s.method != Method::KS) {
      srt[m] = resolve_srt(resolved_alpha(cfg.alpha, s.method, dim), cfg.mc_replicates,
                           cfg.descending, report.mc_seed);
      srt[m]->ripley_include_center = cfg.rk_include_center;
      s.alpha = srt[m]->alpha;
      s.mc_replicates = srt[m]->num_replicates;
      auto& t = tables[srt[m]->num_replicates];
      if (!t) t = std::make_unique<NullTables>(dim, srt[m]->num_replicates, report.mc_seed);
    }
    s.rows.resize(cfg.replicates);
    report.methods.push_back(std::move(s));
  }

  parallel_for(cfg.replicates, [&](std::size_t rep) {
    synth::SimSpec spec = cfg.spec;
    spec.rng_seed = dataset_seed(cfg.seed, rep);
    try {
      const synth::LabeledDataset ds = synth::generate(spec);
      const DistanceMatrix dm = pairwise_distances(ds.points);
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const auto start = std::chrono::steady_clock::now();
        ReplicateRow row;
        row.replicate = rep;
        row.data_seed = spec.rng_seed;
        Clustering c;
        if (cfg.methods[m] == Method::KS) {
          const std::vector<double> grid =
              cfg.delta_root ? std::vector<double>{*cfg.delta_root} : cfg.delta_grid;
          KsSearch found = ks_grid_search(ds.points, dm, grid, cfg.flexible);
          c = std::move(found.clustering);
          row.delta_root = found.delta_root;
        } else {
          ClusterOptions opts;
          opts.method = cfg.methods[m];
          opts.srt = *srt[m];
          opts.flexible = cfg.flexible;
          c = cluster(ds.points, dm, opts, tables.at(opts.srt.num_replicates).get());
        }
        row.k_hat = c.k_hat;
        row.ari = adjusted_rand_index(c.labels, ds.true_labels);
        row.sil = c.avg_silhouette;
        if (ds.noise_count > 0) score_regular(ds, c.labels, row);
        if (cfg.timing) row.runtime_ms = elapsed_ms(start);
        report.methods[m].rows[rep] = row;
      }
    } catch (const ConfigError& e) {
      rethrow_with_seed(e, spec.rng_seed);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      rethrow_with_seed(e, spec.rng_seed);
    } catch (const InvariantError& e) {
      rethrow_with_seed(e, spec.rng_seed);
    }
  });

  for (auto& s : report.methods) aggregate(s, cfg.spec.k);
  return report;
}

json to_json(const RunReport& report) {
  json methods = json::array();
  for (const auto& s : report.methods) {
    json rows = json::array();
    for (const auto& r : s.rows) {
      json row{{"replicate", r.replicate}, {"data_seed", r.data_seed}, {"k_hat", r.k_hat},
               {"ari", r.ari}, {"sil", r.sil}};
      if (r.ari_regular) row["ari_regular"] = *r.ari_regular;
      if (r.sil_regular) row["sil_regular"] = *r.sil_regular;
      if (r.delta_root) row["delta_root"] = *r.delta_root;
      if (r.runtime_ms) row["runtime_ms"] = *r.runtime_ms;
      rows.push_back(std::move(row));
    }
    json m{{"method", to_string(s.method)},
           {"mean_ari", s.mean_ari},
           {"mean_sil", s.mean_sil},
           {"success_rate", s.success_rate},
           {"rows", std::move(rows)}};
    if (s.mean_ari_regular) m["mean_ari_regular"] = *s.mean_ari_regular;
    if (s.mean_sil_regular) m["mean_sil_regular"] = *s.mean_sil_regular;
    m["alpha"] = s.alpha ? json(*s.alpha) : json(nullptr);
    m["mc_replicates"] = s.mc_replicates ? json(*s.mc_replicates) : json(nullptr);
    methods.push_back(std::move(m));
  }
  return {{"config", to_json(report.config)}, {"mc_seed", report.mc_seed},
          {"methods", std::move(methods)}};
}

std::string rows_csv(const RunReport& report) {
  std::ostringstream out;
  out << "method,replicate,data_seed,k_hat,ari,sil,ari_regular,sil_regular,delta_root,"
         "runtime_ms\n";
  for (const auto& s : report.methods) {
    for (const auto& r : s.rows) {
      out << to_string(s.method) << ',' << r.replicate << ',' << r.data_seed << ',' << r.k_hat
          << ',' << format_double(r.ari) << ',' << format_double(r.sil) << ','
          << (r.ari_regular ? format_double(*r.ari_regular) : "") << ','
          << (r.sil_regular ? format_double(*r.sil_regular) : "") << ','
          << (r.delta_root ? format_double(*r.delta_root) : "") << ','
          << (r.runtime_ms ? format_double(*r.runtime_ms) : "") << '\n';
    }
  }
  return out.str();
}

std::string summary_text(const RunReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "method" << std::right << std::setw(10) << "alpha"
      << std::setw(8) << "N" << std::setw(10) << "ARI" << std::setw(10) << "Sil"
      << std::setw(8) << "SR" << '\n';
  out << std::fixed;
  for (const auto& s : report.methods) {
    out << std::left << std::setw(8) << to_string(s.method) << std::right << std::setw(10);
    if (s.alpha) {
      out << std::setprecision(3) << *s.alpha;
    } else {
      out << "-";
    }
    out << std::setw(8);
    if (s.mc_replicates) {
      out << *s.mc_replicates;
    } else {
      out << "-";
    }
    out << std::setprecision(3) << std::setw(10) << s.mean_ari << std::setw(10) << s.mean_sil
        << std::setw(8) << s.success_rate << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Single-file clustering and evaluation

json run_cluster(const ClusterRequest& req) {
  if (req.methods.empty()) throw ConfigError("no method selected");
  if (has(req.methods, Method::KS) && req.delta_roots.empty()) {
    throw ConfigError("KS needs --delta-root");
  }
  for (double x : req.delta_roots) {
    if (!(x > 0.0)) throw ConfigError("delta roots must be positive");
  }
  const CsvTable table = ingest_csv(req.input, req.normalize);
  const PointSet& ps = table.points;
  if (ps.size() < 2) throw InputError("clustering needs at least 2 points");
  const DistanceMatrix dm = pairwise_distances(ps);

  json results = json::array();
  for (Method m : req.methods) {
    json r{{"method", to_string(m)}};
    Clustering c;
    if (m == Method::KS) {
      KsSearch found = ks_grid_search(ps, dm, req.delta_roots, req.flexible);
      c = std::move(found.clustering);
      r["delta_root"] = found.delta_root;
      r["delta"] = std::pow(found.delta_root, static_cast<double>(ps.dim()));
    } else {
      ClusterOptions opts;
      opts.method = m;
      opts.srt = resolve_srt(resolved_alpha(req.alpha, m, ps.dim()), req.mc_replicates,
                             req.descending, req.seed);
      opts.srt.ripley_include_center = req.rk_include_center;
      opts.flexible = req.flexible;
      c = cluster(ps, dm, opts);
      r["alpha"] = opts.srt.alpha;
      r["mc_replicates"] = opts.srt.num_replicates;
    }
    r["k_hat"] = c.k_hat;
    r["avg_silhouette"] = c.avg_silhouette;
    if (c.k_hat < 2) r["warning"] = "single cluster: silhouette undefined, reported as 0";
    if (table.labels) r["ari"] = adjusted_rand_index(c.labels, *table.labels);
    json balls = json::array();
    for (const auto& b : c.dominating_balls) balls.push_back(ball_json(b));
    r["balls"] = std::move(balls);
    r["labels"] = c.labels;
    results.push_back(std::move(r));
  }

  json out{{"input", req.input},
           {"n", ps.size()},
           {"d", ps.dim()},
           {"normalize", req.normalize},
           {"seed", req.seed},
           {"flexible", req.flexible},
           {"descending", req.descending},
           {"rk_include_center", req.rk_include_center},
           {"results", std::move(results)}};
  out["alpha"] = req.alpha ? json(*req.alpha) : json("paper");
  if (table.labels) out["k_true"] = count_clusters(*table.labels);
  return out;
}

json to_json(const ValidationReport& r) {
  json j{{"ari", r.ari}, {"avg_silhouette", r.avg_silhouette}, {"k_hat", r.k_hat},
         {"silhouette_defined", r.silhouette_defined}};
  if (r.k_true) j["k_true"] = *r.k_true;
  if (r.success) j["success"] = *r.success;
  if (!r.silhouette_defined) j["warning"] = "single predicted cluster: silhouette reported as 0";
  return j;
}

json evaluate(const std::string& pred_path, const std::string& truth_path,
              const std::string& data_path) {
  const auto pred = read_labels(pred_path);
  const auto truth = read_labels(truth_path);
  const CsvTable data = ingest_csv(data_path, false);
  if (pred.size() != truth.size() || pred.size() != data.points.size()) {
    throw InputError("row counts differ: pred " + std::to_string(pred.size()) + ", truth " +
                     std::to_string(truth.size()) + ", data " +
                     std::to_string(data.points.size()));
  }
  json j = to_json(validate(pairwise_distances(data.points), pred, truth));
  j["n"] = pred.size();
  return j;
}

}  // namespace ccd::harness
