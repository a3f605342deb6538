#pragma once

// Library side of the `ccd` command-line tool: CSV ingestion, the default
// significance schedules, replicated benchmark runs and JSON reports.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccd/core.hpp"
#include "ccd/metrics.hpp"
#include "ccd/pipeline.hpp"
#include "ccd/synth.hpp"

namespace ccd::harness {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  PointSet points;
  std::optional<std::vector<int>> labels;  // from a column named `label`
  std::vector<std::string> label_names;     // raw label text per id
  std::vector<std::string> header;          // feature column names, if any
};

/// Comma-separated numeric rows. The first row is a header when any of its
/// cells is non-numeric; a header column named `label` is read as class ids
/// (text labels are numbered by first appearance). With `normalize`, each
/// feature is centered and scaled to unit population variance; constant
/// columns are only centered.
CsvTable read_csv(std::istream& in, bool normalize);
CsvTable ingest_csv(const std::string& path, bool normalize);

PointSet zscore(const PointSet& ps);

void write_csv(std::ostream& out, const PointSet& ps,
               const std::vector<int>* labels = nullptr);

// Single-column label file, or the `label` column of a wider file.
std::vector<int> read_labels(const std::string& path);

// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// Configuration

/// Default significance levels by dimension. UN: 0.15 / 0.10 / 0.05 / 0.01 /
/// 0.001 at d = 2 / 3 / 5 / 10 / 20 (nearest tabulated d, ties to the lower);
/// RK: 0.01 for d < 10 and 0.001 otherwise. KS has no test and returns 0.
double schedule_alpha(Method m, std::size_t dim);

// Monte Carlo config for one method; the replicate count is raised to
// min_replicates(alpha) when it is too small to resolve alpha.
SrtConfig resolve_srt(double alpha, std::size_t mc_replicates, bool descending,
                      std::uint64_t seed);

struct RunConfig {
  synth::SimSpec spec;
  std::vector<Method> methods{Method::UN};
  std::optional<double> alpha;  // empty: per-dimension schedule
  std::size_t mc_replicates = 999;
  bool descending = false;
  bool flexible = false;
  bool rk_include_center = true;
  std::optional<double> delta_root;  // KS: fixed d-th root of delta
  std::vector<double> delta_grid;    // KS: d-th roots searched by silhouette
  std::size_t replicates = 50;
  std::uint64_t seed = 0;
  bool timing = true;

  // Throws ConfigError on inconsistent settings.
  void validate() const;
};

RunConfig parse_run_config(const json& j);
json to_json(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Runs

struct ReplicateRow {
  std::size_t replicate = 0;
  std::uint64_t data_seed = 0;
  std::size_t k_hat = 0;
  double ari = 0.0;
  double sil = 0.0;
  // Scores over the non-noise points only; set when the dataset has noise.
  std::optional<double> ari_regular;
  std::optional<double> sil_regular;
  std::optional<double> delta_root;
  std::optional<double> runtime_ms;
};

struct MethodSummary {
  Method method = Method::UN;
  std::optional<double> alpha;
  std::optional<std::size_t> mc_replicates;
  std::vector<ReplicateRow> rows;
  double mean_ari = 0.0;
  double mean_sil = 0.0;
  double success_rate = 0.0;
  std::optional<double> mean_ari_regular;
  std::optional<double> mean_sil_regular;
};

struct RunReport {
  RunConfig config;
  std::uint64_t mc_seed = 0;
  std::vector<MethodSummary> methods;

  const MethodSummary& summary(Method m) const;
};

// Seed of the dataset for replicate i, and the Monte Carlo seed shared by all
// replicates of a run.
std::uint64_t dataset_seed(std::uint64_t run_seed, std::size_t replicate);
std::uint64_t monte_carlo_seed(std::uint64_t run_seed);

struct KsSearch {
  Clustering clustering;
  double delta_root = 0.0;
};

// Runs KS at each d-th root of delta and keeps the clustering with the
// highest average silhouette (ties to the earlier grid value).
KsSearch ks_grid_search(const PointSet& ps, const DistanceMatrix& dm,
                        std::span<const double> delta_roots, bool flexible);

RunReport run_bench(const RunConfig& cfg);

// Recomputes the means and the success rate from the rows.
void aggregate(MethodSummary& summary, std::size_t k_true);

json to_json(const RunReport& report);
std::string rows_csv(const RunReport& report);

// Aligned columns: method, alpha, N, mean ARI, mean Sil, SR.
std::string summary_text(const RunReport& report);

// ---------------------------------------------------------------------------
// Single-file clustering and evaluation

struct ClusterRequest {
  std::string input;
  bool normalize = false;
  std::vector<Method> methods{Method::UN};
  std::optional<double> alpha = 0.01;  // empty: per-dimension schedule
  std::size_t mc_replicates = 999;
  std::vector<double> delta_roots;
  std::uint64_t seed = 0;
  bool flexible = false;
  bool descending = false;
  bool rk_include_center = true;
};

json run_cluster(const ClusterRequest& req);

json evaluate(const std::string& pred_path, const std::string& truth_path,
              const std::string& data_path);
json to_json(const ValidationReport& r);

}  // namespace ccd::harness
