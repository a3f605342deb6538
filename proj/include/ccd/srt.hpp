#pragma once

// Radius determination for covering balls: the Monte Carlo spatial
// randomness test on nearest-neighbor distances (UN), the Ripley's K
// envelope test (RK), and the KS-type statistic maximization (KS).
//
// Both Monte Carlo tests are scale free: replicates are simulated once in the
// unit d-ball and observed statistics are divided by the window radius. The
// replicate for (dim, m, j) is drawn from sub-stream {dim, m, j} of the seed,
// so a test outcome depends only on (local points, radius, config).

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "ccd/core.hpp"

namespace ccd {

struct SrtConfig {
  double alpha = 0.05;
  std::size_t num_replicates = 999;
  bool descending = false;
  std::uint64_t rng_seed = 0;
  // RK radius search: test the ball center together with the interior
  // points. The NND test always excludes the center.
  bool ripley_include_center = true;

  // Throws ConfigError unless 0 < alpha < 1 and
  // num_replicates >= min_replicates(alpha).
  void validate() const;
};

// Smallest replicate count that can resolve a lower tail of alpha / 2:
// ceil(2 / alpha).
std::size_t min_replicates(double alpha);

// Volume of the d-ball of the given radius.
double ball_volume(std::size_t dim, double radius);

// ---------------------------------------------------------------------------
// Nearest-neighbor distance test

struct NndSummary {
  double mean = 0.0;
  double median = 0.0;  // lower median for even counts
};

std::vector<double> nearest_neighbor_distances(const PointSet& local);
NndSummary summarize_nnd(std::span<const double> nnd);

// Throws InputError when `local` has fewer than 2 points.
NndSummary nnd_statistics(const PointSet& local);

/// Holm step-down: sort p ascending, compare the i-th smallest to
/// alpha / (m - i), stop at the first failure. Returns per-hypothesis
/// rejections in input order.
std::vector<bool> holm_step_down(std::span<const double> p, double alpha);

struct SrtOutcome {
  double mean_nnd = 0.0;
  double median_nnd = 0.0;
  double p_mean = 1.0;
  double p_median = 1.0;
  bool reject = false;
  // True when the test could not be run (fewer than 2 points or a zero
  // radius window); such outcomes never reject.
  bool vacuous = false;
};

// Sorted unit-ball replicate statistics for m points in R^dim.
class NndNull {
 public:
  static NndNull simulate(std::size_t dim, std::size_t m,
                          std::size_t replicates, std::uint64_t seed);

  std::size_t replicates() const noexcept { return means_.size(); }

  // (1 + #{replicates <= observed}) / (N + 1), observed in unit-ball scale.
  double p_mean(double observed) const;
  double p_median(double observed) const;

 private:
  std::vector<double> means_;
  std::vector<double> medians_;
};

// ---------------------------------------------------------------------------
// Ripley's K test

inline constexpr std::size_t kRipleyGridSize = 10;

// Grid index k in [1, kRipleyGridSize] of the smallest threshold t_k = k/G
// with scaled_distance <= t_k, or kRipleyGridSize + 1 past the last one.
std::size_t ripley_grid_bin(double scaled_distance);

// K-hat(t) = volume / (n (n - 1)) * #{ordered pairs i != j : d(i, j) <= t}.
// Throws InputError when volume <= 0 or `local` has fewer than 2 points.
double ripley_k_hat(const PointSet& local, double t, double volume);

// Sorted unit-ball replicate pair counts on the fixed grid t_k = k / G.
class RipleyNull {
 public:
  static RipleyNull simulate(std::size_t dim, std::size_t m,
                             std::size_t replicates, std::uint64_t seed);

  std::size_t replicates() const noexcept { return counts_.front().size(); }

  // Order statistics used as pointwise envelopes, for grid index k in [1, G].
  std::uint64_t upper_quantile(std::size_t k, double alpha) const;
  std::uint64_t lower_quantile(std::size_t k, double alpha) const;

 private:
  std::vector<std::vector<std::uint64_t>> counts_;  // [k - 1][replicate]
};

struct RipleyEstimate {
  std::vector<double> t_grid;
  std::vector<double> k_hat;
  std::vector<double> envelope_low;   // per-t alpha quantile
  std::vector<double> envelope_high;  // per-t (1 - alpha) quantile
  bool reject = false;
  bool vacuous = false;
};

// ---------------------------------------------------------------------------

/// Lazily simulated null tables for one dimension and config, shared by every
/// radius search of a run. Safe for concurrent use.
class NullTables {
 public:
  NullTables(std::size_t dim, std::size_t replicates, std::uint64_t seed)
      : dim_(dim), replicates_(replicates), seed_(seed) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t replicates() const noexcept { return replicates_; }
  std::uint64_t seed() const noexcept { return seed_; }

  const NndNull& nnd(std::size_t m);
  const RipleyNull& ripley(std::size_t m);

 private:
  std::size_t dim_;
  std::size_t replicates_;
  std::uint64_t seed_;
  std::mutex mu_;
  std::map<std::size_t, std::unique_ptr<const NndNull>> nnd_;
  std::map<std::size_t, std::unique_ptr<const RipleyNull>> ripley_;
};

// Evaluates the NND test for nearest-neighbor distances observed inside a
// window of `radius`.
SrtOutcome evaluate_nnd(std::span<const double> nnd, double radius,
                        const NndNull& null, double alpha);

// `local` holds the points inside the ball with the center excluded.
SrtOutcome mc_srt_nnd(const PointSet& local, const CoveringBall& ball,
                      const SrtConfig& cfg);
SrtOutcome mc_srt_nnd(const PointSet& local, const CoveringBall& ball,
                      const SrtConfig& cfg, NullTables& nulls);

RipleyEstimate ripley_envelope(const PointSet& local, const CoveringBall& ball,
                               const SrtConfig& cfg, NullTables& nulls);
bool mc_srt_ripley(const PointSet& local, const CoveringBall& ball,
                   const SrtConfig& cfg);
bool mc_srt_ripley(const PointSet& local, const CoveringBall& ball,
                   const SrtConfig& cfg, NullTables& nulls);

// ---------------------------------------------------------------------------
// Radius searches. Candidates are the distances from `center` to every other
// point; the interior of a candidate ball excludes the center.

CoveringBall radius_un(std::size_t center, const DistanceMatrix& dm,
                       const SrtConfig& cfg, NullTables& nulls);
CoveringBall radius_un(std::size_t center, const PointSet& ps,
                       const SrtConfig& cfg);

// The Ripley test set includes the center unless cfg.ripley_include_center
// is cleared.
CoveringBall radius_rk(std::size_t center, const DistanceMatrix& dm,
                       const SrtConfig& cfg, NullTables& nulls);
CoveringBall radius_rk(std::size_t center, const PointSet& ps,
                       const SrtConfig& cfg);

struct KsStatistic {
  std::vector<double> radius_candidates;  // 0 followed by distinct distances
  std::vector<double> t_values;
  double delta = 0.0;
};

KsStatistic ks_statistic(std::size_t center, const DistanceMatrix& dm,
                         std::size_t dim, double delta);
CoveringBall radius_ks(std::size_t center, const DistanceMatrix& dm,
                       std::size_t dim, double delta);
CoveringBall radius_ks(std::size_t center, const PointSet& ps, double delta);

}  // namespace ccd
