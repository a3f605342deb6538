#include "ccd/srt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "ccd/errors.hpp"
#include "ccd/rng.hpp"

namespace ccd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nearest-neighbor distances of m row-major points in R^dim.
void nnd_of_coords(std::span<const double> coords, std::size_t m,
                   std::size_t dim, std::vector<double>& out) {
  out.assign(m, kInf);
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = coords.data() + i * dim;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double* b = coords.data() + j * dim;
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      out[i] = std::min(out[i], s);
      out[j] = std::min(out[j], s);
    }
  }
  for (double& v : out) v = std::sqrt(v);
}

std::size_t order_statistic_index(std::size_t n, double q) {
  // ceil(q * n) - 1, clamped into [0, n - 1]; the epsilon absorbs rounding in
  // products such as 0.95 * 1000.
  const double pos = std::ceil(q * static_cast<double>(n) - 1e-9);
  if (pos < 1.0) return 0;
  return std::min(n - 1, static_cast<std::size_t>(pos) - 1);
}

double empirical_p(const std::vector<double>& sorted, double observed) {
  const auto count = static_cast<double>(
      std::upper_bound(sorted.begin(), sorted.end(), observed) - sorted.begin());
  return (1.0 + count) / (static_cast<double>(sorted.size()) + 1.0);
}

void sample_unit_ball(std::size_t dim, std::size_t m, std::uint64_t seed,
                      std::size_t replicate, std::vector<double>& coords) {
  auto eng = rng::engine(seed, {dim, m, replicate});
  coords.resize(m * dim);
  for (std::size_t i = 0; i < m; ++i) {
    rng::uniform_in_ball(eng, 1.0, {coords.data() + i * dim, dim});
  }
}

// Ordered-pair counts per grid index for pair distances already divided by
// the window radius.
template <typename ScaledDistance>
std::vector<std::uint64_t> ripley_counts(std::size_t m, ScaledDistance&& sd) {
  std::vector<std::uint64_t> hist(kRipleyGridSize + 2, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) ++hist[ripley_grid_bin(sd(i, j))];
  }
  std::vector<std::uint64_t> cumulative(kRipleyGridSize);
  std::uint64_t running = 0;
  for (std::size_t k = 1; k <= kRipleyGridSize; ++k) {
    running += hist[k];
    cumulative[k - 1] = 2 * running;
  }
  return cumulative;
}

// Points other than the center ordered by distance (ties by index), grouped
// into levels of equal distance.
struct CandidateOrder {
  std::vector<std::size_t> order;
  std::vector<std::size_t> level_end;
  std::vector<double> level_radius;
};

CandidateOrder candidate_order(std::size_t center, const DistanceMatrix& dm) {
  if (center >= dm.size()) throw InputError("center index out of range");
  CandidateOrder c;
  const auto row = dm.row(center);
  c.order.reserve(dm.size() - 1);
  for (std::size_t j = 0; j < dm.size(); ++j) {
    if (j != center) c.order.push_back(j);
  }
  std::sort(c.order.begin(), c.order.end(), [&](std::size_t a, std::size_t b) {
    return row[a] != row[b] ? row[a] < row[b] : a < b;
  });
  for (std::size_t pos = 0; pos < c.order.size(); ++pos) {
    const double r = row[c.order[pos]];
    if (c.level_radius.empty() || r != c.level_radius.back()) {
      c.level_radius.push_back(r);
      c.level_end.push_back(pos + 1);
    } else {
      c.level_end.back() = pos + 1;
    }
  }
  return c;
}

// Ascending: return the candidate before the first rejecting one (0 if the
// first rejects, the largest if none does). Descending: return the first
// candidate that fails to reject, 0 if all reject.
template <typename RejectsAt>
double walk_candidates(const CandidateOrder& c, bool descending,
                       RejectsAt&& rejects_at) {
  const std::size_t levels = c.level_radius.size();
  if (!descending) {
    double previous = 0.0;
    for (std::size_t level = 0; level < levels; ++level) {
      if (rejects_at(level)) return previous;
      previous = c.level_radius[level];
    }
    return previous;
  }
  for (std::size_t level = levels; level-- > 0;) {
    if (!rejects_at(level)) return c.level_radius[level];
  }
  return 0.0;
}

void require_matching_dim(const NullTables& nulls, const PointSet& local) {
  if (nulls.dim() != local.dim()) {
    throw InputError("null tables are for dimension " +
                     std::to_string(nulls.dim()) + ", points have " +
                     std::to_string(local.dim()));
  }
}

}  // namespace

void SrtConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const std::size_t need = min_replicates(alpha);
  if (num_replicates < need) {
    throw ConfigError("alpha " + std::to_string(alpha) + " needs at least " +
                      std::to_string(need) + " Monte Carlo replicates, got " +
                      std::to_string(num_replicates));
  }
}

std::size_t min_replicates(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  return static_cast<std::size_t>(std::ceil(2.0 / alpha - 1e-9));
}

double ball_volume(std::size_t dim, double radius) {
  const double half = 0.5 * static_cast<double>(dim);
  const double log_unit = half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
  return std::exp(log_unit) * std::pow(radius, static_cast<double>(dim));
}

std::vector<double> nearest_neighbor_distances(const PointSet& local) {
  std::vector<double> out;
  nnd_of_coords(local.coords(), local.size(), local.dim(), out);
  return out;
}

NndSummary summarize_nnd(std::span<const double> nnd) {
  if (nnd.empty()) return {};
  NndSummary s;
  s.mean = std::accumulate(nnd.begin(), nnd.end(), 0.0) /
           static_cast<double>(nnd.size());
  std::vector<double> tmp(nnd.begin(), nnd.end());
  auto mid = tmp.begin() + static_cast<std::ptrdiff_t>((tmp.size() - 1) / 2);
  std::nth_element(tmp.begin(), mid, tmp.end());
  s.median = *mid;
  return s;
}

NndSummary nnd_statistics(const PointSet& local) {
  if (local.size() < 2) {
    throw InputError("nearest-neighbor statistics need at least 2 points");
  }
  return summarize_nnd(nearest_neighbor_distances(local));
}

std::vector<bool> holm_step_down(std::span<const double> p, double alpha) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<bool> reject(m, false);
  for (std::size_t rank = 0; rank < m; ++rank) {
    if (p[idx[rank]] > alpha / static_cast<double>(m - rank)) break;
    reject[idx[rank]] = true;
  }
  return reject;
}

NndNull NndNull::simulate(std::size_t dim, std::size_t m,
                          std::size_t replicates, std::uint64_t seed) {
  if (m < 2) throw InputError("NND null needs at least 2 points");
  NndNull null;
  null.means_.reserve(replicates);
  null.medians_.reserve(replicates);
  std::vector<double> coords;
  std::vector<double> nnd;
  for (std::size_t j = 0; j < replicates; ++j) {
    sample_unit_ball(dim, m, seed, j, coords);
    nnd_of_coords(coords, m, dim, nnd);
    const NndSummary s = summarize_nnd(nnd);
    null.means_.push_back(s.mean);
    null.medians_.push_back(s.median);
  }
  std::sort(null.means_.begin(), null.means_.end());
  std::sort(null.medians_.begin(), null.medians_.end());
  return null;
}

double NndNull::p_mean(double observed) const {
  return empirical_p(means_, observed);
}

double NndNull::p_median(double observed) const {
  return empirical_p(medians_, observed);
}

std::size_t ripley_grid_bin(double scaled_distance) {
  constexpr std::size_t g = kRipleyGridSize;
  const double s = scaled_distance;
  if (!(s > 0.0)) return 1;
  if (s > 1.0) return g + 1;
  auto k = static_cast<std::size_t>(std::ceil(s * static_cast<double>(g)));
  k = std::clamp<std::size_t>(k, 1, g);
  while (k > 1 && s <= static_cast<double>(k - 1) / static_cast<double>(g)) --k;
  while (k <= g && s > static_cast<double>(k) / static_cast<double>(g)) ++k;
  return k;
}

double ripley_k_hat(const PointSet& local, double t, double volume) {
  if (!(volume > 0.0)) throw InputError("observation window volume must be positive");
  const std::size_t n = local.size();
  if (n < 2) throw InputError("Ripley's K needs at least 2 points");
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (euclidean(local.point(i), local.point(j)) <= t) pairs += 2;
    }
  }
  return volume / (static_cast<double>(n) * static_cast<double>(n - 1)) *
         static_cast<double>(pairs);
}

RipleyNull RipleyNull::simulate(std::size_t dim, std::size_t m,
                                std::size_t replicates, std::uint64_t seed) {
  if (m < 2) throw InputError("Ripley null needs at least 2 points");
  if (replicates == 0) throw ConfigError("Ripley null needs replicates");
  RipleyNull null;
  null.counts_.assign(kRipleyGridSize, std::vector<std::uint64_t>(replicates));
  std::vector<double> coords;
  for (std::size_t j = 0; j < replicates; ++j) {
    sample_unit_ball(dim, m, seed, j, coords);
    const auto counts = ripley_counts(m, [&](std::size_t a, std::size_t b) {
      return euclidean({coords.data() + a * dim, dim},
                       {coords.data() + b * dim, dim});
    });
    for (std::size_t k = 0; k < kRipleyGridSize; ++k) {
      null.counts_[k][j] = counts[k];
    }
  }
  for (auto& c : null.counts_) std::sort(c.begin(), c.end());
  return null;
}

std::uint64_t RipleyNull::upper_quantile(std::size_t k, double alpha) const {
  const auto& c = counts_.at(k - 1);
  return c[order_statistic_index(c.size(), 1.0 - alpha)];
}

std::uint64_t RipleyNull::lower_quantile(std::size_t k, double alpha) const {
  const auto& c = counts_.at(k - 1);
  return c[order_statistic_index(c.size(), alpha)];
}

const NndNull& NullTables::nnd(std::size_t m) {
  {
    std::lock_guard lock(mu_);
    if (auto it = nnd_.find(m); it != nnd_.end()) return *it->second;
  }
  auto table = std::make_unique<const NndNull>(
      NndNull::simulate(dim_, m, replicates_, seed_));
  std::lock_guard lock(mu_);
  auto [it, inserted] = nnd_.try_emplace(m, std::move(table));
  return *it->second;
}

const RipleyNull& NullTables::ripley(std::size_t m) {
  {
    std::lock_guard lock(mu_);
    if (auto it = ripley_.find(m); it != ripley_.end()) return *it->second;
  }
  auto table = std::make_unique<const RipleyNull>(
      RipleyNull::simulate(dim_, m, replicates_, seed_));
  std::lock_guard lock(mu_);
  auto [it, inserted] = ripley_.try_emplace(m, std::move(table));
  return *it->second;
}

SrtOutcome evaluate_nnd(std::span<const double> nnd, double radius,
                        const NndNull& null, double alpha) {
  SrtOutcome out;
  if (nnd.size() < 2 || !(radius > 0.0)) {
    out.vacuous = true;
    return out;
  }
  const NndSummary s = summarize_nnd(nnd);
  out.mean_nnd = s.mean;
  out.median_nnd = s.median;
  out.p_mean = null.p_mean(s.mean / radius);
  out.p_median = null.p_median(s.median / radius);
  const double p[2] = {out.p_mean, out.p_median};
  const auto rejected = holm_step_down(p, alpha);
  out.reject = rejected[0] || rejected[1];
  return out;
}

SrtOutcome mc_srt_nnd(const PointSet& local, const CoveringBall& ball,
                      const SrtConfig& cfg, NullTables& nulls) {
  cfg.validate();
  require_matching_dim(nulls, local);
  if (local.size() < 2 || !(ball.radius > 0.0)) {
    SrtOutcome out;
    out.vacuous = true;
    if (local.size() >= 2) {
      const NndSummary s = nnd_statistics(local);
      out.mean_nnd = s.mean;
      out.median_nnd = s.median;
    }
    return out;
  }
  return evaluate_nnd(nearest_neighbor_distances(local), ball.radius,
                      nulls.nnd(local.size()), cfg.alpha);
}

SrtOutcome mc_srt_nnd(const PointSet& local, const CoveringBall& ball,
                      const SrtConfig& cfg) {
  NullTables nulls(local.dim(), cfg.num_replicates, cfg.rng_seed);
  return mc_srt_nnd(local, ball, cfg, nulls);
}

RipleyEstimate ripley_envelope(const PointSet& local, const CoveringBall& ball,
                               const SrtConfig& cfg, NullTables& nulls) {
  cfg.validate();
  require_matching_dim(nulls, local);
  RipleyEstimate est;
  const std::size_t m = local.size();
  const double r = ball.radius;
  if (m < 2 || !(r > 0.0)) {
    est.vacuous = true;
    return est;
  }
  const auto counts = ripley_counts(m, [&](std::size_t a, std::size_t b) {
    return euclidean(local.point(a), local.point(b)) / r;
  });
  const RipleyNull& null = nulls.ripley(m);
  const double scale = ball_volume(local.dim(), r) /
                       (static_cast<double>(m) * static_cast<double>(m - 1));
  for (std::size_t k = 1; k <= kRipleyGridSize; ++k) {
    const std::uint64_t hi = null.upper_quantile(k, cfg.alpha);
    est.t_grid.push_back(r * static_cast<double>(k) /
                         static_cast<double>(kRipleyGridSize));
    est.k_hat.push_back(scale * static_cast<double>(counts[k - 1]));
    est.envelope_low.push_back(
        scale * static_cast<double>(null.lower_quantile(k, cfg.alpha)));
    est.envelope_high.push_back(scale * static_cast<double>(hi));
    if (counts[k - 1] > hi) est.reject = true;
  }
  return est;
}

bool mc_srt_ripley(const PointSet& local, const CoveringBall& ball,
                   const SrtConfig& cfg, NullTables& nulls) {
  return ripley_envelope(local, ball, cfg, nulls).reject;
}

bool mc_srt_ripley(const PointSet& local, const CoveringBall& ball,
                   const SrtConfig& cfg) {
  NullTables nulls(local.dim(), cfg.num_replicates, cfg.rng_seed);
  return mc_srt_ripley(local, ball, cfg, nulls);
}

CoveringBall radius_un(std::size_t center, const DistanceMatrix& dm,
                       const SrtConfig& cfg, NullTables& nulls) {
  cfg.validate();
  const CandidateOrder c = candidate_order(center, dm);
  std::vector<std::size_t> members;
  std::vector<double> nnd;

  // Ascending walks grow the interior one level at a time and update the
  // nearest-neighbor distances in place.
  auto grow_to = [&](std::size_t level) {
    for (std::size_t pos = members.size(); pos < c.level_end[level]; ++pos) {
      const std::size_t p = c.order[pos];
      double best = kInf;
      for (std::size_t q = 0; q < members.size(); ++q) {
        const double dpq = dm(p, members[q]);
        best = std::min(best, dpq);
        nnd[q] = std::min(nnd[q], dpq);
      }
      members.push_back(p);
      nnd.push_back(best);
    }
  };
  auto rebuild_at = [&](std::size_t level) {
    members.clear();
    nnd.clear();
    grow_to(level);
  };

  const double radius = walk_candidates(c, cfg.descending, [&](std::size_t level) {
    if (cfg.descending) {
      rebuild_at(level);
    } else {
      grow_to(level);
    }
    const double r = c.level_radius[level];
    if (members.size() < 2 || !(r > 0.0)) return false;
    return evaluate_nnd(nnd, r, nulls.nnd(members.size()), cfg.alpha).reject;
  });
  return {center, radius};
}

CoveringBall radius_un(std::size_t center, const PointSet& ps,
                       const SrtConfig& cfg) {
  if (ps.size() < 2) throw InputError("radius search needs at least 2 points");
  NullTables nulls(ps.dim(), cfg.num_replicates, cfg.rng_seed);
  return radius_un(center, pairwise_distances(ps), cfg, nulls);
}

CoveringBall radius_rk(std::size_t center, const DistanceMatrix& dm,
                       const SrtConfig& cfg, NullTables& nulls) {
  cfg.validate();
  const CandidateOrder c = candidate_order(center, dm);
  const double radius = walk_candidates(c, cfg.descending, [&](std::size_t level) {
    const std::size_t m = c.level_end[level];
    const double r = c.level_radius[level];
    if (m < 2 || !(r > 0.0)) return false;
    // With the center in the tested set, slot 0 is the center itself.
    const std::size_t offset = cfg.ripley_include_center ? 1 : 0;
    auto id = [&](std::size_t a) { return a < offset ? center : c.order[a - offset]; };
    const auto counts = ripley_counts(m + offset, [&](std::size_t a, std::size_t b) {
      return dm(id(a), id(b)) / r;
    });
    const RipleyNull& null = nulls.ripley(m + offset);
    for (std::size_t k = 1; k <= kRipleyGridSize; ++k) {
      if (counts[k - 1] > null.upper_quantile(k, cfg.alpha)) return true;
    }
    return false;
  });
  return {center, radius};
}

CoveringBall radius_rk(std::size_t center, const PointSet& ps,
                       const SrtConfig& cfg) {
  if (ps.size() < 2) throw InputError("radius search needs at least 2 points");
  NullTables nulls(ps.dim(), cfg.num_replicates, cfg.rng_seed);
  return radius_rk(center, pairwise_distances(ps), cfg, nulls);
}

KsStatistic ks_statistic(std::size_t center, const DistanceMatrix& dm,
                         std::size_t dim, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ConfigError("density parameter delta must be positive");
  }
  const CandidateOrder c = candidate_order(center, dm);
  KsStatistic ks;
  ks.delta = delta;
  ks.radius_candidates.push_back(0.0);
  ks.t_values.push_back(0.0);
  const auto d = static_cast<double>(dim);
  for (std::size_t level = 0; level < c.level_radius.size(); ++level) {
    const double r = c.level_radius[level];
    const double t = static_cast<double>(c.level_end[level]) - delta * std::pow(r, d);
    if (r == 0.0) {
      ks.t_values.front() = t;  // points coincident with the center
    } else {
      ks.radius_candidates.push_back(r);
      ks.t_values.push_back(t);
    }
  }
  return ks;
}

CoveringBall radius_ks(std::size_t center, const DistanceMatrix& dm,
                       std::size_t dim, double delta) {
  const KsStatistic ks = ks_statistic(center, dm, dim, delta);
  std::size_t best = 0;
  for (std::size_t i = 1; i < ks.t_values.size(); ++i) {
    if (ks.t_values[i] > ks.t_values[best]) best = i;
  }
  return {center, ks.radius_candidates[best]};
}

CoveringBall radius_ks(std::size_t center, const PointSet& ps, double delta) {
  return radius_ks(center, pairwise_distances(ps), ps.dim(), delta);
}

}  // namespace ccd
