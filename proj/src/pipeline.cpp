#include "ccd/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "ccd/errors.hpp"
#include "ccd/metrics.hpp"
#include "ccd/parallel.hpp"

namespace ccd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Drops balls that won no point and renumbers labels to follow ball order.
void drop_empty(std::vector<int>& labels, std::vector<CoveringBall>& balls) {
  std::vector<std::size_t> count(balls.size(), 0);
  for (int l : labels) ++count[static_cast<std::size_t>(l)];
  std::vector<int> remap(balls.size(), -1);
  std::vector<CoveringBall> kept;
  for (std::size_t b = 0; b < balls.size(); ++b) {
    if (count[b] == 0) continue;
    remap[b] = static_cast<int>(kept.size());
    kept.push_back(balls[b]);
  }
  for (int& l : labels) l = remap[static_cast<std::size_t>(l)];
  balls = std::move(kept);
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::UN: return "UN";
    case Method::RK: return "RK";
    case Method::KS: return "KS";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string up;
  for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "UN") return Method::UN;
  if (up == "RK") return Method::RK;
  if (up == "KS") return Method::KS;
  throw ConfigError("unknown method '" + name + "' (expected un, rk or ks)");
}

DominatingSet greedy_mds(const CatchDigraph& digraph) {
  const std::size_t n = digraph.size();
  std::vector<std::size_t> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(), [&](std::size_t a, std::size_t b) {
    return digraph.outdegree(a) > digraph.outdegree(b);
  });

  DominatingSet mds;
  std::vector<char> covered(n, 0);
  std::size_t uncovered = n;
  for (std::size_t v : by_degree) {
    if (uncovered == 0) break;
    auto nb = digraph.closed_neighborhood(v);
    std::size_t gained = 0;
    for (std::size_t p : nb) {
      if (!covered[p]) {
        covered[p] = 1;
        ++gained;
      }
    }
    if (gained == 0) continue;
    uncovered -= gained;
    mds.members.push_back(v);
    mds.coverage.push_back(std::move(nb));
  }
  return mds;
}

std::vector<std::size_t> greedy_mds_scored(const IntersectionGraph& graph) {
  const std::size_t k = graph.size();
  std::size_t points = 0;
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t p : graph.coverage(u)) points = std::max(points, p + 1);
  }
  std::vector<char> alive(k, 1);
  std::vector<char> covered(points, 0);
  std::size_t remaining = k;
  std::vector<std::size_t> order;
  while (remaining > 0) {
    std::size_t best = k;
    std::size_t best_score = 0;
    for (std::size_t u = 0; u < k; ++u) {
      if (!alive[u]) continue;
      std::size_t score = 0;
      for (std::size_t p : graph.coverage(u)) score += covered[p] ? 0 : 1;
      if (best == k || score > best_score) {
        best = u;
        best_score = score;
      }
    }
    order.push_back(best);
    for (std::size_t p : graph.coverage(best)) covered[p] = 1;
    alive[best] = 0;
    --remaining;
    for (std::size_t v : graph.neighbors(best)) {
      if (alive[v]) {
        alive[v] = 0;
        --remaining;
      }
    }
  }
  return order;
}

double rho(std::size_t point, const CoveringBall& ball, const DistanceMatrix& dm) {
  const double d = dm(point, ball.center);
  if (ball.radius > 0.0) return d / ball.radius;
  return point == ball.center ? 0.0 : kInf;
}

std::vector<int> assign_by_rho(const DistanceMatrix& dm,
                               std::span<const CoveringBall> balls) {
  if (balls.empty()) throw InputError("assignment needs at least one ball");
  std::vector<int> labels(dm.size(), 0);
  for (std::size_t p = 0; p < dm.size(); ++p) {
    double best = rho(p, balls[0], dm);
    for (std::size_t b = 1; b < balls.size(); ++b) {
      const double r = rho(p, balls[b], dm);
      if (r < best) {
        best = r;
        labels[p] = static_cast<int>(b);
      }
    }
  }
  return labels;
}

std::vector<int> assign_by_rho(const PointSet& ps,
                               std::span<const CoveringBall> balls) {
  return assign_by_rho(pairwise_distances(ps), balls);
}

Clustering refine_by_silhouette(const DistanceMatrix& dm,
                                std::span<const Candidate> candidates) {
  if (candidates.empty()) throw InputError("refinement needs at least one candidate");
  std::vector<Candidate> ranked(candidates.begin(), candidates.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
    return a.covered > b.covered;
  });

  const std::size_t n = dm.size();
  Clustering best;
  best.labels.assign(n, 0);
  best.dominating_balls = {ranked.front().ball};

  if (ranked.size() > 1) {
    std::vector<int> labels(n, 0);
    std::vector<double> best_rho(n);
    for (std::size_t p = 0; p < n; ++p) best_rho[p] = rho(p, ranked[0].ball, dm);

    double best_sil = -kInf;
    for (std::size_t k = 2; k <= ranked.size(); ++k) {
      const CoveringBall& added = ranked[k - 1].ball;
      for (std::size_t p = 0; p < n; ++p) {
        const double r = rho(p, added, dm);
        if (r < best_rho[p]) {
          best_rho[p] = r;
          labels[p] = static_cast<int>(k - 1);
        }
      }
      if (count_clusters(labels) < 2) continue;
      const double sil = avg_silhouette(dm, labels);
      if (sil > best_sil) {
        best_sil = sil;
        best.labels = labels;
        best.dominating_balls.clear();
        for (std::size_t i = 0; i < k; ++i) best.dominating_balls.push_back(ranked[i].ball);
      }
    }
  }

  drop_empty(best.labels, best.dominating_balls);
  best.k_hat = best.dominating_balls.size();
  best.avg_silhouette = best.k_hat >= 2 ? avg_silhouette(dm, best.labels) : 0.0;
  return best;
}

std::vector<CoveringBall> covering_balls(const DistanceMatrix& dm,
                                         std::size_t dim,
                                         const ClusterOptions& opts,
                                         NullTables* nulls) {
  const std::size_t n = dm.size();
  std::vector<CoveringBall> balls(n);
  if (opts.method == Method::KS) {
    if (!opts.delta) throw ConfigError("KS method requires a density parameter delta");
    const double delta = *opts.delta;
    parallel_for(n, [&](std::size_t i) { balls[i] = radius_ks(i, dm, dim, delta); });
    return balls;
  }

  opts.srt.validate();
  std::optional<NullTables> local;
  if (nulls == nullptr) {
    local.emplace(dim, opts.srt.num_replicates, opts.srt.rng_seed);
    nulls = &*local;
  } else if (nulls->dim() != dim || nulls->replicates() != opts.srt.num_replicates ||
             nulls->seed() != opts.srt.rng_seed) {
    throw ConfigError("shared null tables do not match the run configuration");
  }
  if (opts.method == Method::UN) {
    parallel_for(n, [&](std::size_t i) { balls[i] = radius_un(i, dm, opts.srt, *nulls); });
  } else {
    parallel_for(n, [&](std::size_t i) { balls[i] = radius_rk(i, dm, opts.srt, *nulls); });
  }
  return balls;
}

Clustering cluster(const PointSet& ps, const DistanceMatrix& dm,
                   const ClusterOptions& opts, NullTables* nulls,
                   ClusterTrace* trace) {
  if (ps.size() < 2) throw InputError("clustering needs at least 2 points");
  if (dm.size() != ps.size()) throw InputError("distance matrix does not match points");
  if (opts.method == Method::KS && !opts.delta) {
    throw ConfigError("KS method requires a density parameter delta");
  }

  auto balls = covering_balls(dm, ps.dim(), opts, nulls);
  const CatchDigraph digraph = build_catch_digraph(dm, balls);
  DominatingSet mds = greedy_mds(digraph);
  const IntersectionGraph graph = build_intersection_graph(digraph, mds.members);

  Clustering result;
  std::vector<std::size_t> order;
  std::vector<std::size_t> comp;
  if (!opts.flexible) {
    order = greedy_mds_scored(graph);
    std::vector<Candidate> candidates;
    candidates.reserve(order.size());
    for (std::size_t u : order) {
      candidates.push_back({graph.ball(u), graph.coverage(u).size()});
    }
    result = refine_by_silhouette(dm, candidates);
  } else {
    comp = graph.components();
    std::vector<CoveringBall> all(graph.size());
    for (std::size_t u = 0; u < graph.size(); ++u) all[u] = graph.ball(u);
    const auto nearest = assign_by_rho(dm, all);

    // One representative per component: its ball covering the most points.
    const std::size_t ncomp =
        comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<std::size_t> rep(ncomp, graph.size());
    for (std::size_t u = 0; u < graph.size(); ++u) {
      std::size_t& r = rep[comp[u]];
      if (r == graph.size() || graph.coverage(u).size() > graph.coverage(r).size()) r = u;
    }
    result.labels.resize(ps.size());
    for (std::size_t p = 0; p < ps.size(); ++p) {
      result.labels[p] = static_cast<int>(comp[static_cast<std::size_t>(nearest[p])]);
    }
    for (std::size_t c = 0; c < ncomp; ++c) result.dominating_balls.push_back(graph.ball(rep[c]));
    drop_empty(result.labels, result.dominating_balls);
    result.k_hat = result.dominating_balls.size();
    result.avg_silhouette = result.k_hat >= 2 ? avg_silhouette(dm, result.labels) : 0.0;
  }
  result.method = opts.method;

  if (count_clusters(result.labels) != result.k_hat) {
    throw InvariantError("cluster count does not match retained balls");
  }
  if (trace != nullptr) {
    trace->balls = std::move(balls);
    trace->mds = std::move(mds);
    trace->scored_order = std::move(order);
    trace->component_of = std::move(comp);
  }
  return result;
}

Clustering cluster(const PointSet& ps, const ClusterOptions& opts) {
  if (ps.size() < 2) throw InputError("clustering needs at least 2 points");
  return cluster(ps, pairwise_distances(ps), opts);
}

}  // namespace ccd
