#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccd/core.hpp"
#include "ccd/srt.hpp"

namespace ccd {

enum class Method { UN, RK, KS };

std::string to_string(Method m);
Method parse_method(const std::string& name);  // "un", "RK", ... ; ConfigError

/// Approximate minimum dominating set of a catch digraph, in selection order.
struct DominatingSet {
  std::vector<std::size_t> members;
  std::vector<std::vector<std::size_t>> coverage;  // closed neighborhoods
};

/// Greedy selection by outdegree in the original digraph. Outdegrees are
/// never recomputed; ties go to the lower vertex index. A vertex whose closed
/// neighborhood is already covered is passed over.
DominatingSet greedy_mds(const CatchDigraph& digraph);

/// Greedy selection on the intersection graph by number of newly covered
/// points. Each pick removes its closed neighborhood and the graph is
/// re-induced on what is left. Returns local vertex ids in selection order.
std::vector<std::size_t> greedy_mds_scored(const IntersectionGraph& graph);

// d(point, center) / radius; a zero-radius ball gives 0 for its own center
// and +inf for every other point.
double rho(std::size_t point, const CoveringBall& ball, const DistanceMatrix& dm);

// Label of the argmin-rho ball per point, ties to the earlier ball.
std::vector<int> assign_by_rho(const DistanceMatrix& dm,
                               std::span<const CoveringBall> balls);
std::vector<int> assign_by_rho(const PointSet& ps,
                               std::span<const CoveringBall> balls);

struct Candidate {
  CoveringBall ball;
  std::size_t covered = 0;  // points in the ball's closed neighborhood
};

struct Clustering {
  std::vector<int> labels;  // 0 .. k_hat - 1
  std::size_t k_hat = 0;
  std::vector<CoveringBall> dominating_balls;  // label i belongs to ball i
  double avg_silhouette = 0.0;
  Method method = Method::UN;
};

/// Sorts candidates by coverage (stable, so selection order breaks ties),
/// then for k = 2 .. K re-partitions every point among the first k balls and
/// keeps the k with the highest average silhouette (ties to the smaller k).
/// A single candidate yields one cluster with silhouette reported as 0.
Clustering refine_by_silhouette(const DistanceMatrix& dm,
                                std::span<const Candidate> candidates);

struct ClusterOptions {
  Method method = Method::UN;
  SrtConfig srt;
  std::optional<double> delta;  // KS density parameter (not its d-th root)
  bool flexible = false;
};

/// Intermediate products of one run, kept for inspection and reporting.
struct ClusterTrace {
  std::vector<CoveringBall> balls;
  DominatingSet mds;
  std::vector<std::size_t> scored_order;  // local ids into the intersection graph
  std::vector<std::size_t> component_of;  // intersection graph components
};

Clustering cluster(const PointSet& ps, const ClusterOptions& opts);

// `nulls`, when given, must match the point dimension and the config's
// replicate count and seed; it is reused across calls.
Clustering cluster(const PointSet& ps, const DistanceMatrix& dm,
                   const ClusterOptions& opts, NullTables* nulls = nullptr,
                   ClusterTrace* trace = nullptr);

// Covering-ball radii for every point under the chosen method.
std::vector<CoveringBall> covering_balls(const DistanceMatrix& dm,
                                         std::size_t dim,
                                         const ClusterOptions& opts,
                                         NullTables* nulls);

}  // namespace ccd
