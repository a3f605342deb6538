#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ccd {

/// n points in R^d, stored row-major. Coordinates are validated finite on
/// construction; an empty set or a zero dimension is rejected.
class PointSet {
 public:
  PointSet(std::size_t n, std::size_t dim, std::vector<double> coords);

  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

  // Rows `indices` of this set, in the given order.
  PointSet subset(std::span<const std::size_t> indices) const;

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> coords_;
};

double euclidean(std::span<const double> a, std::span<const double> b);

/// Dense symmetric n x n distance matrix.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * n_, n_};
  }

  void set(std::size_t i, std::size_t j, double v) {
    entries_[i * n_ + j] = v;
    entries_[j * n_ + i] = v;
  }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

DistanceMatrix pairwise_distances(const PointSet& ps);

/// Closed ball B(center, radius) around a data point.
struct CoveringBall {
  std::size_t center = 0;
  double radius = 0.0;

  bool operator==(const CoveringBall&) const = default;
};

/// Catch digraph: arc i -> j iff j != i and d(i, j) <= radius_i.
class CatchDigraph {
 public:
  CatchDigraph(std::vector<CoveringBall> balls,
               std::vector<std::vector<std::size_t>> out);

  std::size_t size() const noexcept { return out_.size(); }
  const std::vector<CoveringBall>& balls() const noexcept { return balls_; }

  std::span<const std::size_t> out_neighbors(std::size_t v) const {
    return out_[v];
  }
  std::size_t outdegree(std::size_t v) const { return out_[v].size(); }

  // {v} together with its out-neighbors, sorted ascending.
  std::vector<std::size_t> closed_neighborhood(std::size_t v) const;

  bool has_arc(std::size_t from, std::size_t to) const;

 private:
  std::vector<CoveringBall> balls_;
  std::vector<std::vector<std::size_t>> out_;  // sorted ascending
};

CatchDigraph build_catch_digraph(const DistanceMatrix& dm,
                                 std::span<const CoveringBall> balls);
CatchDigraph build_catch_digraph(const PointSet& ps,
                                 std::span<const CoveringBall> balls);

/// Undirected graph on a subset of digraph vertices; u ~ v when their closed
/// neighborhoods share a point.
class IntersectionGraph {
 public:
  std::size_t size() const noexcept { return members_.size(); }

  // Digraph vertex behind local vertex `u`.
  std::size_t member(std::size_t u) const { return members_[u]; }
  const std::vector<std::size_t>& members() const noexcept { return members_; }

  const CoveringBall& ball(std::size_t u) const { return balls_[u]; }
  std::span<const std::size_t> coverage(std::size_t u) const {
    return coverage_[u];
  }
  std::span<const std::size_t> neighbors(std::size_t u) const {
    return adjacency_[u];
  }
  bool adjacent(std::size_t u, std::size_t v) const;

  // Connected component id per local vertex, numbered by first appearance.
  std::vector<std::size_t> components() const;

 private:
  friend IntersectionGraph build_intersection_graph(
      const CatchDigraph&, std::span<const std::size_t>);

  std::vector<std::size_t> members_;
  std::vector<CoveringBall> balls_;
  std::vector<std::vector<std::size_t>> coverage_;
  std::vector<std::vector<std::size_t>> adjacency_;  // sorted ascending
};

IntersectionGraph build_intersection_graph(const CatchDigraph& digraph,
                                           std::span<const std::size_t> mds);

}  // namespace ccd
