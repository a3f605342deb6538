#include "ccd/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ccd/errors.hpp"

namespace ccd {

PointSet::PointSet(std::size_t n, std::size_t dim, std::vector<double> coords)
    : n_(n), dim_(dim), coords_(std::move(coords)) {
  if (n_ == 0) throw InputError("point set is empty");
  if (dim_ == 0) throw InputError("point set has zero dimension");
  if (coords_.size() != n_ * dim_) {
    throw InputError("coordinate buffer has " + std::to_string(coords_.size()) +
                     " values, expected " + std::to_string(n_ * dim_));
  }
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!std::isfinite(coords_[k])) {
      throw InputError("non-finite coordinate at point " +
                       std::to_string(k / dim_));
    }
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("point set is empty");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw InputError("row " + std::to_string(i) + " has " +
                       std::to_string(rows[i].size()) + " coordinates, expected " +
                       std::to_string(dim));
    }
    coords.insert(coords.end(), rows[i].begin(), rows[i].end());
  }
  return PointSet(rows.size(), dim, std::move(coords));
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  std::vector<double> coords;
  coords.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= n_) throw InputError("subset index out of range");
    auto p = point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointSet(indices.size(), dim_, std::move(coords));
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

DistanceMatrix pairwise_distances(const PointSet& ps) {
  DistanceMatrix dm(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      dm.set(i, j, euclidean(ps.point(i), ps.point(j)));
    }
  }
  return dm;
}

CatchDigraph::CatchDigraph(std::vector<CoveringBall> balls,
                           std::vector<std::vector<std::size_t>> out)
    : balls_(std::move(balls)), out_(std::move(out)) {}

std::vector<std::size_t> CatchDigraph::closed_neighborhood(std::size_t v) const {
  std::vector<std::size_t> nb(out_[v].begin(), out_[v].end());
  nb.insert(std::upper_bound(nb.begin(), nb.end(), v), v);
  return nb;
}

bool CatchDigraph::has_arc(std::size_t from, std::size_t to) const {
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

CatchDigraph build_catch_digraph(const DistanceMatrix& dm,
                                 std::span<const CoveringBall> balls) {
  const std::size_t n = dm.size();
  if (balls.size() != n) {
    throw InputError("expected one covering ball per point (" +
                     std::to_string(n) + "), got " +
                     std::to_string(balls.size()));
  }
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CoveringBall& b = balls[i];
    if (b.center != i) {
      throw InputError("ball " + std::to_string(i) + " is centered at point " +
                       std::to_string(b.center));
    }
    if (!(b.radius >= 0.0)) {
      throw InputError("ball " + std::to_string(i) + " has negative radius");
    }
    const auto row = dm.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && row[j] <= b.radius) out[i].push_back(j);
    }
  }
  return CatchDigraph({balls.begin(), balls.end()}, std::move(out));
}

CatchDigraph build_catch_digraph(const PointSet& ps,
                                 std::span<const CoveringBall> balls) {
  return build_catch_digraph(pairwise_distances(ps), balls);
}

bool IntersectionGraph::adjacent(std::size_t u, std::size_t v) const {
  return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
}

std::vector<std::size_t> IntersectionGraph::components() const {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(size(), kUnset);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < size(); ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adjacency_[u]) {
        if (comp[v] == kUnset) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

IntersectionGraph build_intersection_graph(const CatchDigraph& digraph,
                                           std::span<const std::size_t> mds) {
  const std::size_t n = digraph.size();
  const std::size_t k = mds.size();
  IntersectionGraph g;
  g.members_.assign(mds.begin(), mds.end());
  g.coverage_.reserve(k);
  g.balls_.reserve(k);

  // covering[p] = local vertices whose ball covers point p
  std::vector<std::vector<std::size_t>> covering(n);
  for (std::size_t u = 0; u < k; ++u) {
    if (mds[u] >= n) {
      throw InputError("dominating set member " + std::to_string(mds[u]) +
                       " out of range");
    }
    g.coverage_.push_back(digraph.closed_neighborhood(mds[u]));
    g.balls_.push_back(digraph.balls()[mds[u]]);
    for (std::size_t p : g.coverage_.back()) covering[p].push_back(u);
  }

  std::vector<char> linked(k * k, 0);
  for (const auto& owners : covering) {
    for (std::size_t a = 0; a < owners.size(); ++a) {
      for (std::size_t b = a + 1; b < owners.size(); ++b) {
        linked[owners[a] * k + owners[b]] = 1;
        linked[owners[b] * k + owners[a]] = 1;
      }
    }
  }
  g.adjacency_.resize(k);
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t v = 0; v < k; ++v) {
      if (u != v && linked[u * k + v]) g.adjacency_[u].push_back(v);
    }
  }
  return g;
}

}  // namespace ccd
