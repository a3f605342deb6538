#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ccd/core.hpp"

namespace ccd {

/// Hubert-Arabie adjusted Rand index from the contingency table. Labels are
/// arbitrary integers. Two trivial partitions with a zero denominator (both
/// all-in-one or both all-singletons) score 1.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Per-point silhouette widths; singleton clusters score 0.
/// Throws UndefinedMetric when fewer than two clusters are present.
std::vector<double> silhouette_values(const DistanceMatrix& dm,
                                      std::span<const int> labels);

double avg_silhouette(const DistanceMatrix& dm, std::span<const int> labels);
double avg_silhouette(const PointSet& ps, std::span<const int> labels);

std::size_t count_clusters(std::span<const int> labels);

double success_rate(std::span<const std::pair<std::size_t, std::size_t>> runs);

struct ValidationReport {
  double ari = 0.0;
  double avg_silhouette = 0.0;
  bool silhouette_defined = true;  // false when k_hat == 1 (reported as 0)
  std::size_t k_hat = 0;
  std::optional<std::size_t> k_true;
  std::optional<bool> success;
};

ValidationReport validate(const DistanceMatrix& dm, std::span<const int> predicted,
                          std::span<const int> truth,
                          std::optional<std::size_t> k_true = std::nullopt);

}  // namespace ccd
