#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ccd/core.hpp"

namespace ccd::synth {

enum class Family { Uniform, Gaussian };

std::string to_string(Family f);
Family parse_family(const std::string& name);

struct SimSpec {
  std::size_t dim = 2;
  std::size_t n = 200;  // regular (non-noise) points
  std::size_t k = 3;
  Family family = Family::Uniform;
  double noise_level = 0.0;
  bool noise_study = false;  // use the widely spaced three-center layout
  // Gaussian clusters: per-axis sd = gaussian_sd_scale * sqrt(Delta).
  double gaussian_sd_scale = 1.0;
  std::uint64_t rng_seed = 0;
};

struct LabeledDataset {
  PointSet points;
  std::vector<int> true_labels;  // clusters 0..k-1, noise labeled k
  std::size_t k_true = 0;
  std::vector<std::vector<double>> centers;
  // Per-cluster draw: ball radius (uniform) or variance (Gaussian).
  std::vector<double> scales;
  std::size_t noise_count = 0;
};

/// First k benchmark centers in R^dim:
///   (3,..,3), (6,3,..), (6,6,3,..), (3,5.5,3,..), (8.5,3,..)
/// or, for the noise study (k = 3 only), (3,..,3), (9,3,..), (3,9,3,..).
std::vector<std::vector<double>> centers(std::size_t dim, std::size_t k,
                                         bool noise_study = false);

// Cluster sizes: floor(n / k) each, remainder to the lowest-index clusters.
std::vector<std::size_t> cluster_sizes(std::size_t n, std::size_t k);

LabeledDataset gen_uniform_clusters(const SimSpec& spec);
LabeledDataset gen_gaussian_clusters(const SimSpec& spec);

/// Appends round(level * n_regular) points uniform over the bounding box of
/// the existing points, labeled k_true.
LabeledDataset add_noise(const LabeledDataset& ds, double level, std::uint64_t seed);

// Family generator followed by add_noise(spec.noise_level).
LabeledDataset generate(const SimSpec& spec);

}  // namespace ccd::synth
