#include "ccd/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "ccd/errors.hpp"
#include "ccd/rng.hpp"

namespace ccd::synth {

namespace {

// Sub-stream tags under the dataset seed.
constexpr std::uint64_t kClusterStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

void validate(const SimSpec& spec, Family expected) {
  if (spec.family != expected) throw ConfigError("generator does not match spec family");
  if (spec.n < spec.k) throw ConfigError("need at least one point per cluster");
}

template <typename SampleCluster>
LabeledDataset gen_clusters(const SimSpec& spec, SampleCluster&& sample) {
  auto mus = centers(spec.dim, spec.k, spec.noise_study);
  const auto sizes = cluster_sizes(spec.n, spec.k);
  std::vector<double> coords;
  coords.reserve(spec.n * spec.dim);
  LabeledDataset ds{PointSet(1, 1, {0.0}), {}, spec.k, mus, {}, 0};
  std::vector<double> x(spec.dim);
  for (std::size_t c = 0; c < spec.k; ++c) {
    auto eng = rng::engine(spec.rng_seed, {kClusterStream, c});
    const double scale = rng::uniform(eng, 0.8, 1.2);
    ds.scales.push_back(scale);
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      sample(eng, scale, x);
      for (std::size_t a = 0; a < spec.dim; ++a) coords.push_back(mus[c][a] + x[a]);
      ds.true_labels.push_back(static_cast<int>(c));
    }
  }
  ds.points = PointSet(spec.n, spec.dim, std::move(coords));
  return ds;
}

}  // namespace

std::string to_string(Family f) {
  return f == Family::Uniform ? "uniform" : "gaussian";
}

Family parse_family(const std::string& name) {
  std::string low;
  for (char c : name) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (low == "uniform") return Family::Uniform;
  if (low == "gaussian") return Family::Gaussian;
  throw ConfigError("unknown family '" + name + "' (expected uniform or gaussian)");
}

std::vector<std::vector<double>> centers(std::size_t dim, std::size_t k,
                                         bool noise_study) {
  if (dim < 2) throw ConfigError("benchmark centers need dimension >= 2");
  std::vector<std::vector<double>> mus;
  auto base = [&] { return std::vector<double>(dim, 3.0); };
  if (noise_study) {
    if (k != 3) throw ConfigError("noise-study layout has exactly 3 clusters");
    mus = {base(), base(), base()};
    mus[1][0] = 9.0;
    mus[2][1] = 9.0;
    return mus;
  }
  if (k != 2 && k != 3 && k != 5) {
    throw ConfigError("cluster count must be 2, 3 or 5, got " + std::to_string(k));
  }
  mus.assign(5, base());
  mus[1][0] = 6.0;
  mus[2][0] = 6.0;
  mus[2][1] = 6.0;
  mus[3][1] = 5.5;
  mus[4][0] = 8.5;
  mus.resize(k);
  return mus;
}

std::vector<std::size_t> cluster_sizes(std::size_t n, std::size_t k) {
  if (k == 0) throw ConfigError("cluster count must be positive");
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t c = 0; c < n % k; ++c) ++sizes[c];
  return sizes;
}

LabeledDataset gen_uniform_clusters(const SimSpec& spec) {
  validate(spec, Family::Uniform);
  return gen_clusters(spec, [](rng::Engine& eng, double radius, std::vector<double>& x) {
    rng::uniform_in_ball(eng, radius, x);
  });
}

LabeledDataset gen_gaussian_clusters(const SimSpec& spec) {
  validate(spec, Family::Gaussian);
  if (!(spec.gaussian_sd_scale > 0.0)) throw ConfigError("gaussian_sd_scale must be positive");
  const double scale = spec.gaussian_sd_scale;
  return gen_clusters(spec, [scale](rng::Engine& eng, double variance, std::vector<double>& x) {
    const double sd = scale * std::sqrt(variance);
    for (double& v : x) v = sd * rng::normal(eng);
  });
}

LabeledDataset add_noise(const LabeledDataset& ds, double level, std::uint64_t seed) {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw ConfigError("noise level must lie in [0, 1]");
  }
  const std::size_t regular = ds.points.size() - ds.noise_count;
  const auto count = static_cast<std::size_t>(std::llround(level * static_cast<double>(regular)));
  if (count == 0) return ds;

  const std::size_t dim = ds.points.dim();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    if (ds.true_labels[i] == static_cast<int>(ds.k_true)) continue;
    auto p = ds.points.point(i);
    for (std::size_t a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }

  auto eng = rng::engine(seed, {kNoiseStream});
  std::vector<double> coords = ds.points.coords();
  LabeledDataset out = ds;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t a = 0; a < dim; ++a) coords.push_back(rng::uniform(eng, lo[a], hi[a]));
    out.true_labels.push_back(static_cast<int>(ds.k_true));
  }
  out.points = PointSet(ds.points.size() + count, dim, std::move(coords));
  out.noise_count += count;
  return out;
}

LabeledDataset generate(const SimSpec& spec) {
  LabeledDataset ds = spec.family == Family::Uniform ? gen_uniform_clusters(spec)
                                                     : gen_gaussian_clusters(spec);
  return add_noise(ds, spec.noise_level, spec.rng_seed);
}

}  // namespace ccd::synth
