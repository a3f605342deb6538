#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccd/errors.hpp"
#include "ccd/synth.hpp"
#include "oracles.hpp"

using namespace ccd;
using namespace ccd::synth;

namespace {

double center_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double coord(const PointSet& ps, std::size_t i, std::size_t c) {
  return ps.coords()[i * ps.dim() + c];
}

}  // namespace

TEST_CASE("benchmark centers") {
  using V = std::vector<std::vector<double>>;
  CHECK(centers(2, 2) == V{{3, 3}, {6, 3}});
  CHECK(centers(3, 3) == V{{3, 3, 3}, {6, 3, 3}, {6, 6, 3}});
  CHECK(centers(3, 3, true) == V{{3, 3, 3}, {9, 3, 3}, {3, 9, 3}});
  for (std::size_t d : {2, 5, 20}) {
    const auto c = centers(d, 5);
    CHECK(c.size() == 5);
    CHECK(center_dist(c[0], c[3]) == doctest::Approx(2.5));
  }
  CHECK_THROWS_AS(centers(2, 4), ConfigError);
  CHECK_THROWS_AS(centers(1, 2), ConfigError);
}

TEST_CASE("cluster sizes") {
  CHECK(cluster_sizes(100, 2) == std::vector<std::size_t>{50, 50});
  CHECK(cluster_sizes(200, 3) == std::vector<std::size_t>{67, 67, 66});
}

TEST_CASE("uniform clusters stay inside their drawn radius") {
  const auto ds = gen_uniform_clusters({4, 300, 3, Family::Uniform, 0.0, false, 1.0, 5});
  CHECK(ds.points.size() == 300);
  CHECK(ds.k_true == 3);
  for (double r : ds.scales) CHECK((r >= 0.8 && r <= 1.2));
  for (std::size_t i = 0; i < 300; ++i) {
    const int l = ds.true_labels[i];
    std::vector<double> p(ds.points.point(i).begin(), ds.points.point(i).end());
    CHECK(center_dist(p, ds.centers[l]) <= ds.scales[l] + 1e-12);
    CHECK(center_dist(p, ds.centers[l]) <= 1.2);
  }
}

TEST_CASE("uniform clusters split evenly") {
  const auto ds = gen_uniform_clusters({2, 100, 2, Family::Uniform, 0.0, false, 1.0, 1});
  CHECK(std::count(ds.true_labels.begin(), ds.true_labels.end(), 0) == 50);
  CHECK(std::count(ds.true_labels.begin(), ds.true_labels.end(), 1) == 50);
}

TEST_CASE("uniform-in-ball radial distribution") {
  // (|x - mu| / R)^d is U(0, 1); Kolmogorov-Smirnov at the 1% level.
  const std::size_t d = 3;
  const auto ds = gen_uniform_clusters({d, 10000, 2, Family::Uniform, 0.0, false, 1.0, 6});
  std::vector<double> u;
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    const int l = ds.true_labels[i];
    std::vector<double> p(ds.points.point(i).begin(), ds.points.point(i).end());
    u.push_back(std::pow(center_dist(p, ds.centers[l]) / ds.scales[l], static_cast<double>(d)));
  }
  std::sort(u.begin(), u.end());
  double dmax = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    dmax = std::max({dmax, (i + 1) / n - u[i], u[i] - i / n});
  }
  CHECK(dmax < 1.628 / std::sqrt(n));
}

TEST_CASE("Gaussian cluster moments") {
  const std::size_t d = 3;
  const auto ds = gen_gaussian_clusters({d, 10000, 2, Family::Gaussian, 0.0, false, 1.0, 7});
  for (int l = 0; l < 2; ++l) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
      if (ds.true_labels[i] == l) idx.push_back(i);
    }
    const double m = static_cast<double>(idx.size());
    const double var = ds.scales[l];
    CHECK((var >= 0.8 && var <= 1.2));
    std::vector<double> mean(d, 0.0);
    for (std::size_t i : idx) {
      for (std::size_t c = 0; c < d; ++c) mean[c] += coord(ds.points, i, c) / m;
    }
    for (std::size_t c = 0; c < d; ++c) {
      CHECK(std::abs(mean[c] - ds.centers[l][c]) <= 3.0 * std::sqrt(var / m));
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a + 1; b < d; ++b) {
        double cov = 0.0;
        for (std::size_t i : idx) {
          cov += (coord(ds.points, i, a) - mean[a]) * (coord(ds.points, i, b) - mean[b]) / m;
        }
        CHECK(std::abs(cov) <= 4.0 * var / std::sqrt(m));
      }
    }
  }
}

TEST_CASE("Gaussian sd scale") {
  SimSpec spec{2, 4000, 2, Family::Gaussian, 0.0, false, 0.5, 8};
  const auto ds = gen_gaussian_clusters(spec);
  double ss = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    if (ds.true_labels[i] != 0) continue;
    const double x = coord(ds.points, i, 0) - ds.centers[0][0];
    ss += x * x;
    ++cnt;
  }
  CHECK(ss / cnt == doctest::Approx(0.25 * ds.scales[0]).epsilon(0.1));
  spec.gaussian_sd_scale = 0.0;
  CHECK_THROWS_AS(gen_gaussian_clusters(spec), ConfigError);
}

TEST_CASE("noise") {
  const auto ds = gen_uniform_clusters({3, 200, 3, Family::Uniform, 0.0, false, 1.0, 9});
  const auto same = add_noise(ds, 0.0, 1);
  CHECK(same.points.coords() == ds.points.coords());
  CHECK(same.noise_count == 0);

  const auto noisy = add_noise(ds, 0.2, 1);
  CHECK(noisy.noise_count == 40);
  CHECK(noisy.points.size() == 240);
  CHECK(std::count(noisy.true_labels.begin(), noisy.true_labels.end(), 3) == 40);
  for (std::size_t c = 0; c < 3; ++c) {
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t i = 0; i < 200; ++i) {
      lo = std::min(lo, coord(ds.points, i, c));
      hi = std::max(hi, coord(ds.points, i, c));
    }
    for (std::size_t i = 200; i < 240; ++i) {
      CHECK(coord(noisy.points, i, c) >= lo);
      CHECK(coord(noisy.points, i, c) <= hi);
    }
  }
}

TEST_CASE("generation is deterministic") {
  const SimSpec spec{5, 200, 5, Family::Gaussian, 0.1, false, 1.0, 11};
  CHECK(generate(spec).points.coords() == generate(spec).points.coords());
  SimSpec other = spec;
  other.rng_seed = 12;
  CHECK(generate(spec).points.coords() != generate(other).points.coords());
}
