#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccd/core.hpp"
#include "ccd/errors.hpp"
#include "ccd/rng.hpp"
#include "ccd/srt.hpp"
#include "oracles.hpp"

using namespace ccd;

namespace {

PointSet in_ball(std::size_t n, std::size_t dim, double radius, std::uint64_t seed) {
  auto eng = rng::engine(seed, {31});
  std::vector<double> xs(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    rng::uniform_in_ball(eng, radius, std::span<double>(xs.data() + i * dim, dim));
  }
  return PointSet(n, dim, std::move(xs));
}

// Points other than `center` within `r` of it, nearest first.
std::vector<std::size_t> interior(const PointSet& ps, std::size_t center, double r) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (j != center && oracle::dist(ps, center, j) <= r) out.push_back(j);
  }
  return out;
}

std::vector<double> level_radii(const PointSet& ps, std::size_t center) {
  std::vector<double> r;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (j != center) r.push_back(oracle::dist(ps, center, j));
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

// Ascending walk re-run through the public single-ball tests.
template <typename Rejects>
double replay_ascending(const PointSet& ps, std::size_t center, Rejects&& rejects) {
  double previous = 0.0;
  for (double r : level_radii(ps, center)) {
    if (rejects(r)) return previous;
    previous = r;
  }
  return previous;
}

}  // namespace

TEST_CASE("NND statistics, hand example") {
  const auto s = nnd_statistics(PointSet::from_rows({{0.0}, {1.0}, {3.0}}));
  CHECK(s.mean == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(s.median == 1.0);
}

TEST_CASE("NND statistics, coincident points") {
  const auto s = nnd_statistics(PointSet::from_rows({{2.0, 2.0}, {2.0, 2.0}}));
  CHECK(s.mean == 0.0);
  CHECK(s.median == 0.0);
}

TEST_CASE("NND statistics need two points") {
  CHECK_THROWS_AS(nnd_statistics(PointSet::from_rows({{1.0}})), InputError);
}

TEST_CASE("nearest neighbor distances match a pair scan") {
  const auto ps = in_ball(50, 2, 1.0, 9);
  const auto nnd = nearest_neighbor_distances(ps);
  for (std::size_t i = 0; i < 50; ++i) {
    double best = 1e300;
    for (std::size_t j = 0; j < 50; ++j) {
      if (j != i) best = std::min(best, oracle::dist(ps, i, j));
    }
    CHECK(nnd[i] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("Holm step-down") {
  const std::vector<double> p{0.01, 0.20};
  CHECK(holm_step_down(p, 0.05) == std::vector<bool>{true, false});
  const std::vector<double> q{0.20, 0.01};
  CHECK(holm_step_down(q, 0.05) == std::vector<bool>{false, true});
  const std::vector<double> both{0.02, 0.04};
  CHECK(holm_step_down(both, 0.05) == std::vector<bool>{true, true});
  const std::vector<double> none{0.03, 0.04};
  CHECK(holm_step_down(none, 0.05) == std::vector<bool>{false, false});
}

TEST_CASE("empirical p-values at the extremes") {
  const auto null = NndNull::simulate(2, 10, 99, 4);
  CHECK(null.replicates() == 99);
  CHECK(null.p_mean(0.0) == doctest::Approx(1.0 / 100.0));
  CHECK(null.p_median(1e9) == 1.0);
  const std::vector<double> p{null.p_mean(0.0), null.p_median(1e9)};
  CHECK(holm_step_down(p, 0.05) == std::vector<bool>{true, false});
}

TEST_CASE("replicate counts") {
  CHECK(min_replicates(0.05) == 40);
  CHECK(min_replicates(0.001) == 2000);
  SrtConfig cfg;
  cfg.alpha = 0.001;
  cfg.num_replicates = 999;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("NND test is vacuous below two points") {
  SrtConfig cfg;
  const auto out = mc_srt_nnd(PointSet::from_rows({{0.5}}), {0, 1.0}, cfg);
  CHECK(out.vacuous);
  CHECK_FALSE(out.reject);
}

TEST_CASE("Ripley K-hat") {
  const auto two = PointSet::from_rows({{0.0, 0.0}, {1.0, 0.0}});
  CHECK(ripley_k_hat(two, 2.0, 7.0) == doctest::Approx(7.0));
  CHECK(ripley_k_hat(two, 0.5, 7.0) == 0.0);
  CHECK_THROWS_AS(ripley_k_hat(two, 1.0, 0.0), InputError);

  const auto ps = in_ball(30, 2, 1.0, 10);
  const double v = ball_volume(2, 1.0);
  CHECK(v == doctest::Approx(M_PI));
  for (double t : {0.1, 0.3, 0.7}) {
    double pairs = 0;
    for (std::size_t i = 0; i < 30; ++i) {
      for (std::size_t j = 0; j < 30; ++j) pairs += (i != j && oracle::dist(ps, i, j) <= t);
    }
    CHECK(std::abs(ripley_k_hat(ps, t, v) - v * pairs / (30.0 * 29.0)) <= 1e-12);
  }
}

TEST_CASE("Ripley test rejects coincident points") {
  SrtConfig cfg;
  const auto ps = PointSet::from_rows(std::vector<std::vector<double>>(10, {0.1, 0.1}));
  CHECK(mc_srt_ripley(ps, {0, 1.0}, cfg));
}

TEST_CASE("Ripley test on two points replays from the null table") {
  SrtConfig cfg;
  cfg.rng_seed = 21;
  const auto ps = PointSet::from_rows({{0.0, 0.0}, {0.5, 0.0}});
  const auto null = RipleyNull::simulate(2, 2, cfg.num_replicates, cfg.rng_seed);
  bool expected = false;
  for (std::size_t k = 1; k <= kRipleyGridSize; ++k) {
    const std::uint64_t count = (0.5 <= static_cast<double>(k) / kRipleyGridSize) ? 2 : 0;
    expected = expected || count > null.upper_quantile(k, cfg.alpha);
  }
  CHECK(mc_srt_ripley(ps, {0, 1.0}, cfg) == expected);
}

TEST_CASE("Ripley grid bins") {
  CHECK(ripley_grid_bin(0.0) == 1);
  CHECK(ripley_grid_bin(0.1) == 1);
  CHECK(ripley_grid_bin(0.15) == 2);
  CHECK(ripley_grid_bin(1.0) == 10);
  CHECK(ripley_grid_bin(1.01) == 11);
}

TEST_CASE("Ripley aggregate rejection rate stays under m alpha") {
  SrtConfig cfg;
  cfg.rng_seed = 5;
  NullTables nulls(2, cfg.num_replicates, cfg.rng_seed);
  int rejections = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    const auto ps = in_ball(15, 2, 1.0, 100 + t);
    rejections += mc_srt_ripley(ps, {0, 1.0}, cfg, nulls);
  }
  CHECK(rejections / 500.0 <= kRipleyGridSize * cfg.alpha);
}

TEST_CASE("radius_un on two clumps replays the seeded test sequence") {
  const auto ps = PointSet::from_rows({{0.0}, {0.1}, {0.2}, {10.0}, {10.1}});
  SrtConfig cfg;
  cfg.rng_seed = 3;
  const auto ball = radius_un(0, ps, cfg);
  // At r = 10 the median NND p-value is about 1 - 0.97^3, just above the Holm
  // cutoff 0.025, so only the full far clump forces a rejection.
  CHECK(ball.radius < 10.1);
  const double replay = replay_ascending(ps, 0, [&](double r) {
    const auto local = ps.subset(interior(ps, 0, r));
    return mc_srt_nnd(local, {0, r}, cfg).reject;
  });
  CHECK(ball.radius == replay);
}

TEST_CASE("radius_rk on two clumps replays the seeded test sequence") {
  const auto ps = PointSet::from_rows({{0.0}, {0.1}, {0.2}, {10.0}, {10.1}});
  for (bool with_center : {true, false}) {
    SrtConfig cfg;
    cfg.rng_seed = 3;
    cfg.ripley_include_center = with_center;
    const auto ball = radius_rk(0, ps, cfg);
    if (with_center) CHECK(ball.radius < 10.0);
    const double replay = replay_ascending(ps, 0, [&](double r) {
      auto ids = interior(ps, 0, r);
      if (ids.size() < 2) return false;
      if (with_center) ids.insert(ids.begin(), 0);
      return mc_srt_ripley(ps.subset(ids), {0, r}, cfg);
    });
    CHECK(ball.radius == replay);
  }
}

TEST_CASE("radius searches on two points are vacuous") {
  const auto ps = PointSet::from_rows({{0.0, 0.0}, {0.3, 0.4}});
  SrtConfig cfg;
  CHECK(radius_un(0, ps, cfg).radius == doctest::Approx(0.5));
  CHECK(radius_rk(1, ps, cfg).radius == doctest::Approx(0.5));
}

TEST_CASE("descending walk keeps the largest accepted radius") {
  const auto ps = PointSet::from_rows({{0.0}, {0.1}, {0.2}, {10.0}, {10.1}});
  SrtConfig cfg;
  cfg.rng_seed = 3;
  cfg.descending = true;
  const auto ball = radius_un(0, ps, cfg);
  double expected = 0.0;
  const auto radii = level_radii(ps, 0);
  for (std::size_t i = radii.size(); i-- > 0;) {
    const double r = radii[i];
    if (!mc_srt_nnd(ps.subset(interior(ps, 0, r)), {0, r}, cfg).reject) {
      expected = r;
      break;
    }
  }
  CHECK(ball.radius == expected);
}

TEST_CASE("uniform data mostly reaches the maximal radius") {
  SrtConfig cfg;
  cfg.alpha = 0.001;
  cfg.num_replicates = 2000;
  cfg.rng_seed = 8;
  NullTables nulls(2, cfg.num_replicates, cfg.rng_seed);
  int un_max = 0;
  int rk_max = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    // Centered on the middle of the support, so the largest ball is the window.
    auto xs = in_ball(25, 2, 1.0, 500 + run).coords();
    xs[0] = 0.0;
    xs[1] = 0.0;
    const PointSet ps(25, 2, std::move(xs));
    const auto dm = pairwise_distances(ps);
    double far = 0.0;
    for (std::size_t j = 1; j < ps.size(); ++j) far = std::max(far, dm(0, j));
    un_max += radius_un(0, dm, cfg, nulls).radius == far;
    rk_max += radius_rk(0, dm, cfg, nulls).radius == far;
  }
  CHECK(un_max >= 90);
  CHECK(rk_max >= 90);
}

TEST_CASE("KS statistic, hand example") {
  const auto ps = PointSet::from_rows({{0.0}, {1.0}, {2.0}, {3.0}});
  const auto dm = pairwise_distances(ps);
  const auto ks = ks_statistic(0, dm, 1, 0.5);
  CHECK(ks.t_values == std::vector<double>{0.0, 0.5, 1.0, 1.5});
  CHECK(radius_ks(0, dm, 1, 0.5).radius == 3.0);
  CHECK(radius_ks(0, dm, 1, 2.0).radius == 0.0);
  CHECK_THROWS_AS(radius_ks(0, dm, 1, 0.0), ConfigError);
}

TEST_CASE("KS radius is the exhaustive argmax") {
  const auto ps = oracle::random_points(50, 3, 12);
  const auto dm = pairwise_distances(ps);
  const double delta = 40.0;
  for (std::size_t c = 0; c < 50; ++c) {
    std::vector<double> radii;
    for (std::size_t j = 0; j < 50; ++j) {
      if (j != c) radii.push_back(oracle::dist(ps, c, j));
    }
    std::sort(radii.begin(), radii.end());
    double best_r = 0.0;
    double best_t = 0.0;
    for (double r : radii) {
      double count = 0;
      for (std::size_t q = 0; q < 50; ++q) count += (q != c && oracle::dist(ps, c, q) <= r);
      const double t = count - delta * r * r * r;
      if (t > best_t) {
        best_t = t;
        best_r = r;
      }
    }
    CHECK(radius_ks(c, dm, 3, delta).radius == doctest::Approx(best_r).epsilon(1e-12));
  }
}

TEST_CASE("KS radius scales with the coordinates") {
  const auto ps = oracle::random_points(40, 2, 13);
  const double c = 3.7;
  std::vector<double> scaled = ps.coords();
  for (double& x : scaled) x *= c;
  const PointSet big(40, 2, std::move(scaled));
  const double delta = 60.0;
  for (std::size_t i = 0; i < 40; ++i) {
    const double r = radius_ks(i, ps, delta).radius;
    const double rc = radius_ks(i, big, delta / (c * c)).radius;
    CHECK(std::abs(rc - c * r) <= 1e-9);
  }
}
