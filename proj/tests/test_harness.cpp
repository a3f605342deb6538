#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccd/errors.hpp"
#include "ccd/harness.hpp"
#include "oracles.hpp"

using namespace ccd;
namespace h = ccd::harness;

namespace {

h::CsvTable parse(const std::string& text, bool normalize = false) {
  std::istringstream in(text);
  return h::read_csv(in, normalize);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ccd_test_" + name)).string();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("CSV normalization") {
  const auto t = parse("0,0\n2,0\n", true);
  CHECK(t.points.coords() == std::vector<double>{-1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("CSV header and labels") {
  const auto t = parse("a,b,label\n1,2,x\n3,4,y\n5,6,x\n");
  CHECK(t.points.size() == 3);
  CHECK(t.points.dim() == 2);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(*t.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("iris file") {
  const auto t = h::ingest_csv(CCD_TEST_DATA "/iris.csv", true);
  CHECK(t.points.size() == 150);
  CHECK(t.points.dim() == 4);
  CHECK(count_clusters(*t.labels) == 3);
}

TEST_CASE("CSV errors") {
  CHECK_THROWS_AS(parse(""), InputError);
  try {
    parse("1,2\n3\n");
    FAIL("ragged row accepted");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
  }
  try {
    parse("1,2\n3,4\n5,abc\n");
    FAIL("non-numeric cell accepted");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
  }
}

TEST_CASE("CSV round trip is bitwise") {
  const auto ps = oracle::random_points(50, 3, 14, -1e3, 1e3);
  std::ostringstream out;
  h::write_csv(out, ps);
  const auto back = parse(out.str());
  REQUIRE(back.points.coords().size() == ps.coords().size());
  CHECK(std::memcmp(back.points.coords().data(), ps.coords().data(),
                    ps.coords().size() * sizeof(double)) == 0);
  std::ostringstream again;
  h::write_csv(again, back.points);
  CHECK(again.str() == out.str());
}

TEST_CASE("alpha schedule") {
  CHECK(h::schedule_alpha(Method::UN, 2) == 0.15);
  CHECK(h::schedule_alpha(Method::UN, 3) == 0.10);
  CHECK(h::schedule_alpha(Method::UN, 4) == 0.10);
  CHECK(h::schedule_alpha(Method::UN, 5) == 0.05);
  CHECK(h::schedule_alpha(Method::UN, 20) == 0.001);
  CHECK(h::schedule_alpha(Method::UN, 50) == 0.001);
  CHECK(h::schedule_alpha(Method::RK, 9) == 0.01);
  CHECK(h::schedule_alpha(Method::RK, 10) == 0.001);
  CHECK(h::resolve_srt(0.001, 999, false, 0).num_replicates == 2000);
}

TEST_CASE("run spec parsing") {
  CHECK_THROWS_AS(h::parse_run_config(h::json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(h::parse_run_config(h::json{{"method", "ks"}}), ConfigError);
  CHECK_THROWS_AS(h::parse_run_config(h::json{{"d", "three"}}), ConfigError);
  const auto cfg = h::parse_run_config(
      h::json{{"method", "all"}, {"delta_grid", {0.5, 1.0}}, {"alpha", "paper"}, {"d", 4}});
  CHECK(cfg.methods.size() == 3);
  CHECK_FALSE(cfg.alpha.has_value());
  const auto echo = h::parse_run_config(h::to_json(cfg));
  CHECK(h::to_json(echo) == h::to_json(cfg));
}

TEST_CASE("bench is reproducible and its aggregates recompute") {
  const h::json spec{{"family", "gaussian"}, {"d", 2}, {"n", 60}, {"k", 2},
                     {"noise", 0.1}, {"methods", {"un", "rk", "ks"}},
                     {"delta_grid", {0.5, 1.0, 2.0}}, {"replicates", 3},
                     {"seed", 4}, {"timing", false}};
  const auto cfg = h::parse_run_config(spec);
  const auto a = h::run_bench(cfg);
  const auto b = h::run_bench(cfg);
  CHECK(h::to_json(a).dump() == h::to_json(b).dump());

  for (const auto& s : a.methods) {
    double ari = 0.0;
    double hits = 0.0;
    for (const auto& r : s.rows) {
      ari += r.ari;
      hits += r.k_hat == 2;
      CHECK(r.ari_regular.has_value());
    }
    CHECK(s.mean_ari == doctest::Approx(ari / 3.0));
    CHECK(s.success_rate == doctest::Approx(hits / 3.0));
    auto copy = s;
    h::aggregate(copy, 2);
    CHECK(copy.mean_sil == s.mean_sil);
    CHECK(copy.mean_ari_regular == s.mean_ari_regular);
  }
  CHECK(a.summary(Method::KS).rows.front().delta_root.has_value());

  // The report echoes enough to rerun itself.
  const auto rerun = h::run_bench(h::parse_run_config(h::to_json(a)["config"]));
  CHECK(h::to_json(rerun).dump() == h::to_json(a).dump());
}

TEST_CASE("KS grid search keeps the best silhouette") {
  const auto ds = synth::generate({2, 80, 3, synth::Family::Uniform, 0.0, false, 1.0, 3});
  const auto dm = pairwise_distances(ds.points);
  const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
  const auto best = h::ks_grid_search(ds.points, dm, grid, false);
  for (double root : grid) {
    ClusterOptions opts;
    opts.method = Method::KS;
    opts.delta = root * root;
    CHECK(cluster(ds.points, dm, opts).avg_silhouette <= best.clustering.avg_silhouette);
  }
}

TEST_CASE("evaluate") {
  const auto data = temp_path("data.csv");
  const auto truth = temp_path("truth.csv");
  const auto pred = temp_path("pred.csv");
  const auto one = temp_path("one.csv");
  const auto short_file = temp_path("short.csv");
  write(data, "0\n1\n10\n11\n");
  write(truth, "label\n0\n0\n1\n1\n");
  write(pred, "label\n5\n5\n7\n7\n");
  write(one, "label\n0\n0\n0\n0\n");
  write(short_file, "label\n0\n0\n");
  const auto r = h::evaluate(pred, truth, data);
  CHECK(r["ari"] == 1.0);
  CHECK(r["k_hat"] == 2);
  const auto single = h::evaluate(one, truth, data);
  CHECK(single["avg_silhouette"] == 0.0);
  CHECK(single.contains("warning"));
  CHECK_THROWS_AS(h::evaluate(short_file, truth, data), InputError);
  for (const auto& p : {data, truth, pred, one, short_file}) std::filesystem::remove(p);
}

TEST_CASE("cluster a file") {
  const auto path = temp_path("iris_copy.csv");
  std::filesystem::copy_file(CCD_TEST_DATA "/iris.csv", path,
                             std::filesystem::copy_options::overwrite_existing);
  h::ClusterRequest req;
  req.input = path;
  req.normalize = true;
  req.seed = 1;
  const auto out = h::run_cluster(req);
  CHECK(out["n"] == 150);
  CHECK(out["k_true"] == 3);
  CHECK(out["results"][0]["labels"].size() == 150);
  CHECK(out["results"][0]["k_hat"] == 3);
  std::filesystem::remove(path);
}
