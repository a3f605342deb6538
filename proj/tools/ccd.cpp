// ccd: cluster files, simulate benchmark data, run replicated benchmarks and
// score predictions.
//
// Exit codes: 0 success, 2 configuration error, 3 input or parse error,
// 4 internal invariant violation.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccd/errors.hpp"
#include "ccd/harness.hpp"

namespace {

namespace h = ccd::harness;

constexpr int kConfigExit = 2;
constexpr int kInputExit = 3;
constexpr int kInvariantExit = 4;

std::vector<ccd::Method> methods_from(const std::string& name) {
  if (name == "all" || name == "ALL") return {ccd::Method::UN, ccd::Method::RK, ccd::Method::KS};
  return {ccd::parse_method(name)};
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    h::write_file_atomic(out, content);
  }
}

h::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ccd::InputError("cannot open '" + path + "'");
  try {
    return h::json::parse(in);
  } catch (const h::json::parse_error& e) {
    throw ccd::ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster catch digraph clustering toolkit"};
  app.require_subcommand(1);

  // cluster
  h::ClusterRequest creq;
  std::string c_method = "un";
  std::string c_alpha = "0.01";
  std::string c_out;
  auto* cluster = app.add_subcommand("cluster", "Cluster the points of a CSV file");
  cluster->add_option("--input", creq.input, "CSV file")->required();
  cluster->add_option("--method", c_method, "un, rk, ks or all");
  cluster->add_option("--alpha", c_alpha, "significance level, or `paper` for the schedule");
  cluster->add_option("--delta-root", creq.delta_roots,
                      "KS: d-th root of delta; several values are searched by silhouette")
      ->delimiter(',');
  cluster->add_option("--mc-replicates", creq.mc_replicates, "Monte Carlo replicates");
  cluster->add_option("--seed", creq.seed, "Monte Carlo seed");
  cluster->add_flag("--normalize", creq.normalize, "z-score each feature");
  cluster->add_flag("--flexible", creq.flexible, "clusters from intersection graph components");
  cluster->add_flag("--descending", creq.descending, "search radii from the largest down");
  bool c_rk_exclude = false;
  cluster->add_flag("--rk-exclude-center", c_rk_exclude, "RK: leave the ball center out of the test");
  cluster->add_option("--out", c_out, "JSON report (stdout when omitted)");

  // simulate
  ccd::synth::SimSpec sim;
  std::string s_family = "uniform";
  std::string s_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a labeled benchmark dataset");
  simulate->add_option("--family", s_family, "uniform or gaussian");
  simulate->add_option("--d", sim.dim, "dimension");
  simulate->add_option("--n", sim.n, "regular points");
  simulate->add_option("--k", sim.k, "clusters (2, 3 or 5)");
  simulate->add_option("--noise", sim.noise_level, "noise fraction of n");
  simulate->add_flag("--noise-study", sim.noise_study, "widely spaced three-center layout");
  simulate->add_option("--sd-scale", sim.gaussian_sd_scale, "Gaussian sd multiplier on sqrt(Delta)");
  simulate->add_option("--seed", sim.rng_seed, "dataset seed");
  simulate->add_option("--out", s_out, "CSV file (stdout when omitted)");

  // bench
  std::string b_spec;
  std::size_t b_replicates = 0;
  std::string b_out;
  std::string b_rows;
  auto* bench = app.add_subcommand("bench", "Replicated benchmark from a JSON run spec");
  bench->add_option("--spec", b_spec, "JSON run spec")->required();
  bench->add_option("--replicates", b_replicates, "override the spec's replicate count");
  bench->add_option("--out", b_out, "JSON report (stdout when omitted)");
  bench->add_option("--rows-csv", b_rows, "per-replicate rows as CSV");

  // evaluate
  std::string e_pred;
  std::string e_truth;
  std::string e_data;
  std::string e_out;
  auto* evaluate = app.add_subcommand("evaluate", "Score predicted labels against the truth");
  evaluate->add_option("--pred", e_pred, "predicted labels")->required();
  evaluate->add_option("--truth", e_truth, "true labels")->required();
  evaluate->add_option("--data", e_data, "data CSV")->required();
  evaluate->add_option("--out", e_out, "JSON report (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*cluster) {
      creq.methods = methods_from(c_method);
      creq.rk_include_center = !c_rk_exclude;
      if (c_alpha == "paper") {
        creq.alpha.reset();
      } else {
        try {
          creq.alpha = std::stod(c_alpha);
        } catch (const std::exception&) {
          throw ccd::ConfigError("--alpha must be a number or `paper`");
        }
      }
      emit(c_out, h::run_cluster(creq).dump(2) + "\n");
    } else if (*simulate) {
      sim.family = ccd::synth::parse_family(s_family);
      const auto ds = ccd::synth::generate(sim);
      std::ostringstream csv;
      h::write_csv(csv, ds.points, &ds.true_labels);
      emit(s_out, csv.str());
    } else if (*bench) {
      h::json spec = read_json(b_spec);
      if (b_replicates > 0) spec["replicates"] = b_replicates;
      const auto report = h::run_bench(h::parse_run_config(spec));
      emit(b_out, h::to_json(report).dump(2) + "\n");
      if (!b_rows.empty()) h::write_file_atomic(b_rows, h::rows_csv(report));
      if (!b_out.empty() && b_out != "-") std::cout << h::summary_text(report);
    } else if (*evaluate) {
      emit(e_out, h::evaluate(e_pred, e_truth, e_data).dump(2) + "\n");
    }
  } catch (const ccd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const ccd::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputExit;
  } catch (const ccd::UndefinedMetric& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputExit;
  } catch (const ccd::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariantExit;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariantExit;
  }
  return 0;
}
