#include "ccd/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "ccd/errors.hpp"

namespace ccd {

namespace {

// Maps arbitrary labels to 0 .. k-1 in order of first appearance.
std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& k) {
  std::map<int, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids.try_emplace(l, ids.size()).first->second);
  k = ids.size();
  return out;
}

using Wide = __int128;

Wide choose2(std::size_t n) {
  const auto w = static_cast<Wide>(n);
  return w * (w - 1) / 2;
}

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw InputError("label vectors differ in length (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw InputError("ARI needs at least 2 points");

  std::size_t ka = 0;
  std::size_t kb = 0;
  const auto ca = compact(a, ka);
  const auto cb = compact(b, kb);
  std::vector<std::size_t> table(ka * kb, 0);
  std::vector<std::size_t> rows(ka, 0);
  std::vector<std::size_t> cols(kb, 0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    ++table[ca[i] * kb + cb[i]];
    ++rows[ca[i]];
    ++cols[cb[i]];
  }

  Wide index = 0;
  for (std::size_t c : table) index += choose2(c);
  Wide sum_a = 0;
  for (std::size_t c : rows) sum_a += choose2(c);
  Wide sum_b = 0;
  for (std::size_t c : cols) sum_b += choose2(c);
  const Wide total = choose2(a.size());

  // (index - expected) / (max - expected) with expected = sum_a sum_b / total
  // and max = (sum_a + sum_b) / 2, scaled by 2 * total to stay in integers.
  const Wide num = 2 * total * index - 2 * sum_a * sum_b;
  const Wide den = total * (sum_a + sum_b) - 2 * sum_a * sum_b;
  if (den == 0) return 1.0;
  return static_cast<double>(static_cast<long double>(num) /
                             static_cast<long double>(den));
}

std::size_t count_clusters(std::span<const int> labels) {
  std::size_t k = 0;
  compact(labels, k);
  return k;
}

std::vector<double> silhouette_values(const DistanceMatrix& dm,
                                      std::span<const int> labels) {
  const std::size_t n = labels.size();
  if (dm.size() != n) {
    throw InputError("label count " + std::to_string(n) +
                     " does not match point count " + std::to_string(dm.size()));
  }
  std::size_t k = 0;
  const auto id = compact(labels, k);
  if (k < 2) throw UndefinedMetric("silhouette needs at least two clusters");

  std::vector<std::size_t> size(k, 0);
  for (std::size_t c : id) ++size[c];

  std::vector<double> s(n, 0.0);
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = id[i];
    if (size[own] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    const auto row = dm.row(i);
    for (std::size_t j = 0; j < n; ++j) sums[id[j]] += row[j];
    const double a = sums[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(size[c]));
    }
    const double denom = std::max(a, b);
    s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return s;
}

double avg_silhouette(const DistanceMatrix& dm, std::span<const int> labels) {
  const auto s = silhouette_values(dm, labels);
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

double avg_silhouette(const PointSet& ps, std::span<const int> labels) {
  return avg_silhouette(pairwise_distances(ps), labels);
}

double success_rate(std::span<const std::pair<std::size_t, std::size_t>> runs) {
  if (runs.empty()) throw InputError("success rate needs at least one run");
  const auto hits = std::count_if(runs.begin(), runs.end(),
                                  [](const auto& r) { return r.first == r.second; });
  return static_cast<double>(hits) / static_cast<double>(runs.size());
}

ValidationReport validate(const DistanceMatrix& dm, std::span<const int> predicted,
                          std::span<const int> truth,
                          std::optional<std::size_t> k_true) {
  ValidationReport r;
  r.ari = adjusted_rand_index(predicted, truth);
  r.k_hat = count_clusters(predicted);
  if (r.k_hat >= 2) {
    r.avg_silhouette = avg_silhouette(dm, predicted);
  } else {
    r.silhouette_defined = false;
  }
  r.k_true = k_true ? k_true : std::optional<std::size_t>(count_clusters(truth));
  r.success = r.k_hat == *r.k_true;
  return r;
}

}  // namespace ccd
