#include "ccd/rng.hpp"

#include <cmath>

namespace ccd::rng {

std::uint64_t mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed,
                     std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix(seed);
  for (std::uint64_t p : path) h = mix(h ^ mix(p + 0x632be59bd9b4e019ULL));
  return h;
}

Engine engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Engine(derive(seed, path));
}

// Streams must not depend on the standard library's unspecified
// distribution algorithms, so the transforms below are explicit.
double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

double normal(Engine& eng) {
  // Marsaglia polar method; the spare deviate is discarded to keep each
  // call a pure function of the engine state.
  double u, v, s;
  do {
    u = 2.0 * uniform01(eng) - 1.0;
    v = 2.0 * uniform01(eng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

void uniform_in_ball(Engine& eng, double radius, std::span<double> out) {
  const std::size_t d = out.size();
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : out) {
      x = normal(eng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  // 1 - U lies in (0, 1], so the radial draw never collapses to the origin
  // by rounding alone.
  const double u = 1.0 - uniform01(eng);
  const double r = radius * std::pow(u, 1.0 / static_cast<double>(d));
  const double scale = r / std::sqrt(norm2);
  for (double& x : out) x *= scale;
}

}  // namespace ccd::rng
