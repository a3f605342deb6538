#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace ccd::rng {

using Engine = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t x) noexcept;

/// Seed of an independent sub-stream identified by `path` under `seed`.
/// Stable across platforms; the same (seed, path) always yields the same value.
std::uint64_t derive(std::uint64_t seed,
                     std::initializer_list<std::uint64_t> path) noexcept;

Engine engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

double uniform01(Engine& eng);  // in [0, 1)
double uniform(Engine& eng, double lo, double hi);
double normal(Engine& eng);  // standard normal

/// Writes one point drawn uniformly from the closed d-ball of `radius` around
/// the origin into `out` (size d): Gaussian direction, radius r * U^(1/d).
void uniform_in_ball(Engine& eng, double radius, std::span<double> out);

}  // namespace ccd::rng
