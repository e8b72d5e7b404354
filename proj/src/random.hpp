#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace routesim {

using Rng = std::mt19937_64;

// Child seed for an isolated random stream: splitmix64(master ^ fnv1a(label)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

// The helpers below are used instead of <random> distributions, whose output
// is implementation-defined. Everything here is a pure function of the engine
// output, so runs reproduce across standard libraries.

/// Uniform double in [0, 1) with 53 bits of resolution.
double uniform01(Rng& rng);

/// Unbiased uniform integer in [0, n). Requires n > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform integer in [lo, hi], inclusive.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

}  // namespace routesim
