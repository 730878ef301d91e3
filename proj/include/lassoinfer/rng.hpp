#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lassoinfer {

// Deterministic random stream. Replicate r of a seeded experiment draws from
// RngStream(seed, r); the sequence depends only on (seed, stream), never on
// thread scheduling. Gaussians come from an explicit Box-Muller transform so
// the draw sequence does not depend on the standard library's distribution
// internals.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    // Uniform on [0, 1).
    double uniform01();

    // Standard normal.
    double normal();

    // Uniform integer in [0, n), n >= 1. Rejection sampling, unbiased.
    std::uint64_t uniform_int(std::uint64_t n);

    // k distinct indices from {0, ..., n-1}, sorted ascending.
    std::vector<int> sample_indices(int n, int k);

private:
    std::mt19937_64 eng_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace lassoinfer
