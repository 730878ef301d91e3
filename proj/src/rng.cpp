#include "lassoinfer/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lassoinfer/errors.hpp"

namespace lassoinfer {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(stream >> 32),
        0x9e3779b9u,
    };
    eng_.seed(seq);
}

double RngStream::uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_normal_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    if (n == 0) throw InputError("uniform_int: n must be positive");
    const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
    const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() - rem;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x > bound);
    return x % n;
}

std::vector<int> RngStream::sample_indices(int n, int k) {
    if (k < 0 || k > n) throw InputError("sample_indices: need 0 <= k <= n");
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(uniform_int(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace lassoinfer
