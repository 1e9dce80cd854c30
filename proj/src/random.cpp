#include "adl/random.hpp"

#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "adl/errors.hpp"

namespace adl {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw ConfigError("Rng::below: bound must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % bound;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
    if (k < 0 || k > n) throw ConfigError("sample_without_replacement: need 0 <= k <= n");
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(i) + below(static_cast<std::uint64_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

}  // namespace adl
