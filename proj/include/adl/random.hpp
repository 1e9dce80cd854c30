#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace adl {

/// SplitMix64 finalizer, used to derive independent seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over a string tag, so seeds can be keyed by names.
constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t salt) noexcept {
    return mix_seed(parent ^ mix_seed(salt));
}

/// Seeded generator with platform-independent sampling helpers.
///
/// std::uniform_*_distribution output is implementation-defined, so all
/// draws go through the raw mt19937_64 stream, which is fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound) by rejection sampling.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal();

    /// k distinct indices from [0, n), uniformly, in draw order.
    std::vector<int> sample_without_replacement(int n, int k);

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace adl
