#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string_view>
#include <vector>

namespace attn {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ mix64(b));
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic splitmix64 stream. Pure integer arithmetic, so the same seed
// reproduces the same sequence on every platform and in every run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    // Keyed substream: (seed, stream) always maps to the same sequence,
    // independent of any other substream's consumption.
    static Rng keyed(std::uint64_t seed, std::uint64_t stream) noexcept {
        return Rng(hash_combine(seed, stream));
    }

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased integer in [0,n); n must be >= 1 (Lemire multiply-shift)
    std::uint32_t next_below(std::uint32_t n) noexcept {
        std::uint64_t x = static_cast<std::uint32_t>(next_u64());
        std::uint64_t m = x * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            const std::uint32_t t = std::uint32_t(-n) % n;
            while (lo < t) {
                x = static_cast<std::uint32_t>(next_u64());
                m = x * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    // standard normal, Box-Muller cosine branch
    double next_normal() noexcept {
        double u1 = next_unit();
        const double u2 = next_unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // fair coin in {-1,+1}
    int next_sign() noexcept { return (next_u64() & 1u) ? +1 : -1; }

private:
    std::uint64_t state_;
};

// Fisher-Yates permutation of {0,...,n-1} drawn from rng.
template <typename Int>
std::vector<Int> random_permutation(std::size_t n, Rng rng) {
    std::vector<Int> perm(n);
    std::iota(perm.begin(), perm.end(), Int{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::uint32_t j = rng.next_below(static_cast<std::uint32_t>(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace attn
