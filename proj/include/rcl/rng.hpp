// Seeded random streams. Every source of randomness in the lab is an
// rcl::Rng constructed from a seed derived with derive_seed(), so runs are
// reproducible bit-for-bit regardless of execution order or threading.
//
// std::uniform_*_distribution is implementation-defined, so the draw
// algorithms (bounded ints, unit doubles, Box-Muller normals, Fisher-Yates)
// are spelled out here on top of mt19937_64.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rcl {

// splitmix64 finalizer, used as the mixing function for seed derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kSeedPhi = 0x9E3779B97F4A7C15ull;

// Derives an independent stream seed from a master seed and a path of ids
// (purpose tag, epoch, batch, network, ...). Order-sensitive.
template <class... Ids>
constexpr std::uint64_t derive_seed(std::uint64_t master, Ids... ids) noexcept {
    std::uint64_t h = mix64(master + kSeedPhi);
    ((h = mix64(h ^ (static_cast<std::uint64_t>(ids) + kSeedPhi))), ...);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n). Unbiased via rejection. n must be >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - unit();  // (0, 1], keeps log finite
        const double u2 = unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Uniform sample of k distinct elements from pool, returned sorted.
    // Partial Fisher-Yates: every k-subset is equally likely.
    std::vector<int> sample_without_replacement(std::vector<int> pool, std::size_t k) {
        if (k > pool.size()) k = pool.size();
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rcl
