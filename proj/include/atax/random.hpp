#pragma once

#include <cstdint>
#include <random>

#include "atax/geometry.hpp"

namespace atax {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under user seed `seed`. The mapping is a pure
/// function of its two arguments, so Monte Carlo trials drawn from distinct
/// streams do not depend on execution order or thread count.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Generator state handed to the samplers: a 64-bit Mersenne Twister seeded
/// through `stream_seed`, plus a standard normal distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng for_stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(stream_seed(seed, index));
    }

    double normal() { return normal_(engine_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    /// d i.i.d. standard normal coordinates.
    Vector gaussian(Eigen::Index d);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Uniform point on S^{d-1}: a normalized standard Gaussian vector.
Direction sample_uniform_direction(Eigen::Index d, Rng& rng);

/// Uniform unit vector in the orthogonal complement of the columns of
/// `orthonormal` (d x k, k < d).
Direction sample_orthogonal_direction(const Matrix& orthonormal, Rng& rng);

}  // namespace atax
