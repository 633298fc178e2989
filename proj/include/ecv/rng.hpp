#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ecv {

/// What a substream is used for. Part of the key, so streams for different
/// purposes never collide even when (seed, k, index) coincide.
enum class StreamPurpose : std::uint64_t {
    Draw = 1,
    Tree = 2,
    Center = 3,
    Simulate = 4,
    Split = 5,
    Folds = 6,
    Overlap = 7,
    Derive = 8,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Fold a key path into a single 64-bit stream id.
constexpr std::uint64_t stream_key(std::uint64_t seed, StreamPurpose purpose,
                                   std::initializer_list<std::uint64_t> path = {}) noexcept {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc908ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(purpose));
    for (std::uint64_t v : path) h = mix64(h ^ mix64(v + 0x3c6ef372fe94f82bULL));
    return h;
}

/// A random stream addressed by key rather than by position in a shared
/// sequence: the draws for (seed, purpose, path...) are the same no matter
/// which thread asks or in what order.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key) : engine_(key) {}
    Rng(std::uint64_t seed, StreamPurpose purpose, std::initializer_list<std::uint64_t> path = {})
        : engine_(stream_key(seed, purpose, path)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform integer in [0, bound).
    std::size_t below(std::size_t bound) {
        return std::uniform_int_distribution<std::size_t>(0, bound - 1)(engine_);
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double normal() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace ecv
