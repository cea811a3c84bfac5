#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evosr {

// splitmix64 finalizer; used to derive independent sub-streams.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t hash_label(std::string_view label) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seed for sub-stream (seed, purpose, index). Stable across platforms.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0) noexcept
{
    return mix64(mix64(seed ^ hash_label(purpose)) + mix64(index));
}

class Rng {
public:
    using result_type = std::mt19937_64::result_type;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    // Uniform integer in [lo, hi].
    template <typename Int>
    Int uniform_int(Int lo, Int hi)
    {
        return std::uniform_int_distribution<Int>(lo, hi)(engine_);
    }

    std::size_t index(std::size_t n) { return uniform_int<std::size_t>(0, n - 1); }

    // Uniform real in [lo, hi).
    double uniform(double lo = 0.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean = 0.0, double stddev = 1.0)
    {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace evosr
