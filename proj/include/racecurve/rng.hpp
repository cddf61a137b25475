#pragma once
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace racecurve {

/// Stateless SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream key from a root seed and a path of
/// counters, e.g. (seed, N, replicate). Same inputs, same key, regardless of
/// which thread asks.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded random stream. Conversions to doubles and bounded integers are
/// done here, not by <random> distributions, so output is identical across
/// standard library implementations.
class RandomStream {
   public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

    template <class T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace racecurve
