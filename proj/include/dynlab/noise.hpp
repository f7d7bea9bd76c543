#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace dynlab {

/// Hierarchical key for a reproducible random stream.
struct SeedKey {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    /// Key for a sub-stream; children of distinct parents or distinct
    /// indices never collide in practice (64-bit mixing).
    SeedKey child(std::uint64_t index) const;

    bool operator==(const SeedKey&) const = default;
};

/// SplitMix64 finalizer, used to derive engine seeds and child stream ids.
std::uint64_t mix64(std::uint64_t x);

/// Gaussian increments dW ~ N(0, dt) per channel. Single owner; copy to fork
/// an identical stream.
class NoiseStream {
public:
    NoiseStream(SeedKey key, std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    const SeedKey& key() const noexcept { return key_; }

    /// Fills out (length dim) with independent N(0, dt) draws.
    void increments(double dt, std::span<double> out);

private:
    SeedKey key_;
    std::size_t dim_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// General-purpose engine for GP operators and environment sampling.
std::mt19937_64 make_engine(SeedKey key);

} // namespace dynlab
