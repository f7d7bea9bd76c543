#include "dynlab/noise.hpp"

#include <cmath>

#include "dynlab/errors.hpp"

namespace dynlab {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SeedKey SeedKey::child(std::uint64_t index) const {
    return {master_seed, mix64(stream_id ^ mix64(index + 0x632be59bd9b4e019ULL))};
}

std::mt19937_64 make_engine(SeedKey key) {
    std::seed_seq seq{static_cast<std::uint32_t>(key.master_seed),
                      static_cast<std::uint32_t>(key.master_seed >> 32),
                      static_cast<std::uint32_t>(key.stream_id),
                      static_cast<std::uint32_t>(key.stream_id >> 32)};
    return std::mt19937_64(seq);
}

NoiseStream::NoiseStream(SeedKey key, std::size_t dim)
    : key_(key), dim_(dim), engine_(make_engine(key)) {}

void NoiseStream::increments(double dt, std::span<double> out) {
    if (out.size() != dim_) throw DimensionMismatch("noise increment buffer has wrong length");
    const double scale = std::sqrt(dt);
    for (double& v : out) v = scale * normal_(engine_);
}

} // namespace dynlab
