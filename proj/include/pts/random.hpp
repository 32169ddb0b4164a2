#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic random helpers. std::mt19937_64 output is fully specified by
// the standard, but the standard *distributions* are not, so all mappings from
// raw engine words to doubles/ints live here and are fixed by this code.

namespace pts {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n). Modulo bias is irrelevant at our n << 2^64.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

/// Standard normal via Box-Muller (no cached second value; one draw per call).
inline double normal01(Rng& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

namespace detail {

/// splitmix64 finalizer; avalanches lattice coordinates into hash words.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double lattice_value(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(ix) * 0x100000001b3ULL ^
                            mix64(static_cast<std::uint64_t>(iy) ^ seed));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Seeded 2-D value noise in [0,1]: hashed lattice values, smoothstep-blended.
/// `scale` is the lattice cell size in pixels.
inline double value_noise(double x, double y, double scale, std::uint64_t seed) {
    const double fx = x / scale;
    const double fy = y / scale;
    const auto ix = static_cast<std::int64_t>(std::floor(fx));
    const auto iy = static_cast<std::int64_t>(std::floor(fy));
    double tx = fx - static_cast<double>(ix);
    double ty = fy - static_cast<double>(iy);
    tx = tx * tx * (3.0 - 2.0 * tx);
    ty = ty * ty * (3.0 - 2.0 * ty);
    const double v00 = detail::lattice_value(ix, iy, seed);
    const double v10 = detail::lattice_value(ix + 1, iy, seed);
    const double v01 = detail::lattice_value(ix, iy + 1, seed);
    const double v11 = detail::lattice_value(ix + 1, iy + 1, seed);
    const double a = v00 + (v10 - v00) * tx;
    const double b = v01 + (v11 - v01) * tx;
    return a + (b - a) * ty;
}

/// Two-octave value noise, still in [0,1]. Most of the energy sits in a mid
/// octave: coarse enough to survive the half-zoom resampling of saturated
/// search regions, fine enough that unrelated windows decorrelate and
/// sub-pixel phase shifts stay small against the in-window variance.
inline double texture_noise(double x, double y, std::uint64_t seed) {
    return 0.8 * value_noise(x, y, 4.6, seed) +
           0.2 * value_noise(x, y, 10.0, seed ^ 0x5bd1e995ULL);
}

} // namespace pts
