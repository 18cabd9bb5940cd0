#pragma once

#include "dcurv/types.hpp"

#include <random>

namespace dcurv {

/// SplitMix64 finalizer; derives independent stream seeds from (seed, stream).
constexpr Seed mix_seed(Seed seed, Seed stream = 0) noexcept {
    Seed z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(Seed seed, Seed stream = 0) { return Rng(mix_seed(seed, stream)); }

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

/// Uniform direction on the unit sphere S^{dim-1}.
inline Vector unit_direction(Rng& rng, Index dim) {
    Vector v(static_cast<Eigen::Index>(dim));
    double norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = standard_normal(rng);
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

}  // namespace dcurv
