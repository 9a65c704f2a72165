#ifndef EWAC_RNG_HPP
#define EWAC_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace ewac {

// All stochastic routines draw from mt19937_64, whose output sequence is fixed
// by the standard. Uniforms are built from the top 53 bits directly instead of
// std::uniform_real_distribution, which is implementation-defined.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  // SplitMix64 finalizer on (seed, stream) so that neighbouring seeds and
  // streams give unrelated generator states.
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return Rng(mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ULL)));
}

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw of an index from a (not necessarily normalised) weight
/// vector, scanning indices in increasing order. Zero-weight indices are
/// never returned.
template <typename Derived>
Eigen::Index sample_categorical(const Eigen::DenseBase<Derived>& weights,
                                Rng& rng) {
  const double total = weights.sum();
  const double target = uniform01(rng) * total;
  double cumulative = 0.0;
  Eigen::Index last_positive = -1;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = k;
    cumulative += weights[k];
    if (target < cumulative) return k;
  }
  return last_positive;  // rounding left target at the top edge
}

}  // namespace ewac

#endif  // EWAC_RNG_HPP
