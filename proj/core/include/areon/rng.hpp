#pragma once

#include <cmath>
#include <cstdint>

namespace areon::rng {

// All randomness in a run is derived by hashing (seed, domain, entity ids).
// Keyed streams keep sampling order-independent: a draw depends only on what
// it is for, never on how many draws happened before it, which is what makes
// reruns and parallel sweeps byte-stable. Standard <random> distributions are
// implementation-defined, so inverse-CDF sampling is done by hand.

inline constexpr std::uint64_t kDomEligibility = 0x01;
inline constexpr std::uint64_t kDomStake = 0x02;
inline constexpr std::uint64_t kDomDelay = 0x03;
inline constexpr std::uint64_t kDomPayloadKind = 0x04;
inline constexpr std::uint64_t kDomPayloadKey = 0x05;
inline constexpr std::uint64_t kDomTx = 0x06;
inline constexpr std::uint64_t kDomGen = 0x07;

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t domain,
                         std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(mix64(seed) ^ domain) ^ a) ^ b);
}

// Uniform in [0, 1) with 53 significant bits.
inline double u01(std::uint64_t x) {
  return double(x >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t domain,
                      std::uint64_t a, std::uint64_t b = 0) {
  return u01(mix(seed, domain, a, b));
}

// Pareto with scale 1: inverse CDF of P(X > x) = x^(-shape).
inline double pareto(double u, double shape) {
  return std::pow(1.0 - u, -1.0 / shape);
}

inline double exp_capped(double u, double mean, double cap) {
  double d = -mean * std::log1p(-u);
  return d < cap ? d : cap;
}

inline double fixed_bound(double u, double cap) { return u * cap; }

}  // namespace areon::rng
