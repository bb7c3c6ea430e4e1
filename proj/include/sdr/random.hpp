#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sdr {

/// splitmix64 step, used to derive independent stream seeds from a user seed.
inline std::uint64_t mixSeed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mixSeed(std::uint64_t a, std::uint64_t b) { return mixSeed(mixSeed(a) ^ (b + 0x9e3779b97f4a7c15ULL)); }

/// Deterministic helpers on top of mt19937_64. The distribution adapters in
/// <random> are implementation-defined, so metric files would not be
/// reproducible across standard libraries; these are fully pinned.
inline double uniformReal(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniformReal(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniformReal(gen);
}

/// Uniform integer in [0, n) by rejection sampling, n > 0.
inline std::uint64_t uniformIndex(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % n;
}

/// Standard normal via Box-Muller (the cosine branch only, so one value per
/// two uniforms; stateless and reproducible).
inline double standardNormal(std::mt19937_64& gen) {
  double u1;
  do {
    u1 = uniformReal(gen);
  } while (u1 <= 0.0);
  const double u2 = uniformReal(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Fisher-Yates shuffle with pinned index generation.
template <class T>
void deterministicShuffle(std::vector<T>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniformIndex(gen, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace sdr
