#ifndef JRC_TEST_UTIL_HPP
#define JRC_TEST_UTIL_HPP

#include "jrc/core.hpp"

#include <random>

namespace jrc::test {

inline CVector random_unimodular(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  CVector out(n);
  for (long i = 0; i < n; ++i) out(i) = std::polar(1.0, u(rng));
  return out;
}

inline CVector random_gaussian(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  CVector out(n);
  for (long i = 0; i < n; ++i) {
    const double re = g(rng);
    out(i) = cd{re, g(rng)};
  }
  return out;
}

// Direct sum_x a[x] conj(b[x - t]) for any lengths.
inline cd brute_correlation(const CVector& a, const CVector& b, long t) {
  cd acc{};
  for (long x = 0; x < a.size(); ++x) {
    const long y = x - t;
    if (y >= 0 && y < b.size()) acc += a(x) * std::conj(b(y));
  }
  return acc;
}

inline double max_abs(const CVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace jrc::test

#endif
