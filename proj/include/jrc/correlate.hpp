#ifndef JRC_CORRELATE_HPP
#define JRC_CORRELATE_HPP

// Aperiodic discrete correlation primitives. One sample per chip throughout:
//   corr(x, y)[t] = sum_m x[m] * conj(y[m - t])
// so that a copy of y delayed by t0 inside x peaks at lag t0.

#include "jrc/core.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace jrc {

namespace detail {

inline long fft_size_for(long n) {
  long size = 1;
  while (size < n) size <<= 1;
  return size;
}

template <typename Scalar>
Eigen::FFT<Scalar>& thread_fft() {
  thread_local Eigen::FFT<Scalar> fft;
  return fft;
}

}  // namespace detail

/// Direct O(M^2) cross-correlation of two equal-length sequences. Entry tau + M - 1 holds lag tau.
template <typename DerivedA, typename DerivedB>
auto cross_correlation(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index m = a.size();
  require(m == b.size(), "cross_correlation: sequence lengths differ");
  require(m > 0, "cross_correlation: empty sequence");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(2 * m - 1);
  for (Eigen::Index tau = -(m - 1); tau <= m - 1; ++tau) {
    Scalar acc{0};
    const Eigen::Index lo = std::max<Eigen::Index>(0, tau);
    const Eigen::Index hi = std::min<Eigen::Index>(m - 1, m - 1 + tau);
    for (Eigen::Index i = lo; i <= hi; ++i) acc += a(i) * std::conj(b(i - tau));
    out(tau + m - 1) = acc;
  }
  return out;
}

/// FFT correlation of arbitrary-length x and y over every lag with nonzero overlap,
/// i.e. t in [-(len(y)-1), len(x)-1].
template <typename Scalar>
LagSeries correlate(const ComplexVector<Scalar>& x, const ComplexVector<Scalar>& y) {
  static_assert(std::is_same_v<Scalar, double>, "LagSeries stores double precision");
  const long lx = static_cast<long>(x.size());
  const long ly = static_cast<long>(y.size());
  require(lx > 0 && ly > 0, "correlate: empty input");
  const long n = detail::fft_size_for(lx + ly - 1);

  auto& fft = detail::thread_fft<Scalar>();
  std::vector<std::complex<Scalar>> xp(n, std::complex<Scalar>{}), yp(n, std::complex<Scalar>{});
  for (long i = 0; i < lx; ++i) xp[i] = x(i);
  for (long i = 0; i < ly; ++i) yp[i] = y(i);
  std::vector<std::complex<Scalar>> xf, yf, c;
  fft.fwd(xf, xp);
  fft.fwd(yf, yp);
  for (long i = 0; i < n; ++i) xf[i] *= std::conj(yf[i]);
  fft.inv(c, xf);

  LagSeries out;
  out.first_lag = -(ly - 1);
  out.values.resize(lx + ly - 1);
  for (long t = -(ly - 1); t <= lx - 1; ++t) out.values(t + ly - 1) = c[(t % n + n) % n];
  return out;
}

/// Correlation restricted to a single lag; cheaper than a full correlate() when one cell is needed.
template <typename Scalar>
std::complex<Scalar> correlate_at(const ComplexVector<Scalar>& x, const ComplexVector<Scalar>& y, long lag) {
  const long lx = static_cast<long>(x.size());
  const long ly = static_cast<long>(y.size());
  const long lo = std::max(0L, lag);
  const long hi = std::min(lx - 1, ly - 1 + lag);
  if (hi < lo) return {};
  return y.segment(lo - lag, hi - lo + 1).dot(x.segment(lo, hi - lo + 1));
}

}  // namespace jrc

#endif  // JRC_CORRELATE_HPP
