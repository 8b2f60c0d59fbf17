#ifndef JRC_CORE_HPP
#define JRC_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jrc {

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using cd = std::complex<double>;
using CVector = ComplexVector<double>;
using CMatrix = ComplexMatrix<double>;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when caller-supplied data violates an operation's preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to reach its accuracy target.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures (open, read, write).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

/// A complex sequence indexed by signed lag: value at lag t is values[t - first_lag].
struct LagSeries {
  CVector values;
  long first_lag = 0;

  long last_lag() const { return first_lag + static_cast<long>(values.size()) - 1; }
  bool contains(long lag) const { return lag >= first_lag && lag <= last_lag(); }
  cd at(long lag) const { return contains(lag) ? values(lag - first_lag) : cd{0.0, 0.0}; }
};

inline double to_db(double linear_power_ratio) { return 10.0 * std::log10(linear_power_ratio); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }
inline double amplitude_db(double amplitude_ratio) { return 20.0 * std::log10(amplitude_ratio); }

inline double wrap_phase(double phase) {
  double w = std::fmod(phase, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

inline bool is_power_of_two(long k) { return k >= 1 && (k & (k - 1)) == 0; }

inline int log2_exact(long k) {
  int l = 0;
  while ((1L << l) < k) ++l;
  return l;
}

/// SplitMix64 finaliser, used to derive independent RNG seeds from (master, index) pairs.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(master) ^ a) ^ (b * 0xd1342543de82ef95ULL + 1));
}

}  // namespace jrc

#endif  // JRC_CORE_HPP
