#ifndef JRC_SEQDESIGN_HPP
#define JRC_SEQDESIGN_HPP

// Unimodular quasi-orthogonal signal sets: correlation metrics, the cyclic
// (CAN-style) set designer and the zero-lag phase-rotation optimiser.

#include "jrc/core.hpp"
#include "jrc/correlate.hpp"

#include <cstdint>
#include <vector>

namespace jrc {

/// Tolerance for |chip| = 1 when accepting external data.
inline constexpr double kUnimodularTolerance = 1e-9;

struct CorrelationMetrics {
  /// max over k and nonzero lags of |R_kk| / Es.
  double psl = 0.0;
  /// max over k != j and all lags of |R_kj| / Es. Zero for K = 1.
  double isolation = 0.0;
  /// Re{ sum_k sum_{j != k} R_kj(0) } / (K Es).
  double gamma = 0.0;
  /// Imaginary residue of the same sum; vanishes by conjugate pairing.
  double gamma_imag = 0.0;
};

/// K unimodular sequences of common length M, stored as the columns of an M x K matrix.
/// Immutable; metrics are computed once at construction.
class SignalSet {
 public:
  /// Chips are projected onto the unit circle after checking |chip| within kUnimodularTolerance of 1.
  explicit SignalSet(CMatrix chips);

  int count() const { return static_cast<int>(chips_.cols()); }
  int length() const { return static_cast<int>(chips_.rows()); }
  /// Per-signal energy; equals M for unimodular chips.
  double energy() const { return static_cast<double>(chips_.rows()); }
  const CMatrix& chips() const { return chips_; }
  CVector signal(int k) const { return chips_.col(k); }
  /// sum_k s_k, the time-reversed conjugate of the summed internal filter.
  CVector summed() const { return chips_.rowwise().sum(); }
  /// Gram matrix G(k, j) = sum_m conj(s_k[m]) s_j[m] = R_jk(0).
  CMatrix gram() const { return chips_.adjoint() * chips_; }
  const CorrelationMetrics& metrics() const { return metrics_; }

 private:
  CMatrix chips_;
  CorrelationMetrics metrics_;
};

/// Metrics of an arbitrary M x K chip matrix (no unimodularity requirement).
CorrelationMetrics correlation_metrics(const CMatrix& chips);
inline CorrelationMetrics correlation_metrics(const SignalSet& set) { return correlation_metrics(set.chips()); }

/// All K x K correlation functions; entry [k * K + j] holds R_kj over lags -(M-1)..M-1.
std::vector<CVector> all_correlations(const CMatrix& chips);

/// K discrete tones exp(j 2 pi k m / M), k = 0..K-1. Orthogonal at zero lag (gamma = 0), not at other lags.
SignalSet tone_set(int count, int length);

/// Independent uniformly random phases.
SignalSet random_set(int count, int length, std::uint64_t seed);

struct DesignCheckpoint {
  int iteration = 0;
  CorrelationMetrics metrics;
};

struct DesignResult {
  SignalSet set;
  CorrelationMetrics initial;
  int best_iteration = 0;
  std::vector<DesignCheckpoint> trace;
};

/// Cyclic alternating minimisation over the stacked 2M-point spectrum of the set
/// (per-frequency norm projection / unit-modulus projection). The returned set is
/// the checkpoint with the smallest max(psl, isolation).
DesignResult design_orthogonal_set(int count, int length, int iterations, std::uint64_t seed, int check_every = 10);

struct RotationVector {
  RVector alphas;
};

struct RotationResult {
  SignalSet set;
  RotationVector rotation;
  double gamma_before = 0.0;
  double gamma_after = 0.0;
};

/// s_k = x_k exp(j alpha_k).
SignalSet rotate(const SignalSet& set, const RotationVector& rotation);

/// gamma of the rotated set evaluated from the Gram matrix of the unrotated one.
double rotated_gamma(const CMatrix& gram, const RVector& alphas);

/// Elitist genetic search for the rotation maximising gamma, followed by exact
/// coordinate-wise ascent. gamma never decreases; correlation magnitudes are untouched.
RotationResult optimize_phase_rotation(const SignalSet& set, int generations, int population, std::uint64_t seed);

}  // namespace jrc

#endif  // JRC_SEQDESIGN_HPP
