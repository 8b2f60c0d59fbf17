#ifndef JRC_KERNEL_HPP
#define JRC_KERNEL_HPP

// Correlation-domain model of a signal set. The noiseless chain output can be
// written entirely in terms of the Doppler-shifted correlations
//   R_kj(tau, f) = sum_x exp(j 2 pi f x) s_k[x] conj(s_j[x - tau]),
// which lets the same code evaluate both a concrete set and the ideal
// orthogonal limit (R_kk = Es delta, R_kj = 0 for k != j at every lag). No
// finite unimodular set reaches that limit: R_kj(M-1) = s_k[M-1] conj(s_j[0]).

#include "jrc/core.hpp"
#include "jrc/seqdesign.hpp"
#include "jrc/waveform.hpp"

#include <optional>

namespace jrc {

class CorrelationKernel {
 public:
  static CorrelationKernel from_set(const SignalSet& set);
  static CorrelationKernel ideal(int alphabet, int chips);

  int alphabet() const { return alphabet_; }
  int chips() const { return chips_; }
  bool is_ideal() const { return !set_.has_value(); }
  double energy() const { return static_cast<double>(chips_); }
  /// The underlying set; null for the ideal kernel.
  const SignalSet* set() const { return set_ ? &*set_ : nullptr; }

  /// R_kj(tau, f) over tau = -(M-1)..M-1; f in cycles per sample.
  CVector response(int k, int j, double doppler) const;
  /// sum_j R_kj(tau, f): what the summed internal filter sees when s_k is sent.
  CVector row_sum(int k, double doppler) const;

 private:
  CorrelationKernel(std::optional<SignalSet> set, int alphabet, int chips)
      : set_(std::move(set)), alphabet_(alphabet), chips_(chips) {}

  std::optional<SignalSet> set_;
  int alphabet_;
  int chips_;
};

/// Noiseless compressed output for message `info` under Doppler f, lags -(NM-1)..NM-1:
///   A[l, f] = sum_n sum_m exp(j(phi_n - phi_m)) exp(j 2 pi f n M) g_{i_n}[l - (n-m) M, f].
LagSeries kernel_response(const CorrelationKernel& kernel, const InfoSequence& info, const EpSequence& ep,
                          double doppler);

}  // namespace jrc

#endif  // JRC_KERNEL_HPP
