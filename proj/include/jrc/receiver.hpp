#ifndef JRC_RECEIVER_HPP
#define JRC_RECEIVER_HPP

// Information-blind radar processing (internal filter bank, channel sum, external
// matched filter) and the coherent / non-coherent symbol demodulators.
//
// Lag convention: every stage output is a LagSeries indexed so that a noiseless
// echo delayed by t0 samples peaks at lag t0. For a received record of length Lr
// the internal bank spans lags [-(M-1), Lr-1] and r_f2 spans [-(NM-1), Lr-1].

#include "jrc/core.hpp"
#include "jrc/correlate.hpp"
#include "jrc/seqdesign.hpp"
#include "jrc/waveform.hpp"

#include <vector>

namespace jrc {

class ReceiveChain {
 public:
  ReceiveChain(SignalSet set, EpSequence ep);

  const SignalSet& set() const { return set_; }
  const EpSequence& ep() const { return ep_; }
  int alphabet() const { return set_.count(); }
  int chips() const { return set_.length(); }
  int symbols() const { return ep_.size(); }

  /// h_f1[x] = sum_k conj(s_k[-x]), support [-(M-1), 0].
  const LagSeries& internal_filter() const { return h_f1_; }
  /// h_f2: unit taps conj(exp(j phi_n)) at lags -n M, n = 0..N-1.
  const LagSeries& external_filter() const { return h_f2_; }
  /// h_f = h_f1 (*) h_f2, support [-(NM-1), 0].
  const LagSeries& combined_filter() const { return h_f_; }
  /// The waveform the combined filter is matched to: block n = exp(j phi_n) sum_k s_k.
  const CVector& reference() const { return reference_; }

  /// sum_k sum_j R_kj(0) = ||h_f1||^2.
  double zero_lag_sum() const { return h_f1_.values.squaredNorm(); }
  /// Complex noise variance per output cell for input noise of per-sample variance n0.
  double output_noise_variance(double n0) const { return n0 * symbols() * zero_lag_sum(); }

 private:
  SignalSet set_;
  EpSequence ep_;
  LagSeries h_f1_;
  LagSeries h_f2_;
  LagSeries h_f_;
  CVector reference_;
};

struct BankOutputs {
  std::vector<LagSeries> channels;  // r_k
  LagSeries summed;                 // r_f1
  LagSeries compressed;             // r_f2
};

/// r_k = correlation of r against s_k, k = 0..K-1.
std::vector<LagSeries> internal_filter_bank(const CVector& received, const SignalSet& set);

/// Every stage of the chain.
BankOutputs radar_process_stages(const CVector& received, const ReceiveChain& chain);

/// r_f2 via bank, channel sum and the sparse external filter.
LagSeries radar_process(const CVector& received, const ReceiveChain& chain);

/// r_f2 as a single correlation against the combined filter.
LagSeries compress(const CVector& received, const ReceiveChain& chain);

/// r_f2 at one lag only.
cd compress_at(const CVector& received, const ReceiveChain& chain, long lag);

struct DetectionReport {
  bool declared = false;
  long peak_index = 0;
  double peak_amplitude = 0.0;
  double threshold = 0.0;
};

/// Rayleigh per-cell threshold sqrt(noise_var * ln(1/pfa)).
double detection_threshold(double noise_var_out, double pfa);

/// Amplitude detector over lags [window_lo, window_hi] (clipped to the series).
DetectionReport detect(const LagSeries& compressed, double noise_var_out, double pfa, long window_lo,
                       long window_hi);
DetectionReport detect(const LagSeries& compressed, double noise_var_out, double pfa);

/// K x N matrix of bank samples at t0 + n M (the per-symbol peak sequences).
CMatrix sample_bank(const std::vector<LagSeries>& bank, long t0, int symbols, int chips);

/// Same samples computed directly from the received record without forming the whole bank.
CMatrix sample_bank(const CVector& received, const SignalSet& set, long t0, int symbols);

/// argmax_k Re{ sample * exp(-j phi_n) * exp(-j theta) }; ties go to the lowest k.
InfoSequence demodulate_coherent(const CMatrix& peaks, const EpSequence& ep, double theta);
InfoSequence demodulate_coherent(const std::vector<LagSeries>& bank, long t0, const EpSequence& ep, double theta);

/// argmax_k |sample|; ties go to the lowest k.
InfoSequence demodulate_noncoherent(const CMatrix& peaks);
InfoSequence demodulate_noncoherent(const std::vector<LagSeries>& bank, long t0, int symbols, int chips);

}  // namespace jrc

#endif  // JRC_RECEIVER_HPP
