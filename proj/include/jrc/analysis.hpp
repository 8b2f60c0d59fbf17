#ifndef JRC_ANALYSIS_HPP
#define JRC_ANALYSIS_HPP

// Performance theory (PSNR, detection, SER), ambiguity functions and the
// dissimilarity metric.
//
// SNR conventions: complex baseband noise with per-sample variance N0; the
// matched-filter output SNR is d = 2E/N0 with E = N Es, the per-symbol SNR is
// d1 = 2 Es / N0 and the per-bit SNR is r_b = d1 / L.

#include "jrc/core.hpp"
#include "jrc/kernel.hpp"
#include "jrc/receiver.hpp"
#include "jrc/seqdesign.hpp"
#include "jrc/waveform.hpp"

#include <cstdint>
#include <vector>

namespace jrc {

// ---------------------------------------------------------------- PSNR / detection

struct PsnrTheory {
  double d2_ideal = 0.0;  // 2 N Es / (K N0)
  double d2 = 0.0;        // d2_ideal (1 + gamma)
};

PsnrTheory psnr_theory(int alphabet, int symbols, double energy, double n0, double gamma);

/// Marcum Q1(a, b).
double marcum_q1(double a, double b);

/// Detection probability of the per-cell Rayleigh threshold test at output SNR d
/// (d = 2|peak|^2 / noise variance; d = 2E/N0 for the matched filter).
double pd_theory(double snr, double pfa);

/// Output SNR (linear) at which pd_theory reaches `pd`.
double required_snr(double pd, double pfa);

/// Required input d in dB for the chain with K signals and zero-lag factor gamma:
/// matched-filter requirement scaled by K / (1 + gamma).
double required_d_db(double pd, double pfa, int alphabet, double gamma);

// ---------------------------------------------------------------- SER

/// Coherent K-ary orthogonal SER:
///   1 - int phi(u) Phi(u + sqrt(d1))^(K-1) du.
double ser_coherent_theory(int alphabet, double d1);

/// ((K-1)/2) exp(-d1/4), clamped to 1.
double ser_noncoherent_bound(int alphabet, double d1);

/// Exact non-coherent K-ary orthogonal SER (alternating series; K <= 32).
double ser_noncoherent_exact(int alphabet, double d1);

/// Per-symbol SNR d1 (linear) at which `ser` of the given kind reaches `target`.
enum class SerKind { coherent, noncoherent_bound, noncoherent_exact };
double required_d1(SerKind kind, int alphabet, double target);

// ---------------------------------------------------------------- ambiguity

struct AmbiguitySurface {
  std::vector<long> delays;     // sample lags
  std::vector<double> dopplers;  // cycles per sample
  CMatrix values;                // delays x dopplers
};

/// Report-axis conversion: T f_d with T = N M samples.
inline double doppler_to_tfd(double doppler, int symbols, int chips) { return doppler * symbols * chips; }
inline double tfd_to_doppler(double tfd, int symbols, int chips) { return tfd / (static_cast<double>(symbols) * chips); }

/// All lags -(NM-1)..NM-1.
std::vector<long> full_delay_grid(int symbols, int chips);

/// A[l, f] = sum_x s[x] exp(j 2 pi f x) h_f[l - x], evaluated in the sample domain.
AmbiguitySurface ambiguity_direct(const Waveform& waveform, const ReceiveChain& chain, const std::vector<long>& delays,
                                  const std::vector<double>& dopplers);

/// The same surface through the correlation-domain expansion; works for ideal kernels.
AmbiguitySurface ambiguity_expanded(const CorrelationKernel& kernel, const InfoSequence& info, const EpSequence& ep,
                                    const std::vector<long>& delays, const std::vector<double>& dopplers);

enum class FactorReference { first_signal, average };

/// R(t, f) (*) R2(t, f): single-signal AF convolved along delay with the EP ambiguity
/// upsampled to chip spacing.
AmbiguitySurface ambiguity_factored(const CorrelationKernel& kernel, const EpSequence& ep,
                                    const std::vector<long>& delays, const std::vector<double>& dopplers,
                                    FactorReference reference = FactorReference::first_signal);

double max_abs_difference(const AmbiguitySurface& a, const AmbiguitySurface& b);

struct PslRow {
  double tfd_max = 0.0;
  double psl_a_db = 0.0;       // A sidelobes relative to |A(0, 0)|
  double psl_r2_db = 0.0;      // R2 sidelobes relative to N
  double psl_a_row_db = 0.0;   // relative to each Doppler cut's own zero-lag value
  double psl_r2_row_db = 0.0;
};

struct PslSweepOptions {
  int doppler_points = 21;  // per region [-tfd_max, tfd_max]
  std::uint64_t message_seed = 1;
  /// Use the correlation-domain route (required for ideal kernels).
  bool expanded = false;
};

/// For each bound, the worst sidelobe (lag != 0) over |T f_d| <= bound.
std::vector<PslRow> psl_vs_doppler(const CorrelationKernel& kernel, const EpSequence& ep,
                                   const std::vector<double>& tfd_max, const PslSweepOptions& options = {});

// ---------------------------------------------------------------- dissimilarity

struct DissimilarityReport {
  std::vector<double> d_values;
  double d_mean = 0.0;     // linear mean of per-pair D
  double d_mean_db = 0.0;  // 20 log10(d_mean)
  int pairs = 0;
};

/// D for one message pair: max_t | |y1(t)| - |y2(t)| | / (N Es).
double dissimilarity_pair(const CorrelationKernel& kernel, const EpSequence& ep, const InfoSequence& first,
                          const InfoSequence& second);

/// Mon random message pairs; pair p uses seeds derived from (seed, p).
DissimilarityReport dissimilarity(const CorrelationKernel& kernel, const EpSequence& ep, int pairs, std::uint64_t seed,
                                  int threads = 1);

}  // namespace jrc

#endif  // JRC_ANALYSIS_HPP
