#ifndef JRC_SIMKIT_HPP
#define JRC_SIMKIT_HPP

// AWGN channel and the Monte Carlo harness for detection probability and SER.
//
// Determinism: trial t of sweep point p draws everything (message, phase,
// noise) from an engine seeded with derive_seed(master, p, t). Workers take
// contiguous trial ranges and only integer counts are reduced, so results do
// not depend on the worker count.

#include "jrc/core.hpp"
#include "jrc/receiver.hpp"
#include "jrc/seqdesign.hpp"
#include "jrc/waveform.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace jrc {

struct ChannelConfig {
  long delay = 0;       // t0, samples
  double theta = 0.0;   // global phase, radians
  double snr_db = std::numeric_limits<double>::infinity();  // d = 2E/N0; +inf switches noise off
  std::uint64_t seed = 0;
};

/// Per-sample complex noise variance N0 = 2E / d.
double noise_variance(double energy, double snr_db);

/// exp(j theta) s(t - t0) + w; output length t0 + len(s) + extra_tail.
CVector awgn_channel(const Waveform& waveform, const ChannelConfig& config, long extra_tail = 0);

/// As above with a caller-owned engine (used inside Monte Carlo trials).
CVector awgn_channel(const CVector& samples, long delay, double theta, double n0, std::mt19937_64& rng,
                     long extra_tail = 0);

enum class ExperimentKind { pd, ser_coherent, ser_noncoherent };

/// samples: white noise on every received sample, full receive pipeline.
/// projected: the noise the receiver would see after its linear filters, drawn
/// directly (CN(0, N0 G) per symbol for the bank, CN(0, var_out) for the delay
/// cell). Same distribution of decision statistics at a fraction of the cost.
enum class NoiseDomain { samples, projected };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);
std::string to_string(NoiseDomain domain);
NoiseDomain parse_noise_domain(const std::string& text);

struct SimConfig {
  ExperimentKind kind = ExperimentKind::pd;
  int alphabet = 2;  // K
  int chips = 200;   // M
  int symbols = 13;  // N
  std::string ep = "barker13";
  double pfa = 1e-3;
  /// d in dB for Pd runs, r_b in dB for SER runs.
  std::vector<double> snr_db;
  long trials = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  long delay = 0;
  /// Pd: evaluate the whole compressed output instead of the true-delay cell only.
  bool full_chain = false;
  /// SER: take t0 from the detector peak instead of ground truth.
  bool detected_t0 = false;
  /// projected is incompatible with full_chain and detected_t0.
  NoiseDomain noise = NoiseDomain::samples;
};

/// Canonical key = value rendering (sorted, fixed formatting) and its 64-bit FNV-1a hash.
std::string describe(const SimConfig& config);
std::uint64_t content_hash(const std::string& text);

struct SimPoint {
  double snr_db = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  long trials = 0;     // Bernoulli trials behind the estimate (waveforms for Pd, symbols for SER)
  long successes = 0;  // detections or symbol errors
};

struct SimResult {
  std::vector<SimPoint> points;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

/// Random message -> synthesize -> channel -> compress -> threshold test at the true-delay cell.
SimResult simulate_pd(const ReceiveChain& chain, const SimConfig& config);

/// Random message -> synthesize -> channel -> filter bank sampled at t0 + n Ts -> demodulate.
SimResult simulate_ser(const SignalSet& set, const EpSequence& ep, const SimConfig& config);

/// Required SNR (dB) at which an increasing estimate curve crosses `level`, by linear
/// interpolation between the bracketing sweep points.
double crossing_db(const std::vector<SimPoint>& points, double level);

/// Same for a decreasing error-rate curve, interpolated in log10(estimate).
double crossing_db_log(const std::vector<SimPoint>& points, double level);

}  // namespace jrc

#endif  // JRC_SIMKIT_HPP
