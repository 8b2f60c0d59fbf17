#ifndef JRC_WAVEFORM_HPP
#define JRC_WAVEFORM_HPP

// Internal modulation (bit groups -> signal index), external phase (EP) codes
// and transmit waveform synthesis.

#include "jrc/core.hpp"
#include "jrc/seqdesign.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace jrc {

/// N symbol indices in [0, K). Symbol value v selects signal s_{v+1}; its L = log2 K
/// bit representation is the embedded binary number.
struct InfoSequence {
  std::vector<int> symbols;
  int alphabet = 2;

  int size() const { return static_cast<int>(symbols.size()); }
  int bits_per_symbol() const { return log2_exact(alphabet); }
};

/// One external phase per symbol slot, in radians, wrapped to [0, 2pi).
struct EpSequence {
  RVector phases;

  int size() const { return static_cast<int>(phases.size()); }
};

struct Waveform {
  CVector samples;
  int alphabet = 0;  // K
  int chips = 0;     // M
  int symbols = 0;   // N

  double energy() const { return samples.squaredNorm(); }
};

/// Parses consecutive L-bit groups (MSB first) of a '0'/'1' string.
InfoSequence map_bits(std::string_view bits, int alphabet);
std::string unmap_bits(const InfoSequence& info);

/// Uniformly random message of N symbols.
InfoSequence random_info(int symbols, int alphabet, std::uint64_t seed);

/// Chip block n equals s_{symbols[n]} * exp(j phi_n).
Waveform synthesize(const SignalSet& set, const InfoSequence& info, const EpSequence& ep);

EpSequence make_ep(const RVector& phases);
EpSequence ep_barker13();
EpSequence ep_constant(int symbols, double phase = 0.0);

/// R2[q, nu] = sum_n exp(j 2 pi nu n) exp(j (phi_n - phi_{n-q})), nu in cycles per symbol
/// (nu = f_d Ts = T f_d / N).
cd ep_ambiguity(const EpSequence& ep, int lag, double nu);

/// R2 over lags -(N-1)..N-1 (rows) and the listed nu values (columns).
CMatrix ep_ambiguity_surface(const EpSequence& ep, const std::vector<double>& nus);

/// Largest |R2| over the grid with the zero-lag column removed.
double ep_peak_sidelobe(const EpSequence& ep, const std::vector<int>& lags, const std::vector<double>& nus);

/// Evenly spaced values of T f_d in [lo, hi] converted to nu = T f_d / N.
std::vector<double> doppler_grid_nu(double tfd_lo, double tfd_hi, int points, int symbols);

struct EpOptimizeOptions {
  int symbols = 13;
  /// Symbol lags; empty selects every nonzero lag. Lag 0 is always dropped.
  std::vector<int> lags;
  /// Doppler window in units of T f_d.
  double tfd_lo = -0.3;
  double tfd_hi = 0.3;
  int doppler_points = 21;
  int generations = 400;
  int population = 50;
  std::uint64_t seed = 1;
  /// Starting phases; empty selects Barker-13 when N = 13, constant zero otherwise.
  RVector initial;
};

struct EpOptimizeResult {
  EpSequence ep;
  double peak_sidelobe = 0.0;  // linear |R2|
  double peak_sidelobe_db = 0.0;  // relative to N
  double initial_peak_sidelobe_db = 0.0;
};

EpOptimizeResult optimize_ep_doppler(const EpOptimizeOptions& options);

}  // namespace jrc

#endif  // JRC_WAVEFORM_HPP
