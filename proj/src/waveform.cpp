#include "jrc/waveform.hpp"

#include "jrc/genetic.hpp"

#include <algorithm>
#include <random>

namespace jrc {

InfoSequence map_bits(std::string_view bits, int alphabet) {
  require(is_power_of_two(alphabet), "map_bits: K must be a power of two");
  const int l = log2_exact(alphabet);
  InfoSequence info;
  info.alphabet = alphabet;
  if (l == 0) {
    require(bits.empty(), "map_bits: K = 1 carries no bits");
    return info;
  }
  require(!bits.empty(), "map_bits: empty bit string");
  require(bits.size() % static_cast<std::size_t>(l) == 0,
          "map_bits: bit-string length " + std::to_string(bits.size()) + " is not divisible by L = " +
              std::to_string(l));
  for (std::size_t pos = 0; pos < bits.size(); pos += l) {
    int value = 0;
    for (int b = 0; b < l; ++b) {
      const char c = bits[pos + b];
      require(c == '0' || c == '1', "map_bits: bit string may only contain '0' and '1'");
      value = (value << 1) | (c == '1');
    }
    info.symbols.push_back(value);
  }
  return info;
}

std::string unmap_bits(const InfoSequence& info) {
  const int l = info.bits_per_symbol();
  std::string bits;
  bits.reserve(info.symbols.size() * l);
  for (int v : info.symbols) {
    require(v >= 0 && v < info.alphabet, "unmap_bits: symbol out of range");
    for (int b = l - 1; b >= 0; --b) bits.push_back(((v >> b) & 1) ? '1' : '0');
  }
  return bits;
}

InfoSequence random_info(int symbols, int alphabet, std::uint64_t seed) {
  require(symbols >= 1, "random_info: N must be positive");
  require(alphabet >= 1, "random_info: K must be positive");
  std::mt19937_64 rng(mix_seed(seed));
  std::uniform_int_distribution<int> pick(0, alphabet - 1);
  InfoSequence info;
  info.alphabet = alphabet;
  info.symbols.resize(symbols);
  for (auto& s : info.symbols) s = pick(rng);
  return info;
}

Waveform synthesize(const SignalSet& set, const InfoSequence& info, const EpSequence& ep) {
  require(info.size() > 0, "synthesize: empty information sequence");
  require(info.size() == ep.size(), "synthesize: information and EP sequences differ in length");
  const int m = set.length();
  Waveform w;
  w.alphabet = set.count();
  w.chips = m;
  w.symbols = info.size();
  w.samples.resize(static_cast<Eigen::Index>(info.size()) * m);
  for (int n = 0; n < info.size(); ++n) {
    const int k = info.symbols[n];
    require(k >= 0 && k < set.count(), "synthesize: symbol " + std::to_string(n) + " exceeds K - 1");
    w.samples.segment(static_cast<Eigen::Index>(n) * m, m) = set.chips().col(k) * std::polar(1.0, ep.phases(n));
  }
  return w;
}

EpSequence make_ep(const RVector& phases) {
  require(phases.size() >= 1, "EP sequence must not be empty");
  return EpSequence{phases.unaryExpr([](double p) { return wrap_phase(p); })};
}

EpSequence ep_barker13() {
  static constexpr int kSigns[13] = {1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1};
  RVector phases(13);
  for (int i = 0; i < 13; ++i) phases(i) = kSigns[i] > 0 ? 0.0 : kPi;
  return EpSequence{phases};
}

EpSequence ep_constant(int symbols, double phase) {
  require(symbols >= 1, "ep_constant: N must be positive");
  return make_ep(RVector::Constant(symbols, phase));
}

cd ep_ambiguity(const EpSequence& ep, int lag, double nu) {
  const int n_count = ep.size();
  cd acc{0.0, 0.0};
  for (int n = std::max(0, lag); n < std::min(n_count, n_count + lag); ++n)
    acc += std::polar(1.0, kTwoPi * nu * n + ep.phases(n) - ep.phases(n - lag));
  return acc;
}

CMatrix ep_ambiguity_surface(const EpSequence& ep, const std::vector<double>& nus) {
  const int n_count = ep.size();
  CMatrix out(2 * n_count - 1, static_cast<Eigen::Index>(nus.size()));
  for (std::size_t f = 0; f < nus.size(); ++f)
    for (int q = -(n_count - 1); q <= n_count - 1; ++q) out(q + n_count - 1, f) = ep_ambiguity(ep, q, nus[f]);
  return out;
}

double ep_peak_sidelobe(const EpSequence& ep, const std::vector<int>& lags, const std::vector<double>& nus) {
  double peak = 0.0;
  for (double nu : nus)
    for (int q : lags)
      if (q != 0) peak = std::max(peak, std::abs(ep_ambiguity(ep, q, nu)));
  return peak;
}

std::vector<double> doppler_grid_nu(double tfd_lo, double tfd_hi, int points, int symbols) {
  require(points >= 1, "doppler grid: at least one point required");
  require(tfd_hi >= tfd_lo, "doppler grid: upper bound below lower bound");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? tfd_lo : tfd_lo + (tfd_hi - tfd_lo) * i / (points - 1);
    out[i] = t / symbols;
  }
  return out;
}

EpOptimizeResult optimize_ep_doppler(const EpOptimizeOptions& options) {
  const int n_count = options.symbols;
  require(n_count >= 2, "optimize_ep_doppler: N must be at least 2");
  require(options.generations >= 0, "optimize_ep_doppler: negative budget");

  std::vector<int> lags;
  if (options.lags.empty()) {
    for (int q = -(n_count - 1); q <= n_count - 1; ++q)
      if (q != 0) lags.push_back(q);
  } else {
    for (int q : options.lags)
      if (q != 0 && std::abs(q) < n_count) lags.push_back(q);
  }
  require(!lags.empty(), "optimize_ep_doppler: empty delay grid");
  require(options.doppler_points >= 1, "optimize_ep_doppler: empty Doppler grid");
  const auto nus = doppler_grid_nu(options.tfd_lo, options.tfd_hi, options.doppler_points, n_count);

  RVector initial = options.initial;
  if (initial.size() == 0) initial = n_count == 13 ? ep_barker13().phases : RVector::Zero(n_count);
  require(initial.size() == n_count, "optimize_ep_doppler: initial phases must have length N");

  auto cost = [&](const RVector& phases) { return ep_peak_sidelobe(EpSequence{phases}, lags, nus); };
  const EpSequence start = make_ep(initial);
  const double initial_cost = cost(start.phases);

  EpOptimizeResult result;
  result.initial_peak_sidelobe_db = amplitude_db(initial_cost / n_count);
  if (options.generations == 0) {
    result.ep = start;
    result.peak_sidelobe = initial_cost;
    result.peak_sidelobe_db = result.initial_peak_sidelobe_db;
    return result;
  }

  GeneticOptions ga;
  ga.population = std::max(options.population, 4);
  ga.generations = options.generations;
  const auto found = minimize_phases(cost, n_count, ga, options.seed, std::span<const RVector>(&start.phases, 1));

  // Shrinking-step coordinate search from the GA optimum; accepts strict improvements only.
  RVector best = found.best;
  double best_cost = found.best_cost;
  std::mt19937_64 rng(derive_seed(options.seed, 0x5eed));
  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_int_distribution<int> coord(0, n_count - 1);
  double sigma = 0.3;
  const int polish = options.generations * 20;
  for (int i = 0; i < polish; ++i) {
    RVector trial = best;
    const int c = coord(rng);
    trial(c) = wrap_phase(trial(c) + sigma * step(rng));
    const double tc = cost(trial);
    if (tc < best_cost) {
      best = std::move(trial);
      best_cost = tc;
    }
    if ((i + 1) % std::max(1, polish / 8) == 0) sigma *= 0.5;
  }

  result.ep = make_ep(best);
  result.peak_sidelobe = cost(result.ep.phases);
  result.peak_sidelobe_db = amplitude_db(result.peak_sidelobe / n_count);
  return result;
}

}  // namespace jrc
