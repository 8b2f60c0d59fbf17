#include "jrc/simkit.hpp"

#include <algorithm>
#include <Eigen/Cholesky>

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace jrc {

double noise_variance(double energy, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  require(std::isfinite(snr_db), "channel: SNR must be finite or +inf");
  return 2.0 * energy / from_db(snr_db);
}

CVector awgn_channel(const CVector& samples, long delay, double theta, double n0, std::mt19937_64& rng,
                     long extra_tail) {
  require(delay >= 0, "channel: delay must be nonnegative");
  require(extra_tail >= 0, "channel: tail must be nonnegative");
  const long length = delay + static_cast<long>(samples.size()) + extra_tail;
  CVector out = CVector::Zero(length);
  out.segment(delay, samples.size()) = samples * std::polar(1.0, theta);
  if (n0 > 0.0) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(n0 / 2.0));
    for (long i = 0; i < length; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      out(i) += cd{re, im};
    }
  }
  return out;
}

CVector awgn_channel(const Waveform& waveform, const ChannelConfig& config, long extra_tail) {
  std::mt19937_64 rng(mix_seed(config.seed));
  return awgn_channel(waveform.samples, config.delay, config.theta, noise_variance(waveform.energy(), config.snr_db),
                      rng, extra_tail);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::pd:
      return "pd";
    case ExperimentKind::ser_coherent:
      return "ser-coherent";
    case ExperimentKind::ser_noncoherent:
      return "ser-noncoherent";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  if (text == "pd") return ExperimentKind::pd;
  if (text == "ser-coherent") return ExperimentKind::ser_coherent;
  if (text == "ser-noncoherent") return ExperimentKind::ser_noncoherent;
  throw InvalidInput("unknown experiment kind '" + text + "'");
}

std::string to_string(NoiseDomain domain) {
  return domain == NoiseDomain::samples ? "samples" : "projected";
}

NoiseDomain parse_noise_domain(const std::string& text) {
  if (text == "samples") return NoiseDomain::samples;
  if (text == "projected") return NoiseDomain::projected;
  throw InvalidInput("unknown noise domain '" + text + "'");
}

namespace {

cd complex_gaussian(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Runs body(point, first_trial, last_trial) over worker threads and returns per-point counts.
template <typename TrialRange>
std::vector<long> run_sweep(std::size_t points, long trials, int threads, TrialRange body) {
  std::vector<long> counts(points, 0);
  threads = static_cast<int>(std::clamp<long>(threads, 1, std::max(1L, trials)));
  for (std::size_t p = 0; p < points; ++p) {
    if (threads == 1) {
      counts[p] = body(p, 0L, trials);
      continue;
    }
    std::vector<long> partial(threads, 0);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const long begin = trials * t / threads;
      const long end = trials * (t + 1) / threads;
      pool.emplace_back([&, t, begin, end] { partial[t] = body(p, begin, end); });
    }
    for (auto& th : pool) th.join();
    for (long c : partial) counts[p] += c;
  }
  return counts;
}

void validate(const SimConfig& config) {
  require(config.trials >= 1, "simulation: trials must be at least 1");
  require(!config.snr_db.empty(), "simulation: empty SNR sweep");
  require(config.delay >= 0, "simulation: delay must be nonnegative");
  require(config.noise == NoiseDomain::samples || (!config.full_chain && !config.detected_t0),
          "simulation: projected noise cannot be combined with full_chain or detected_t0");
}

SimPoint make_point(double snr_db, long successes, long trials) {
  SimPoint pt;
  pt.snr_db = snr_db;
  pt.trials = trials;
  pt.successes = successes;
  pt.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  pt.std_error = std::sqrt(pt.estimate * (1.0 - pt.estimate) / static_cast<double>(trials));
  return pt;
}

}  // namespace

std::string describe(const SimConfig& config) {
  std::map<std::string, std::string> kv;
  kv["kind"] = to_string(config.kind);
  kv["k"] = std::to_string(config.alphabet);
  kv["m"] = std::to_string(config.chips);
  kv["n"] = std::to_string(config.symbols);
  kv["ep"] = config.ep;
  kv["pfa"] = format_double(config.pfa);
  std::string sweep;
  for (std::size_t i = 0; i < config.snr_db.size(); ++i) sweep += (i ? "," : "") + format_double(config.snr_db[i]);
  kv["snr_db"] = sweep;
  kv["trials"] = std::to_string(config.trials);
  kv["seed"] = std::to_string(config.seed);
  kv["delay"] = std::to_string(config.delay);
  kv["full_chain"] = config.full_chain ? "true" : "false";
  kv["detected_t0"] = config.detected_t0 ? "true" : "false";
  kv["noise"] = to_string(config.noise);
  // threads deliberately omitted: results do not depend on it
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  return out.str();
}

std::uint64_t content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SimResult simulate_pd(const ReceiveChain& chain, const SimConfig& config) {
  validate(config);
  require(config.pfa > 0.0 && config.pfa < 1.0, "simulate_pd: pfa must lie in (0, 1)");
  const int n_count = chain.symbols();
  const int k_count = chain.alphabet();
  const double energy = static_cast<double>(n_count) * chain.chips();

  auto body = [&](std::size_t p, long begin, long end) {
    const double n0 = noise_variance(energy, config.snr_db[p]);
    const double threshold = n0 > 0.0 ? detection_threshold(chain.output_noise_variance(n0), config.pfa) : 0.0;
    std::uniform_int_distribution<int> pick(0, k_count - 1);
    long detections = 0;
    InfoSequence info;
    info.alphabet = k_count;
    info.symbols.resize(n_count);
    for (long t = begin; t < end; ++t) {
      std::mt19937_64 rng(derive_seed(config.seed, p, t));
      for (auto& s : info.symbols) s = pick(rng);
      const Waveform w = synthesize(chain.set(), info, chain.ep());
      cd cell;
      if (config.noise == NoiseDomain::projected) {
        cell = compress_at(w.samples, chain, 0);
        if (n0 > 0.0) cell += complex_gaussian(rng, chain.output_noise_variance(n0));
      } else {
        const CVector r = awgn_channel(w.samples, config.delay, 0.0, n0, rng);
        cell = config.full_chain ? radar_process(r, chain).at(config.delay) : compress_at(r, chain, config.delay);
      }
      if (std::abs(cell) >= threshold && std::abs(cell) > 0.0) ++detections;
    }
    return detections;
  };
  const auto counts = run_sweep(config.snr_db.size(), config.trials, config.threads, body);

  SimResult result;
  result.seed = config.seed;
  result.config_hash = content_hash(describe(config));
  for (std::size_t p = 0; p < counts.size(); ++p)
    result.points.push_back(make_point(config.snr_db[p], counts[p], config.trials));
  return result;
}

SimResult simulate_ser(const SignalSet& set, const EpSequence& ep, const SimConfig& config) {
  validate(config);
  require(config.kind != ExperimentKind::pd, "simulate_ser: experiment kind must be an SER kind");
  require(is_power_of_two(set.count()) && set.count() >= 2, "simulate_ser: K must be a power of two >= 2");
  const int n_count = ep.size();
  const int k_count = set.count();
  const int bits = log2_exact(k_count);
  const double energy = static_cast<double>(n_count) * set.length();
  const bool coherent = config.kind == ExperimentKind::ser_coherent;
  std::optional<ReceiveChain> chain;
  if (config.detected_t0) chain.emplace(set, ep);
  // Bank noise covariance is N0 G; G = L L^H.
  const CMatrix gram = set.gram();
  CMatrix chol;
  if (config.noise == NoiseDomain::projected) {
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success) throw NumericError("simulate_ser: Gram matrix is not positive definite");
    chol = llt.matrixL();
  }

  auto body = [&](std::size_t p, long begin, long end) {
    // r_b = d1 / L and d = N d1
    const double d_db = config.snr_db[p] + to_db(static_cast<double>(bits) * n_count);
    const double n0 = noise_variance(energy, d_db);
    std::uniform_int_distribution<int> pick(0, k_count - 1);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    long errors = 0;
    InfoSequence info;
    info.alphabet = k_count;
    info.symbols.resize(n_count);
    for (long t = begin; t < end; ++t) {
      std::mt19937_64 rng(derive_seed(config.seed, p, t));
      for (auto& s : info.symbols) s = pick(rng);
      const double theta = coherent ? 0.0 : phase(rng);
      if (config.noise == NoiseDomain::projected) {
        CMatrix peaks(k_count, n_count);
        CVector z(k_count);
        for (int n = 0; n < n_count; ++n) {
          for (int k = 0; k < k_count; ++k) z(k) = n0 > 0.0 ? complex_gaussian(rng, n0) : cd{};
          peaks.col(n) = gram.col(info.symbols[n]) * std::polar(1.0, ep.phases(n) + theta) + chol * z;
        }
        const InfoSequence decided =
            coherent ? demodulate_coherent(peaks, ep, theta) : demodulate_noncoherent(peaks);
        for (int n = 0; n < n_count; ++n) errors += decided.symbols[n] != info.symbols[n];
        continue;
      }
      const Waveform w = synthesize(set, info, ep);
      const long tail = config.detected_t0 ? set.length() : 0;
      const CVector r = awgn_channel(w.samples, config.delay, theta, n0, rng, tail);

      long t0 = config.delay;
      if (config.detected_t0) {
        const LagSeries out = compress(r, *chain);
        t0 = detect(out, 1.0, 0.5, 0, static_cast<long>(r.size()) - static_cast<long>(w.samples.size())).peak_index;
      }
      const CMatrix peaks = sample_bank(r, set, t0, n_count);
      const InfoSequence decided = coherent ? demodulate_coherent(peaks, ep, theta) : demodulate_noncoherent(peaks);
      for (int n = 0; n < n_count; ++n) errors += decided.symbols[n] != info.symbols[n];
    }
    return errors;
  };
  const auto counts = run_sweep(config.snr_db.size(), config.trials, config.threads, body);

  SimResult result;
  result.seed = config.seed;
  result.config_hash = content_hash(describe(config));
  for (std::size_t p = 0; p < counts.size(); ++p)
    result.points.push_back(make_point(config.snr_db[p], counts[p], config.trials * n_count));
  return result;
}

double crossing_db(const std::vector<SimPoint>& points, double level) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    if ((a.estimate - level) * (b.estimate - level) <= 0.0 && a.estimate != b.estimate)
      return a.snr_db + (level - a.estimate) * (b.snr_db - a.snr_db) / (b.estimate - a.estimate);
  }
  throw NumericError("crossing_db: sweep does not bracket the requested level");
}

double crossing_db_log(const std::vector<SimPoint>& points, double level) {
  const double target = std::log10(level);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    if (a.estimate <= 0.0 || b.estimate <= 0.0) continue;
    const double la = std::log10(a.estimate);
    const double lb = std::log10(b.estimate);
    if ((la - target) * (lb - target) <= 0.0 && la != lb)
      return a.snr_db + (target - la) * (b.snr_db - a.snr_db) / (lb - la);
  }
  throw NumericError("crossing_db_log: sweep does not bracket the requested level");
}

}  // namespace jrc
