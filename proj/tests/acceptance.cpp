// Acceptance checks: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include "jrc/analysis.hpp"
#include "jrc/cli.hpp"
#include "jrc/csv.hpp"
#include "jrc/kernel.hpp"
#include "jrc/receiver.hpp"
#include "jrc/seqdesign.hpp"
#include "jrc/simkit.hpp"
#include "jrc/waveform.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace jrc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kRelTol1 = 1e-9;
constexpr double kGapTolDb = 0.01;
constexpr double kPdLevel = 0.9;
constexpr double kPdPfa = 1e-3;
constexpr long kPdTrials = 100000;
constexpr double kReferenceGainDb[] = {0.1, 1.0, 1.7};
constexpr double kReferenceGainTolDb = 0.5;
constexpr long kSerSymbols = 1000000;
constexpr double kSerHorizontalDb = 0.5;
constexpr double kSerLo = 1e-4;
constexpr double kSerHi = 1e-1;
constexpr double kSigma = 3.0;
constexpr double kGapLoDb = 0.2;
constexpr double kGapHiDb = 0.6;
constexpr double kAfTfd = 0.2;
constexpr double kAfRuntimeS = 30.0;
constexpr double kAfIdealRel = 1e-10;
constexpr double kBarkerStartDb = -19.0;
constexpr double kBarkerEndDb = -7.0;
constexpr double kOptimizedCeilingDb = -14.0;
constexpr double kPslTolDb = 2.0;
constexpr double kDissimZero = 1e-12;
constexpr double kDissimTargetDb = -24.0;
constexpr double kDissimTolDb = 3.0;
constexpr double kDissimNoiseDb = 1.0;
constexpr int kMon = 500;

constexpr int kChips = 200;
constexpr int kSymbols = 13;
constexpr int kDesignIterations = 1000;
constexpr std::uint64_t kSeed = 1;

int failures = 0;

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  std::printf("    ");
  std::vprintf(fmt, args);
  std::printf("\n");
  va_end(args);
}

void verdict(int id, const std::string& name, bool pass, double seconds) {
  std::printf("%s criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void criterion(int id, const std::string& name, const std::function<bool()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  try {
    pass = body();
  } catch (const std::exception& e) {
    detail("exception: %s", e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  verdict(id, name, pass, s);
}

SignalSet can_set(int k, int m, std::uint64_t seed) {
  const SignalSet designed = design_orthogonal_set(k, m, kDesignIterations, seed).set;
  return optimize_phase_rotation(designed, 200, 50, seed).set;
}

// Worst |y(qM)| / |y(0)| over symbol lags q = 1..N-1 for a noiseless compressed output.
double symbol_lag_ratio(const ReceiveChain& chain, const Waveform& w) {
  const LagSeries y = compress(w.samples, chain);
  const double peak = std::abs(y.at(0));
  double worst = 0.0;
  for (int q = 1; q < chain.symbols(); ++q) {
    worst = std::max(worst, std::abs(y.at(static_cast<long>(q) * chain.chips())) / peak);
    worst = std::max(worst, std::abs(y.at(-static_cast<long>(q) * chain.chips())) / peak);
  }
  return worst;
}

bool c1() {
  const SignalSet set = tone_set(4, 64);
  const InfoSequence info = random_info(kSymbols, 4, kSeed);
  bool ok = true;
  for (const auto& [ep, expected, label] :
       {std::tuple{ep_barker13(), 1.0 / 13.0, "barker13"}, std::tuple{ep_constant(13), 12.0 / 13.0, "constant"}}) {
    const ReceiveChain chain(set, ep);
    const double ratio = symbol_lag_ratio(chain, synthesize(set, info, ep));
    const double rel = std::abs(ratio - expected) / expected;
    detail("%s: ratio %.12f (%.4f dB), expected %.12f, rel err %.2e", label, ratio, 20.0 * std::log10(ratio), expected, rel);
    ok = ok && rel <= kRelTol1;
  }
  return ok;
}

bool c2() {
  bool ok = true;
  for (int k : {2, 4, 8, 16, 64})
    for (double pd : {0.5, 0.9, 0.99}) {
      const double mf = to_db(required_snr(pd, kPdPfa));
      const double gap = required_d_db(pd, kPdPfa, k, 0.0) - mf;
      const double err = std::abs(gap - to_db(k));
      if (pd == 0.9) detail("K=%d: gap %.6f dB, 10log10 K %.6f dB", k, gap, to_db(k));
      ok = ok && err <= kGapTolDb;
    }
  return ok;
}

bool c3() {
  const int ks[] = {2, 4, 8};
  double gains[3];
  bool reference_ok = true;
  for (int i = 0; i < 3; ++i) {
    const int k = ks[i];
    const SignalSet set = can_set(k, kChips, kSeed);
    const ReceiveChain chain(set, ep_barker13());
    const double ideal = required_d_db(kPdLevel, kPdPfa, k, 0.0);
    SimConfig c;
    c.kind = ExperimentKind::pd;
    c.alphabet = k;
    c.chips = kChips;
    c.pfa = kPdPfa;
    c.trials = kPdTrials;
    c.seed = kSeed;
    c.noise = NoiseDomain::projected;
    for (double off = -2.0; off <= 0.5 + 1e-9; off += 0.25) c.snr_db.push_back(ideal + off);
    const SimResult r = simulate_pd(chain, c);
    const double sim = crossing_db(r.points, kPdLevel);
    gains[i] = ideal - sim;
    const double gamma = correlation_metrics(set).gamma;
    detail("K=%d: gamma %.4f, ideal %.3f dB, simulated %.3f dB, gain %.3f dB (theory %.3f dB, reference %.1f dB)", k,
           gamma, ideal, sim, gains[i], to_db(1.0 + gamma), kReferenceGainDb[i]);
    reference_ok = reference_ok && std::abs(gains[i] - kReferenceGainDb[i]) <= kReferenceGainTolDb;
  }
  const bool trend = gains[0] > 0.0 && gains[0] < gains[1] && gains[1] < gains[2];
  detail("trend (gain > 0, increasing in K): %s", trend ? "holds" : "violated");
  detail("reference gains within %.1f dB (stochastic, not asserted): %s", kReferenceGainTolDb, reference_ok ? "yes" : "no");
  return trend;
}

// SER sweep on a 1 dB grid covering [lo, hi] of the coherent theory curve, plus `extra` dB.
std::vector<double> ser_grid(int k, double extra) {
  const double l = std::log2(k);
  const double lo = to_db(required_d1(SerKind::coherent, k, kSerHi) / l);
  const double hi = to_db(required_d1(SerKind::coherent, k, kSerLo) / l);
  std::vector<double> g;
  for (double x = std::floor(lo) - 1.0; x <= std::ceil(hi) + extra + 1e-9; x += 1.0) g.push_back(x);
  return g;
}

SimResult run_ser(const SignalSet& set, ExperimentKind kind, const std::vector<double>& grid) {
  SimConfig c;
  c.kind = kind;
  c.alphabet = set.count();
  c.chips = set.length();
  c.snr_db = grid;
  c.trials = (kSerSymbols + kSymbols - 1) / kSymbols;
  c.seed = kSeed;
  c.noise = NoiseDomain::projected;
  return simulate_ser(set, ep_barker13(), c);
}

struct SerRuns {
  int k;
  SimResult coherent;
  SimResult noncoherent;
};

std::vector<SerRuns>& ser_runs() {
  static std::vector<SerRuns> runs = [] {
    std::vector<SerRuns> v;
    for (int k : {2, 4, 8}) {
      const SignalSet set = can_set(k, kChips, kSeed);
      const auto grid = ser_grid(k, 2.0);
      v.push_back({k, run_ser(set, ExperimentKind::ser_coherent, grid),
                   run_ser(set, ExperimentKind::ser_noncoherent, grid)});
    }
    return v;
  }();
  return runs;
}

bool c4() {
  bool ok = true;
  for (const auto& run : ser_runs()) {
    const double l = std::log2(run.k);
    double worst = 0.0;
    int used = 0;
    for (const auto& p : run.coherent.points) {
      if (p.estimate < kSerLo || p.estimate > kSerHi) continue;
      const double theory_db = to_db(required_d1(SerKind::coherent, run.k, p.estimate) / l);
      worst = std::max(worst, std::abs(p.snr_db - theory_db));
      ++used;
    }
    detail("K=%d: %d points in [1e-4, 1e-1], worst horizontal distance %.3f dB", run.k, used, worst);
    ok = ok && used >= 2 && worst <= kSerHorizontalDb;
  }
  return ok;
}

bool c5() {
  bool ok = true;
  detail("simulations shared with criterion 4");
  for (const auto& run : ser_runs()) {
    const double l = std::log2(run.k);
    bool below = true;
    for (const auto& p : run.noncoherent.points) {
      const double d1 = from_db(p.snr_db) * l;
      const double bound = ser_noncoherent_bound(run.k, d1);
      const double sigma = std::sqrt(bound * (1.0 - bound) / p.trials);
      if (p.estimate > bound + kSigma * sigma) {
        below = false;
        detail("K=%d: r_b %.1f dB: %.3e exceeds bound %.3e", run.k, p.snr_db, p.estimate, bound);
      }
      if (run.k == 2) {
        const double exact = 0.5 * std::exp(-d1 / 4.0);
        const double s = std::sqrt(exact * (1.0 - exact) / p.trials);
        if (std::abs(p.estimate - exact) > kSigma * s) {
          below = false;
          detail("K=2: r_b %.1f dB: %.4e vs (1/2)exp(-d1/4) = %.4e (%.1f sigma)", p.snr_db, p.estimate, exact,
                 std::abs(p.estimate - exact) / s);
        }
      }
    }
    const double coh = crossing_db_log(run.coherent.points, kSerLo);
    const double non = crossing_db_log(run.noncoherent.points, kSerLo);
    const double gap = non - coh;
    const double theory_gap = to_db(required_d1(SerKind::noncoherent_exact, run.k, kSerLo) /
                                    required_d1(SerKind::coherent, run.k, kSerLo));
    detail("K=%d: r_b at 1e-4 coherent %.3f dB, non-coherent %.3f dB, gap %.3f dB (theory gap %.3f dB), bound %s",
           run.k, coh, non, gap, theory_gap, below ? "respected" : "violated");
    ok = ok && below && gap >= kGapLoDb && gap <= kGapHiDb;
  }
  return ok;
}

bool c6() {
  const auto t0 = std::chrono::steady_clock::now();
  const SignalSet set = can_set(2, kChips, kSeed);
  const EpSequence ep = ep_barker13();
  const InfoSequence info = random_info(kSymbols, 2, kSeed);
  const ReceiveChain chain(set, ep);
  const std::vector<long> delays = full_delay_grid(kSymbols, kChips);
  std::vector<double> dopplers;
  for (int i = 0; i <= 20; ++i) dopplers.push_back(tfd_to_doppler(-kAfTfd + i * kAfTfd / 10.0, kSymbols, kChips));
  const auto direct = ambiguity_direct(synthesize(set, info, ep), chain, delays, dopplers);
  const auto factored = ambiguity_factored(CorrelationKernel::from_set(set), ep, delays, dopplers);
  const double diff = max_abs_difference(direct, factored);
  const double es = set.energy();
  const double bound = kSymbols * 2 * correlation_metrics(set).isolation * es;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail("CAN K=2: max |direct - factored| %.3f (%.4f of N Es), bound N K I Es %.3f, %.1f s", diff,
         diff / (kSymbols * es), bound, seconds);

  const CorrelationKernel ideal = CorrelationKernel::ideal(2, kChips);
  const auto exp_ideal = ambiguity_expanded(ideal, info, ep, delays, dopplers);
  const auto fac_ideal = ambiguity_factored(ideal, ep, delays, dopplers);
  const double ideal_rel = max_abs_difference(exp_ideal, fac_ideal) / (kSymbols * es);
  detail("ideal kernel: max difference %.2e of N Es", ideal_rel);
  return diff <= bound && ideal_rel <= kAfIdealRel && seconds < kAfRuntimeS;
}

bool c7() {
  const SignalSet set = can_set(2, kChips, kSeed);
  const CorrelationKernel kernel = CorrelationKernel::from_set(set);
  const std::vector<double> bounds{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  EpOptimizeOptions opt;
  opt.seed = kSeed;
  const EpSequence optimized = optimize_ep_doppler(opt).ep;
  const auto barker = psl_vs_doppler(kernel, ep_barker13(), bounds);
  const auto best = psl_vs_doppler(kernel, optimized, bounds);
  detail("tfd_max  barker A / per-cut A (dB)   optimized A / per-cut A (dB)");
  double worst_opt = -1e9;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    detail("%.2f     %7.2f / %7.2f            %7.2f / %7.2f", bounds[i], barker[i].psl_a_db, barker[i].psl_a_row_db,
           best[i].psl_a_db, best[i].psl_a_row_db);
    worst_opt = std::max({worst_opt, best[i].psl_a_db, best[i].psl_a_row_db});
  }
  const double start = barker.front().psl_a_db;
  const double end = barker.back().psl_a_row_db;
  const bool start_ok = std::abs(start - kBarkerStartDb) <= kPslTolDb;
  const bool end_ok = std::abs(end - kBarkerEndDb) <= kPslTolDb;
  const bool opt_ok = worst_opt < kOptimizedCeilingDb + kPslTolDb;
  detail("barker start %.2f dB (target %.0f), end %.2f dB per-cut (target %.0f), optimized worst %.2f dB (< %.0f)",
         start, kBarkerStartDb, end, kBarkerEndDb, worst_opt, kOptimizedCeilingDb);
  return start_ok && end_ok && opt_ok;
}

bool c8() {
  bool ok = true;
  const EpSequence ep = ep_barker13();
  const auto ideal = dissimilarity(CorrelationKernel::ideal(2, kChips), ep, kMon, kSeed);
  double worst_ideal = 0.0;
  for (double d : ideal.d_values) worst_ideal = std::max(worst_ideal, d);
  detail("ideal set: max D %.2e over %d pairs", worst_ideal, ideal.pairs);
  ok = ok && worst_ideal <= kDissimZero;

  double previous = 0.0;
  for (int m : {200, 400, 600, 800, 1000}) {
    const auto r = dissimilarity(CorrelationKernel::from_set(can_set(2, m, kSeed)), ep, kMon, kSeed);
    detail("M=%d: D_mean %.2f dB", m, r.d_mean_db);
    if (m == 200) ok = ok && std::abs(r.d_mean_db - kDissimTargetDb) <= kDissimTolDb;
    if (m > 200 && r.d_mean_db > previous + kDissimNoiseDb) ok = false;
    if (m == 200) {
      for (std::uint64_t seed : {2, 3}) {
        const auto other = dissimilarity(CorrelationKernel::from_set(can_set(2, m, seed)), ep, kMon, seed);
        detail("M=200 seed %llu: D_mean %.2f dB", static_cast<unsigned long long>(seed), other.d_mean_db);
        ok = ok && std::abs(other.d_mean_db - r.d_mean_db) <= kDissimNoiseDb;
      }
    }
    previous = r.d_mean_db;
  }
  return ok;
}

bool c9() {
  const fs::path root = fs::temp_directory_path() / "jrc_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"pd.csv", {"pd", "--k", "4", "--m", "64", "--iterations", "100", "--snr-db", "8..14:2", "--trials", "2000"}},
      {"ser.csv", {"ser", "--k", "4", "--m", "64", "--iterations", "100", "--snr-db", "0..6:2", "--trials", "500"}},
      {"ser.csv", {"ser", "--noncoherent", "--k", "8", "--m", "32", "--iterations", "100", "--snr-db", "2..6:2",
                   "--trials", "300", "--noise-domain", "projected"}},
      {"dissim.csv", {"dissim", "--k", "2", "--m", "100", "--mon", "100"}},
  };
  bool ok = true;
  int index = 0;
  for (const auto& [file, args] : commands) {
    std::string reference;
    for (const char* threads : {"1", "2", "5"}) {
      const fs::path dir = root / (std::to_string(index) + "_" + threads);
      auto a = args;
      a.insert(a.end(), {"--seed", "11", "--threads", threads, "--out-dir", dir.string()});
      std::ostringstream out, err;
      if (cli::run(a, out, err) != cli::kExitOk) {
        detail("%s failed: %s", args[0].c_str(), err.str().c_str());
        ok = false;
        continue;
      }
      const std::string bytes = csv::load((dir / file).string());
      if (reference.empty()) reference = bytes;
      else if (bytes != reference) {
        detail("%s with %s workers differs from 1 worker", args[0].c_str(), threads);
        ok = false;
      }
    }
    detail("%s (%s): %zu bytes compared across 1, 2, 5 workers", args[0].c_str(), file.c_str(), reference.size());
    ++index;
  }
  fs::remove_all(root);
  return ok;
}

}  // namespace

int main() {
  criterion(1, "EP symbol-lag sidelobes with an orthogonal surrogate", c1);
  criterion(2, "ideal detection gap equals 10 log10 K", c2);
  criterion(3, "optimized-set detection gain", c3);
  criterion(4, "coherent SER against theory", c4);
  criterion(5, "non-coherent SER against bound and coherent", c5);
  criterion(6, "ambiguity factorization", c6);
  criterion(7, "peak sidelobe level versus Doppler", c7);
  criterion(8, "dissimilarity", c8);
  criterion(9, "determinism across worker counts", c9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
