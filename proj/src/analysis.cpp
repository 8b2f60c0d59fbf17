#include "jrc/analysis.hpp"

#include "jrc/correlate.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace jrc {

namespace {

double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Root of f on [lo, hi] in log space; f must change sign.
template <typename F>
double solve_log(F f, double lo, double hi, const char* what) {
  const double flo = f(std::log(lo));
  const double fhi = f(std::log(hi));
  if (!(flo * fhi <= 0.0)) throw NumericError(std::string(what) + ": target outside the solvable range");
  std::uintmax_t iterations = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto [a, b] = boost::math::tools::toms748_solve(f, std::log(lo), std::log(hi), flo, fhi, tol, iterations);
  return std::exp(0.5 * (a + b));
}

}  // namespace

// ---------------------------------------------------------------- PSNR / detection

PsnrTheory psnr_theory(int alphabet, int symbols, double energy, double n0, double gamma) {
  require(alphabet >= 1 && symbols >= 1, "psnr_theory: K and N must be positive");
  require(energy > 0.0 && n0 > 0.0, "psnr_theory: Es and N0 must be positive");
  require(gamma >= -1.0, "psnr_theory: gamma must be at least -1");
  PsnrTheory out;
  out.d2_ideal = 2.0 * symbols * energy / (alphabet * n0);
  out.d2 = out.d2_ideal * (1.0 + gamma);
  return out;
}

double marcum_q1(double a, double b) {
  require(a >= 0.0 && b >= 0.0, "marcum_q1: arguments must be nonnegative");
  if (b == 0.0) return 1.0;
  if (a == 0.0) return std::exp(-0.5 * b * b);
  boost::math::non_central_chi_squared_distribution<double> dist(2.0, a * a);
  return boost::math::cdf(boost::math::complement(dist, b * b));
}

double pd_theory(double snr, double pfa) {
  require(pfa > 0.0 && pfa < 1.0, "pd_theory: pfa must lie in (0, 1)");
  require(snr >= 0.0, "pd_theory: SNR must be nonnegative");
  return marcum_q1(std::sqrt(snr), std::sqrt(2.0 * std::log(1.0 / pfa)));
}

double required_snr(double pd, double pfa) {
  require(pd > pfa && pd < 1.0, "required_snr: pd must lie in (pfa, 1)");
  return solve_log([&](double log_d) { return pd_theory(std::exp(log_d), pfa) - pd; }, 1e-6, 1e6, "required_snr");
}

double required_d_db(double pd, double pfa, int alphabet, double gamma) {
  require(gamma > -1.0, "required_d_db: gamma must exceed -1");
  return to_db(required_snr(pd, pfa) * alphabet / (1.0 + gamma));
}

// ---------------------------------------------------------------- SER

double ser_coherent_theory(int alphabet, double d1) {
  require(alphabet >= 2, "ser_coherent_theory: K must be at least 2");
  require(d1 >= 0.0, "ser_coherent_theory: d1 must be nonnegative");
  const double shift = std::sqrt(d1);
  const double power = alphabet - 1;
  // 1 - Phi^(K-1) = -expm1((K-1) log1p(-Q)) keeps relative precision for small error rates.
  auto integrand = [&](double u) {
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
    return pdf * -std::expm1(power * std::log1p(-normal_tail(u + shift)));
  };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, -12.0, 12.0, 20, 1e-13, &error);
  if (!(error < 1e-9) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "ser_coherent_theory: quadrature did not converge (K=" << alphabet << ", d1=" << d1
        << ", error estimate=" << error << ")";
    throw NumericError(msg.str());
  }
  return std::clamp(value, 0.0, 1.0);
}

double ser_noncoherent_bound(int alphabet, double d1) {
  require(alphabet >= 2, "ser_noncoherent_bound: K must be at least 2");
  require(d1 >= 0.0, "ser_noncoherent_bound: d1 must be nonnegative");
  return std::min(1.0, 0.5 * (alphabet - 1) * std::exp(-d1 / 4.0));
}

double ser_noncoherent_exact(int alphabet, double d1) {
  require(alphabet >= 2 && alphabet <= 32, "ser_noncoherent_exact: K must lie in [2, 32]");
  require(d1 >= 0.0, "ser_noncoherent_exact: d1 must be nonnegative");
  const double es_n0 = d1 / 2.0;
  double sum = 0.0;
  double binom = 1.0;
  for (int k = 1; k < alphabet; ++k) {
    binom = binom * (alphabet - k) / k;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += sign * binom / (k + 1.0) * std::exp(-static_cast<double>(k) / (k + 1.0) * es_n0);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double required_d1(SerKind kind, int alphabet, double target) {
  require(target > 0.0 && target < 1.0 - 1.0 / alphabet, "required_d1: target SER out of range");
  auto ser = [&](double d1) {
    switch (kind) {
      case SerKind::coherent:
        return ser_coherent_theory(alphabet, d1);
      case SerKind::noncoherent_bound:
        return ser_noncoherent_bound(alphabet, d1);
      case SerKind::noncoherent_exact:
        return ser_noncoherent_exact(alphabet, d1);
    }
    return 1.0;
  };
  auto f = [&](double log_d1) {
    return std::log(std::max(ser(std::exp(log_d1)), std::numeric_limits<double>::min())) - std::log(target);
  };
  return solve_log(f, 1e-6, 1e4, "required_d1");
}

// ---------------------------------------------------------------- ambiguity

std::vector<long> full_delay_grid(int symbols, int chips) {
  const long span = static_cast<long>(symbols) * chips - 1;
  std::vector<long> out;
  out.reserve(2 * span + 1);
  for (long l = -span; l <= span; ++l) out.push_back(l);
  return out;
}

namespace {

void check_grids(const std::vector<long>& delays, const std::vector<double>& dopplers) {
  require(!delays.empty(), "ambiguity: empty delay grid");
  require(!dopplers.empty(), "ambiguity: empty Doppler grid");
}

AmbiguitySurface make_surface(const std::vector<long>& delays, const std::vector<double>& dopplers) {
  AmbiguitySurface s;
  s.delays = delays;
  s.dopplers = dopplers;
  s.values = CMatrix::Zero(static_cast<Eigen::Index>(delays.size()), static_cast<Eigen::Index>(dopplers.size()));
  return s;
}

}  // namespace

AmbiguitySurface ambiguity_direct(const Waveform& waveform, const ReceiveChain& chain, const std::vector<long>& delays,
                                  const std::vector<double>& dopplers) {
  check_grids(delays, dopplers);
  require(waveform.symbols == chain.symbols() && waveform.chips == chain.chips(),
          "ambiguity_direct: waveform and chain dimensions differ");
  AmbiguitySurface out = make_surface(delays, dopplers);
  CVector shifted(waveform.samples.size());
  for (std::size_t f = 0; f < dopplers.size(); ++f) {
    for (Eigen::Index x = 0; x < shifted.size(); ++x)
      shifted(x) = waveform.samples(x) * std::polar(1.0, kTwoPi * dopplers[f] * static_cast<double>(x));
    const LagSeries row = compress(shifted, chain);
    for (std::size_t i = 0; i < delays.size(); ++i) out.values(i, f) = row.at(delays[i]);
  }
  return out;
}

AmbiguitySurface ambiguity_expanded(const CorrelationKernel& kernel, const InfoSequence& info, const EpSequence& ep,
                                    const std::vector<long>& delays, const std::vector<double>& dopplers) {
  check_grids(delays, dopplers);
  AmbiguitySurface out = make_surface(delays, dopplers);
  for (std::size_t f = 0; f < dopplers.size(); ++f) {
    const LagSeries row = kernel_response(kernel, info, ep, dopplers[f]);
    for (std::size_t i = 0; i < delays.size(); ++i) out.values(i, f) = row.at(delays[i]);
  }
  return out;
}

AmbiguitySurface ambiguity_factored(const CorrelationKernel& kernel, const EpSequence& ep,
                                    const std::vector<long>& delays, const std::vector<double>& dopplers,
                                    FactorReference reference) {
  check_grids(delays, dopplers);
  const long m = kernel.chips();
  const long n_count = ep.size();
  AmbiguitySurface out = make_surface(delays, dopplers);
  for (std::size_t f = 0; f < dopplers.size(); ++f) {
    CVector single;
    if (reference == FactorReference::first_signal) {
      single = kernel.response(0, 0, dopplers[f]);
    } else {
      single = CVector::Zero(2 * m - 1);
      for (int k = 0; k < kernel.alphabet(); ++k) single += kernel.response(k, k, dopplers[f]);
      single /= static_cast<double>(kernel.alphabet());
    }
    const double nu = dopplers[f] * m;
    CVector ep_row(2 * n_count - 1);
    for (long q = -(n_count - 1); q <= n_count - 1; ++q) ep_row(q + n_count - 1) = ep_ambiguity(ep, q, nu);

    for (std::size_t i = 0; i < delays.size(); ++i) {
      const long l = delays[i];
      cd acc{0.0, 0.0};
      for (long q = -(n_count - 1); q <= n_count - 1; ++q) {
        const long tau = l - q * m;
        if (tau >= -(m - 1) && tau <= m - 1) acc += ep_row(q + n_count - 1) * single(tau + m - 1);
      }
      out.values(i, f) = acc;
    }
  }
  return out;
}

double max_abs_difference(const AmbiguitySurface& a, const AmbiguitySurface& b) {
  require(a.values.rows() == b.values.rows() && a.values.cols() == b.values.cols(),
          "max_abs_difference: surfaces differ in shape");
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

std::vector<PslRow> psl_vs_doppler(const CorrelationKernel& kernel, const EpSequence& ep,
                                   const std::vector<double>& tfd_max, const PslSweepOptions& options) {
  require(options.doppler_points >= 1, "psl_vs_doppler: at least one Doppler point required");
  const int n_count = ep.size();
  const int m = kernel.chips();
  const InfoSequence info = random_info(n_count, kernel.alphabet(), options.message_seed);
  const std::vector<long> delays = full_delay_grid(n_count, m);
  const bool expanded = options.expanded || kernel.is_ideal();

  std::optional<ReceiveChain> chain;
  std::optional<Waveform> waveform;
  if (!expanded) {
    chain.emplace(*kernel.set(), ep);
    waveform = synthesize(*kernel.set(), info, ep);
  }
  auto surface = [&](const std::vector<double>& dopplers) {
    return expanded ? ambiguity_expanded(kernel, info, ep, delays, dopplers)
                    : ambiguity_direct(*waveform, *chain, delays, dopplers);
  };

  const long zero_row = n_count * static_cast<long>(m) - 1;  // index of lag 0 in the full grid
  const double peak = std::abs(surface({0.0}).values(zero_row, 0));

  std::vector<PslRow> rows;
  for (double bound : tfd_max) {
    require(bound >= 0.0, "psl_vs_doppler: Doppler bounds must be nonnegative");
    const int points = bound == 0.0 ? 1 : options.doppler_points;
    std::vector<double> tfd(points);
    for (int i = 0; i < points; ++i) tfd[i] = points == 1 ? 0.0 : -bound + 2.0 * bound * i / (points - 1);
    std::vector<double> dopplers(points);
    for (int i = 0; i < points; ++i) dopplers[i] = tfd_to_doppler(tfd[i], n_count, m);

    const AmbiguitySurface a = surface(dopplers);
    PslRow row;
    row.tfd_max = bound;
    double worst = 0.0, worst_row = 0.0, worst_r2 = 0.0, worst_r2_row = 0.0;
    for (int f = 0; f < points; ++f) {
      double side = 0.0;
      for (Eigen::Index i = 0; i < a.values.rows(); ++i)
        if (i != zero_row) side = std::max(side, std::abs(a.values(i, f)));
      worst = std::max(worst, side);
      worst_row = std::max(worst_row, side / std::abs(a.values(zero_row, f)));

      const double nu = dopplers[f] * m;
      double side_r2 = 0.0;
      for (int q = -(n_count - 1); q <= n_count - 1; ++q)
        if (q != 0) side_r2 = std::max(side_r2, std::abs(ep_ambiguity(ep, q, nu)));
      worst_r2 = std::max(worst_r2, side_r2);
      worst_r2_row = std::max(worst_r2_row, side_r2 / std::abs(ep_ambiguity(ep, 0, nu)));
    }
    row.psl_a_db = amplitude_db(worst / peak);
    row.psl_a_row_db = amplitude_db(worst_row);
    row.psl_r2_db = amplitude_db(worst_r2 / n_count);
    row.psl_r2_row_db = amplitude_db(worst_r2_row);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------- dissimilarity

namespace {

LagSeries noiseless_output(const CorrelationKernel& kernel, const std::optional<ReceiveChain>& chain,
                           const InfoSequence& info, const EpSequence& ep) {
  if (chain) return compress(synthesize(chain->set(), info, ep).samples, *chain);
  return kernel_response(kernel, info, ep, 0.0);
}

double pair_dissimilarity(const LagSeries& y1, const LagSeries& y2, double energy) {
  require(y1.first_lag == y2.first_lag && y1.values.size() == y2.values.size(),
          "dissimilarity: outputs on different lag grids");
  return (y1.values.cwiseAbs() - y2.values.cwiseAbs()).cwiseAbs().maxCoeff() / energy;
}

}  // namespace

double dissimilarity_pair(const CorrelationKernel& kernel, const EpSequence& ep, const InfoSequence& first,
                          const InfoSequence& second) {
  std::optional<ReceiveChain> chain;
  if (kernel.set()) chain.emplace(*kernel.set(), ep);
  const double energy = static_cast<double>(ep.size()) * kernel.energy();
  return pair_dissimilarity(noiseless_output(kernel, chain, first, ep), noiseless_output(kernel, chain, second, ep),
                            energy);
}

DissimilarityReport dissimilarity(const CorrelationKernel& kernel, const EpSequence& ep, int pairs, std::uint64_t seed,
                                  int threads) {
  require(pairs >= 1, "dissimilarity: Mon must be at least 1");
  std::optional<ReceiveChain> chain;
  if (kernel.set()) chain.emplace(*kernel.set(), ep);
  const double energy = static_cast<double>(ep.size()) * kernel.energy();

  DissimilarityReport report;
  report.pairs = pairs;
  report.d_values.assign(pairs, 0.0);
  auto work = [&](int begin, int end) {
    for (int p = begin; p < end; ++p) {
      const InfoSequence a = random_info(ep.size(), kernel.alphabet(), derive_seed(seed, p, 1));
      const InfoSequence b = random_info(ep.size(), kernel.alphabet(), derive_seed(seed, p, 2));
      report.d_values[p] =
          pair_dissimilarity(noiseless_output(kernel, chain, a, ep), noiseless_output(kernel, chain, b, ep), energy);
    }
  };
  threads = std::clamp(threads, 1, pairs);
  if (threads == 1) {
    work(0, pairs);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, pairs * t / threads, pairs * (t + 1) / threads);
    for (auto& th : pool) th.join();
  }

  double sum = 0.0;
  for (double d : report.d_values) sum += d;
  report.d_mean = sum / pairs;
  report.d_mean_db = amplitude_db(report.d_mean);
  return report;
}

}  // namespace jrc
