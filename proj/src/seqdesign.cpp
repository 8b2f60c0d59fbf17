#include "jrc/seqdesign.hpp"

#include "jrc/genetic.hpp"

#include <algorithm>
#include <random>

namespace jrc {

namespace {

CMatrix project_unimodular(const CMatrix& chips) {
  return chips.unaryExpr([](const cd& z) { return std::polar(1.0, std::arg(z)); });
}

std::vector<std::vector<cd>> spectra(const CMatrix& chips, long n) {
  auto& fft = detail::thread_fft<double>();
  std::vector<std::vector<cd>> out(chips.cols());
  std::vector<cd> padded(n);
  for (Eigen::Index k = 0; k < chips.cols(); ++k) {
    std::fill(padded.begin(), padded.end(), cd{});
    for (Eigen::Index m = 0; m < chips.rows(); ++m) padded[m] = chips(m, k);
    fft.fwd(out[k], padded);
  }
  return out;
}

}  // namespace

SignalSet::SignalSet(CMatrix chips) {
  require(chips.cols() >= 1, "SignalSet: at least one signal required");
  require(chips.rows() >= 1, "SignalSet: empty signals");
  for (Eigen::Index k = 0; k < chips.cols(); ++k)
    for (Eigen::Index m = 0; m < chips.rows(); ++m)
      require(std::abs(std::abs(chips(m, k)) - 1.0) <= kUnimodularTolerance,
              "SignalSet: chip " + std::to_string(m) + " of signal " + std::to_string(k) + " is not unimodular");
  chips_ = project_unimodular(chips);
  metrics_ = correlation_metrics(chips_);
}

std::vector<CVector> all_correlations(const CMatrix& chips) {
  const long m = chips.rows();
  const long k_count = chips.cols();
  const long n = detail::fft_size_for(2 * m - 1);
  const auto spec = spectra(chips, n);
  auto& fft = detail::thread_fft<double>();

  std::vector<CVector> out(k_count * k_count);
  std::vector<cd> prod(n), time;
  for (long k = 0; k < k_count; ++k) {
    for (long j = 0; j < k_count; ++j) {
      for (long i = 0; i < n; ++i) prod[i] = spec[k][i] * std::conj(spec[j][i]);
      fft.inv(time, prod);
      CVector r(2 * m - 1);
      for (long tau = -(m - 1); tau <= m - 1; ++tau) r(tau + m - 1) = time[(tau % n + n) % n];
      out[k * k_count + j] = std::move(r);
    }
  }
  return out;
}

CorrelationMetrics correlation_metrics(const CMatrix& chips) {
  const long m = chips.rows();
  const long k_count = chips.cols();
  const double es = chips.col(0).squaredNorm();
  const auto corr = all_correlations(chips);

  CorrelationMetrics out;
  for (long k = 0; k < k_count; ++k) {
    for (long j = 0; j < k_count; ++j) {
      const CVector& r = corr[k * k_count + j];
      for (long tau = -(m - 1); tau <= m - 1; ++tau) {
        const double mag = std::abs(r(tau + m - 1)) / es;
        if (k == j) {
          if (tau != 0) out.psl = std::max(out.psl, mag);
        } else {
          out.isolation = std::max(out.isolation, mag);
        }
      }
    }
  }

  // Zero-lag cross terms taken from the Gram matrix for exactness.
  const CMatrix gram = chips.adjoint() * chips;
  cd cross{0.0, 0.0};
  for (long k = 0; k < k_count; ++k)
    for (long j = 0; j < k_count; ++j)
      if (j != k) cross += gram(j, k);
  out.gamma = cross.real() / (static_cast<double>(k_count) * es);
  out.gamma_imag = cross.imag() / (static_cast<double>(k_count) * es);
  return out;
}

SignalSet tone_set(int count, int length) {
  require(count >= 1 && length >= 1, "tone_set: count and length must be positive");
  require(count <= length, "tone_set: at most M distinct tones of length M");
  CMatrix chips(length, count);
  for (int k = 0; k < count; ++k)
    for (int m = 0; m < length; ++m)
      chips(m, k) = std::polar(1.0, kTwoPi * static_cast<double>((static_cast<long>(k) * m) % length) / length);
  return SignalSet(std::move(chips));
}

SignalSet random_set(int count, int length, std::uint64_t seed) {
  require(count >= 1 && length >= 1, "random_set: count and length must be positive");
  std::mt19937_64 rng(mix_seed(seed));
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  CMatrix chips(length, count);
  for (int k = 0; k < count; ++k)
    for (int m = 0; m < length; ++m) chips(m, k) = std::polar(1.0, phase(rng));
  return SignalSet(std::move(chips));
}

DesignResult design_orthogonal_set(int count, int length, int iterations, std::uint64_t seed, int check_every) {
  require(count >= 1, "design_orthogonal_set: K must be at least 1");
  require(length >= 2, "design_orthogonal_set: M must be at least 2");
  require(iterations >= 0, "design_orthogonal_set: negative iteration count");
  check_every = std::max(1, check_every);

  const long m = length;
  const long k_count = count;
  const long n = 2 * m;
  const double target_norm = std::sqrt(static_cast<double>(k_count * m));
  auto& fft = detail::thread_fft<double>();

  CMatrix x = random_set(count, length, seed).chips();
  const CorrelationMetrics initial = correlation_metrics(x);

  auto score = [](const CorrelationMetrics& c) { return std::max(c.psl, c.isolation); };
  CMatrix best = x;
  CorrelationMetrics best_metrics = initial;
  int best_iteration = 0;
  std::vector<DesignCheckpoint> trace{{0, initial}};

  std::vector<cd> padded(n), time;
  for (int it = 1; it <= iterations; ++it) {
    auto y = spectra(x, n);
    for (long p = 0; p < n; ++p) {
      double norm = 0.0;
      for (long k = 0; k < k_count; ++k) norm += std::norm(y[k][p]);
      norm = std::sqrt(norm);
      for (long k = 0; k < k_count; ++k) {
        y[k][p] = norm > 1e-300 ? y[k][p] * (target_norm / norm) : cd{target_norm / std::sqrt(double(k_count)), 0.0};
      }
    }
    for (long k = 0; k < k_count; ++k) {
      fft.inv(time, y[k]);
      for (long i = 0; i < m; ++i) x(i, k) = std::polar(1.0, std::arg(time[i]));
    }

    if (it % check_every == 0 || it == iterations) {
      const CorrelationMetrics c = correlation_metrics(x);
      trace.push_back({it, c});
      if (score(c) < score(best_metrics)) {
        best = x;
        best_metrics = c;
        best_iteration = it;
      }
    }
  }

  return DesignResult{SignalSet(std::move(best)), initial, best_iteration, std::move(trace)};
}

SignalSet rotate(const SignalSet& set, const RotationVector& rotation) {
  require(rotation.alphas.size() == set.count(), "rotate: rotation vector length must equal K");
  CMatrix chips = set.chips();
  for (int k = 0; k < set.count(); ++k) chips.col(k) *= std::polar(1.0, rotation.alphas(k));
  return SignalSet(std::move(chips));
}

double rotated_gamma(const CMatrix& gram, const RVector& alphas) {
  const long k_count = gram.rows();
  CVector a(k_count);
  for (long k = 0; k < k_count; ++k) a(k) = std::polar(1.0, alphas(k));
  double es = 0.0;
  for (long k = 0; k < k_count; ++k) es += gram(k, k).real();
  es /= static_cast<double>(k_count);
  const double total = (a.adjoint() * gram * a)(0, 0).real();
  return total / (static_cast<double>(k_count) * es) - 1.0;
}

RotationResult optimize_phase_rotation(const SignalSet& set, int generations, int population, std::uint64_t seed) {
  require(generations >= 0, "optimize_phase_rotation: negative generation count");
  const int k_count = set.count();
  const CMatrix gram = set.gram();
  const double gamma_before = set.metrics().gamma;

  RVector alphas = RVector::Zero(k_count);
  if (k_count > 1 && generations > 0) {
    GeneticOptions options;
    options.population = std::max(population, 4);
    options.generations = generations;
    const RVector identity = RVector::Zero(k_count);
    const auto ga = minimize_phases([&](const RVector& a) { return -rotated_gamma(gram, a); }, k_count, options, seed,
                                    std::span<const RVector>(&identity, 1));
    alphas = ga.best;
  }

  // Coordinate ascent: with the others fixed, alpha_k = arg(sum_{j != k} G(k, j) a_j) is optimal.
  if (k_count > 1) {
    double current = rotated_gamma(gram, alphas);
    for (int sweep = 0; sweep < 200; ++sweep) {
      for (int k = 0; k < k_count; ++k) {
        cd c{0.0, 0.0};
        for (int j = 0; j < k_count; ++j)
          if (j != k) c += gram(k, j) * std::polar(1.0, alphas(j));
        if (std::abs(c) > 0.0) {
          RVector trial = alphas;
          trial(k) = wrap_phase(std::arg(c));
          if (rotated_gamma(gram, trial) >= rotated_gamma(gram, alphas)) alphas = trial;
        }
      }
      const double next = rotated_gamma(gram, alphas);
      if (next - current <= 1e-15 * (1.0 + std::abs(current))) break;
      current = next;
    }
  }

  SignalSet rotated = rotate(set, RotationVector{alphas});
  const double gamma_after = rotated.metrics().gamma;
  return RotationResult{std::move(rotated), RotationVector{alphas}, gamma_before, gamma_after};
}

}  // namespace jrc
