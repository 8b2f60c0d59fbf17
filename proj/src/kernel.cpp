#include "jrc/kernel.hpp"

#include "jrc/correlate.hpp"

namespace jrc {

namespace {

CVector doppler_modulate(const CVector& s, double doppler) {
  CVector out(s.size());
  for (Eigen::Index x = 0; x < s.size(); ++x) out(x) = s(x) * std::polar(1.0, kTwoPi * doppler * x);
  return out;
}

cd ideal_zero_lag(int chips, double doppler) {
  cd acc{0.0, 0.0};
  for (int x = 0; x < chips; ++x) acc += std::polar(1.0, kTwoPi * doppler * x);
  return acc;
}

}  // namespace

CorrelationKernel CorrelationKernel::from_set(const SignalSet& set) {
  return CorrelationKernel(set, set.count(), set.length());
}

CorrelationKernel CorrelationKernel::ideal(int alphabet, int chips) {
  require(alphabet >= 1 && chips >= 1, "CorrelationKernel::ideal: K and M must be positive");
  return CorrelationKernel(std::nullopt, alphabet, chips);
}

CVector CorrelationKernel::response(int k, int j, double doppler) const {
  require(k >= 0 && k < alphabet_ && j >= 0 && j < alphabet_, "CorrelationKernel: signal index out of range");
  if (set_) return cross_correlation(doppler_modulate(set_->signal(k), doppler), set_->signal(j));
  CVector r = CVector::Zero(2 * chips_ - 1);
  if (k == j) r(chips_ - 1) = ideal_zero_lag(chips_, doppler);
  return r;
}

CVector CorrelationKernel::row_sum(int k, double doppler) const {
  if (set_) {
    // sum_j R_kj = correlation of the shifted s_k against sum_j s_j
    return cross_correlation(doppler_modulate(set_->signal(k), doppler), set_->summed());
  }
  return response(k, k, doppler);
}

LagSeries kernel_response(const CorrelationKernel& kernel, const InfoSequence& info, const EpSequence& ep,
                          double doppler) {
  require(info.size() == ep.size(), "kernel_response: information and EP sequences differ in length");
  const long m = kernel.chips();
  const long n_count = info.size();

  std::vector<CVector> rows(kernel.alphabet());
  std::vector<bool> have(kernel.alphabet(), false);

  LagSeries out;
  out.first_lag = -(n_count * m - 1);
  out.values = CVector::Zero(2 * n_count * m - 1);
  for (long n = 0; n < n_count; ++n) {
    const int k = info.symbols[n];
    require(k >= 0 && k < kernel.alphabet(), "kernel_response: symbol exceeds K - 1");
    if (!have[k]) {
      rows[k] = kernel.row_sum(k, doppler);
      have[k] = true;
    }
    const cd doppler_phase = std::polar(1.0, kTwoPi * doppler * static_cast<double>(n * m));
    for (long q = 0; q < n_count; ++q) {
      const cd w = doppler_phase * std::polar(1.0, ep.phases(n) - ep.phases(q));
      // g[tau] lands at lag l = tau + (n - q) M, tau in [-(M-1), M-1]
      const long start = -(m - 1) + (n - q) * m;
      out.values.segment(start - out.first_lag, 2 * m - 1) += w * rows[k];
    }
  }
  return out;
}

}  // namespace jrc
