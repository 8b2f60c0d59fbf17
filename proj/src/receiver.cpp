#include "jrc/receiver.hpp"

#include <algorithm>

namespace jrc {

ReceiveChain::ReceiveChain(SignalSet set, EpSequence ep) : set_(std::move(set)), ep_(std::move(ep)) {
  require(ep_.size() >= 1, "ReceiveChain: EP sequence must not be empty");
  const long m = set_.length();
  const long n_count = ep_.size();

  const CVector summed = set_.summed();
  h_f1_.first_lag = -(m - 1);
  h_f1_.values = summed.reverse().conjugate();

  h_f2_.first_lag = -(n_count - 1) * m;
  h_f2_.values = CVector::Zero((n_count - 1) * m + 1);
  for (long n = 0; n < n_count; ++n) h_f2_.values(-n * m - h_f2_.first_lag) = std::polar(1.0, -ep_.phases(n));

  reference_.resize(n_count * m);
  for (long n = 0; n < n_count; ++n) reference_.segment(n * m, m) = summed * std::polar(1.0, ep_.phases(n));

  h_f_.first_lag = -(n_count * m - 1);
  h_f_.values = reference_.reverse().conjugate();
}

std::vector<LagSeries> internal_filter_bank(const CVector& received, const SignalSet& set) {
  require(received.size() >= set.length(), "internal_filter_bank: received record shorter than one signal");
  std::vector<LagSeries> out;
  out.reserve(set.count());
  for (int k = 0; k < set.count(); ++k) out.push_back(correlate<double>(received, set.signal(k)));
  return out;
}

BankOutputs radar_process_stages(const CVector& received, const ReceiveChain& chain) {
  BankOutputs out;
  out.channels = internal_filter_bank(received, chain.set());

  out.summed.first_lag = out.channels.front().first_lag;
  out.summed.values = CVector::Zero(out.channels.front().values.size());
  for (const auto& ch : out.channels) out.summed.values += ch.values;

  // r_f2[t] = sum_n exp(-j phi_n) r_f1[t + n M]
  const long m = chain.chips();
  const long n_count = chain.symbols();
  out.compressed.first_lag = out.summed.first_lag - (n_count - 1) * m;
  const long last = out.summed.last_lag();
  out.compressed.values = CVector::Zero(last - out.compressed.first_lag + 1);
  for (long n = 0; n < n_count; ++n) {
    const cd tap = std::polar(1.0, -chain.ep().phases(n));
    // lags t with t + nM inside r_f1
    const long t_lo = out.summed.first_lag - n * m;
    const long count = out.summed.values.size();
    out.compressed.values.segment(t_lo - out.compressed.first_lag, count) += tap * out.summed.values;
  }
  return out;
}

LagSeries radar_process(const CVector& received, const ReceiveChain& chain) {
  return radar_process_stages(received, chain).compressed;
}

LagSeries compress(const CVector& received, const ReceiveChain& chain) {
  return correlate<double>(received, chain.reference());
}

cd compress_at(const CVector& received, const ReceiveChain& chain, long lag) {
  return correlate_at<double>(received, chain.reference(), lag);
}

double detection_threshold(double noise_var_out, double pfa) {
  require(pfa > 0.0 && pfa < 1.0, "detect: pfa must lie in (0, 1)");
  require(noise_var_out > 0.0, "detect: output noise variance must be positive");
  return std::sqrt(noise_var_out * std::log(1.0 / pfa));
}

DetectionReport detect(const LagSeries& compressed, double noise_var_out, double pfa, long window_lo,
                       long window_hi) {
  DetectionReport report;
  report.threshold = detection_threshold(noise_var_out, pfa);
  const long lo = std::max(window_lo, compressed.first_lag);
  const long hi = std::min(window_hi, compressed.last_lag());
  require(lo <= hi, "detect: search window does not overlap the output");
  report.peak_index = lo;
  for (long t = lo; t <= hi; ++t) {
    const double a = std::abs(compressed.values(t - compressed.first_lag));
    if (a > report.peak_amplitude) {
      report.peak_amplitude = a;
      report.peak_index = t;
    }
  }
  report.declared = report.peak_amplitude >= report.threshold;
  return report;
}

DetectionReport detect(const LagSeries& compressed, double noise_var_out, double pfa) {
  return detect(compressed, noise_var_out, pfa, compressed.first_lag, compressed.last_lag());
}

CMatrix sample_bank(const std::vector<LagSeries>& bank, long t0, int symbols, int chips) {
  require(!bank.empty(), "sample_bank: empty filter bank");
  require(symbols >= 1, "sample_bank: N must be positive");
  const long last = t0 + static_cast<long>(symbols - 1) * chips;
  CMatrix peaks(static_cast<Eigen::Index>(bank.size()), symbols);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    require(bank[k].contains(t0) && bank[k].contains(last),
            "demodulate: sampling instants t0 + n Ts fall outside the filter-bank output");
    for (int n = 0; n < symbols; ++n) peaks(k, n) = bank[k].at(t0 + static_cast<long>(n) * chips);
  }
  return peaks;
}

CMatrix sample_bank(const CVector& received, const SignalSet& set, long t0, int symbols) {
  const long m = set.length();
  const long lr = received.size();
  require(t0 >= -(m - 1) && t0 + (symbols - 1) * m <= lr - 1,
          "demodulate: sampling instants t0 + n Ts fall outside the filter-bank output");
  CMatrix peaks(set.count(), symbols);
  for (int n = 0; n < symbols; ++n) {
    const long start = t0 + n * m;
    if (start >= 0 && start + m <= lr) {
      peaks.col(n) = set.chips().adjoint() * received.segment(start, m);
    } else {
      for (int k = 0; k < set.count(); ++k) peaks(k, n) = correlate_at<double>(received, set.signal(k), start);
    }
  }
  return peaks;
}

InfoSequence demodulate_coherent(const CMatrix& peaks, const EpSequence& ep, double theta) {
  require(peaks.cols() == ep.size(), "demodulate_coherent: EP length differs from symbol count");
  InfoSequence info;
  info.alphabet = static_cast<int>(peaks.rows());
  info.symbols.resize(peaks.cols());
  for (Eigen::Index n = 0; n < peaks.cols(); ++n) {
    const cd derotate = std::polar(1.0, -(ep.phases(n) + theta));
    int best = 0;
    double best_value = (peaks(0, n) * derotate).real();
    for (Eigen::Index k = 1; k < peaks.rows(); ++k) {
      const double v = (peaks(k, n) * derotate).real();
      if (v > best_value) {
        best_value = v;
        best = static_cast<int>(k);
      }
    }
    info.symbols[n] = best;
  }
  return info;
}

InfoSequence demodulate_coherent(const std::vector<LagSeries>& bank, long t0, const EpSequence& ep, double theta) {
  const int chips = static_cast<int>(-bank.front().first_lag + 1);
  return demodulate_coherent(sample_bank(bank, t0, ep.size(), chips), ep, theta);
}

InfoSequence demodulate_noncoherent(const CMatrix& peaks) {
  InfoSequence info;
  info.alphabet = static_cast<int>(peaks.rows());
  info.symbols.resize(peaks.cols());
  for (Eigen::Index n = 0; n < peaks.cols(); ++n) {
    int best = 0;
    double best_value = std::norm(peaks(0, n));
    for (Eigen::Index k = 1; k < peaks.rows(); ++k) {
      const double v = std::norm(peaks(k, n));
      if (v > best_value) {
        best_value = v;
        best = static_cast<int>(k);
      }
    }
    info.symbols[n] = best;
  }
  return info;
}

InfoSequence demodulate_noncoherent(const std::vector<LagSeries>& bank, long t0, int symbols, int chips) {
  return demodulate_noncoherent(sample_bank(bank, t0, symbols, chips));
}

}  // namespace jrc
