#include "jrc/receiver.hpp"
#include "jrc/simkit.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace jrc;

namespace {

CVector embed(const CVector& s, long delay, long tail) {
  CVector r = CVector::Zero(delay + s.size() + tail);
  r.segment(delay, s.size()) = s;
  return r;
}

}  // namespace

TEST_SUITE("receiver") {
  TEST_CASE("bank output for a single signal") {
    const SignalSet set = design_orthogonal_set(4, 64, 200, 1).set;
    const auto bank = internal_filter_bank(set.signal(1), set);
    REQUIRE(bank.size() == 4);
    CHECK(bank[1].first_lag == -63);
    CHECK(std::abs(bank[1].at(0) - cd(64.0, 0.0)) < 1e-9);
    for (int k : {0, 2, 3}) CHECK(std::abs(bank[k].at(0)) <= set.metrics().isolation * 64.0 + 1e-9);

    const auto rotated = internal_filter_bank(set.signal(0) * std::polar(1.0, kPi / 3), set);
    CHECK(std::abs(rotated[0].at(0) - 64.0 * std::polar(1.0, kPi / 3)) < 1e-9);

    const auto zeros = internal_filter_bank(CVector::Zero(100), set);
    for (const auto& ch : zeros) CHECK(test::max_abs(ch.values) == 0.0);
  }

  TEST_CASE("staged chain equals a single correlation with the combined filter") {
    const SignalSet set = random_set(4, 40, 2);
    const EpSequence ep = ep_barker13();
    const ReceiveChain chain(set, ep);
    const CVector r = test::random_gaussian(13 * 40 + 75, 3);
    const LagSeries staged = radar_process(r, chain);
    const LagSeries direct = compress(r, chain);
    REQUIRE(staged.first_lag == direct.first_lag);
    REQUIRE(staged.values.size() == direct.values.size());
    CHECK(staged.first_lag == -(13 * 40 - 1));
    const double scale = test::max_abs(direct.values);
    CHECK((staged.values - direct.values).cwiseAbs().maxCoeff() / scale < 1e-9);
    for (long t : {-519L, -3L, 0L, 40L, 200L, 594L}) CHECK(std::abs(compress_at(r, chain, t) - direct.at(t)) < 1e-9);

    // Convolution with h_f by definition: y[t] = sum_x r[x] h_f[t - x].
    const LagSeries& hf = chain.combined_filter();
    for (long t : {-100L, 0L, 17L, 300L}) {
      cd acc{};
      for (long x = 0; x < r.size(); ++x) acc += r(x) * hf.at(t - x);
      CHECK(std::abs(acc - direct.at(t)) < 1e-9 * scale);
    }
  }

  TEST_CASE("stages expose the filter bank and channel sum") {
    const SignalSet set = random_set(2, 16, 4);
    const ReceiveChain chain(set, ep_barker13());
    const CVector r = test::random_gaussian(300, 5);
    const BankOutputs b = radar_process_stages(r, chain);
    CVector sum = b.channels[0].values + b.channels[1].values;
    CHECK((sum - b.summed.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(chain.zero_lag_sum() == doctest::Approx(set.summed().squaredNorm()));
  }

  TEST_CASE("orthogonal surrogate: peak N Es at t0, information-blind output") {
    const SignalSet set = tone_set(4, 32);
    const ReceiveChain chain(set, ep_barker13());
    const long t0 = 57;
    const InfoSequence a = random_info(13, 4, 1);
    const InfoSequence b = random_info(13, 4, 2);
    REQUIRE(a.symbols != b.symbols);
    const LagSeries ya = compress(embed(synthesize(set, a, chain.ep()).samples, t0, 32), chain);
    const LagSeries yb = compress(embed(synthesize(set, b, chain.ep()).samples, t0, 32), chain);
    CHECK(std::abs(ya.at(t0)) == doctest::Approx(13.0 * 32.0));
    // Symbol-lag sidelobes follow |R2|: exactly 1/13 of the peak for Barker-13.
    double side = 0.0;
    for (int q = -12; q <= 12; ++q)
      if (q) side = std::max(side, std::abs(ya.at(t0 + q * 32)));
    CHECK(side / std::abs(ya.at(t0)) == doctest::Approx(1.0 / 13.0).epsilon(1e-9));
    // Cells at symbol lags do not depend on the message.
    for (int q = -12; q <= 12; ++q)
      CHECK(std::abs(std::abs(ya.at(t0 + q * 32)) - std::abs(yb.at(t0 + q * 32))) < 1e-9);
  }

  TEST_CASE("detection threshold closed form") {
    CHECK(detection_threshold(1.0, 1e-6) == doctest::Approx(3.7169).epsilon(1e-4));
    CHECK(detection_threshold(4.0, 1e-6) == doctest::Approx(2.0 * std::sqrt(std::log(1e6))));
    CHECK_THROWS_AS(detection_threshold(1.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(detection_threshold(1.0, 1.0), InvalidInput);
  }

  TEST_CASE("noise-only false-alarm rate matches pfa") {
    // 10^6 independent complex Gaussian cells of unit variance.
    const double pfa = 1e-3;
    const double eta = detection_threshold(1.0, pfa);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    const long cells = 1000000;
    long alarms = 0;
    for (long i = 0; i < cells; ++i) {
      const double re = g(rng);
      if (std::abs(cd(re, g(rng))) >= eta) ++alarms;
    }
    const double sigma = std::sqrt(pfa * (1 - pfa) / cells);
    CHECK(std::abs(alarms / double(cells) - pfa) < 3 * sigma);
  }

  TEST_CASE("noise-only false-alarm rate through the chain") {
    // Cells spaced NM apart are independent; 200 records x 5 cells.
    const SignalSet set = random_set(2, 20, 7);
    const ReceiveChain chain(set, ep_barker13());
    const double n0 = 1.0;
    const double var = chain.output_noise_variance(n0);
    const double eta = detection_threshold(var, 0.05);
    std::mt19937_64 rng(3);
    long alarms = 0, cells = 0;
    for (int rec = 0; rec < 2000; ++rec) {
      const CVector r = awgn_channel(CVector::Zero(5 * 260), 0, 0.0, n0, rng);
      const LagSeries y = compress(r, chain);
      for (long t = 0; t < 5 * 260; t += 260) {
        alarms += std::abs(y.at(t)) >= eta;
        ++cells;
      }
    }
    const double sigma = std::sqrt(0.05 * 0.95 / cells);
    CHECK(std::abs(alarms / double(cells) - 0.05) < 3.5 * sigma);
  }

  TEST_CASE("noiseless echo is detected at its delay") {
    const SignalSet set = design_orthogonal_set(2, 64, 100, 3).set;
    const ReceiveChain chain(set, ep_barker13());
    const Waveform w = synthesize(set, random_info(13, 2, 9), chain.ep());
    const CVector r = embed(w.samples, 140, 64);
    for (double pfa : {1e-9, 0.5, 0.999}) {
      const DetectionReport d = detect(compress(r, chain), chain.output_noise_variance(1e-3), pfa, 0, 204);
      CHECK(d.declared);
      CHECK(d.peak_index == 140);
    }
  }

  TEST_CASE("direct bank sampling equals sampling the full bank") {
    const SignalSet set = random_set(4, 30, 1);
    const CVector r = test::random_gaussian(13 * 30 + 50, 2);
    const CMatrix a = sample_bank(internal_filter_bank(r, set), 20, 13, 30);
    const CMatrix b = sample_bank(r, set, 20, 13);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(sample_bank(r, set, 100, 13), InvalidInput);
  }

  TEST_CASE("noiseless demodulation recovers the message") {
    const SignalSet set = tone_set(8, 64);
    const EpSequence ep = ep_barker13();
    const InfoSequence info = random_info(13, 8, 5);
    const CVector r = embed(synthesize(set, info, ep).samples, 10, 0);
    CHECK(demodulate_coherent(sample_bank(r, set, 10, 13), ep, 0.0).symbols == info.symbols);
    CHECK(demodulate_noncoherent(sample_bank(r, set, 10, 13)).symbols == info.symbols);
    const auto bank = internal_filter_bank(r, set);
    CHECK(demodulate_coherent(bank, 10, ep, 0.0).symbols == info.symbols);
    CHECK(demodulate_noncoherent(bank, 10, 13, 64).symbols == info.symbols);
  }

  TEST_CASE("coherent decisions are unchanged when the phase is compensated") {
    const SignalSet set = random_set(4, 32, 3);
    const EpSequence ep = ep_barker13();
    const InfoSequence info = random_info(13, 4, 6);
    std::mt19937_64 rng(1);
    const CVector s = synthesize(set, info, ep).samples;
    const CVector noisy = awgn_channel(s, 0, 0.0, 8.0, rng);
    const CMatrix p0 = sample_bank(noisy, set, 0, 13);
    const CMatrix ppi = sample_bank(CVector(noisy * std::polar(1.0, kPi)), set, 0, 13);
    CHECK(demodulate_coherent(p0, ep, 0.0).symbols == demodulate_coherent(ppi, ep, kPi).symbols);
  }

  TEST_CASE("non-coherent decisions ignore a global rotation") {
    const SignalSet set = random_set(4, 32, 3);
    const EpSequence ep = ep_barker13();
    const InfoSequence info = random_info(13, 4, 6);
    std::mt19937_64 rng(2);
    const CVector noisy = awgn_channel(synthesize(set, info, ep).samples, 0, 0.0, 8.0, rng);
    const auto base = demodulate_noncoherent(sample_bank(noisy, set, 0, 13)).symbols;
    for (double th : {0.3, 1.9, 4.4}) {
      const CVector rot = noisy * std::polar(1.0, th);
      CHECK(demodulate_noncoherent(sample_bank(rot, set, 0, 13)).symbols == base);
    }
    for (double th : {0.0, 2.5}) {
      const CVector clean = synthesize(set, info, ep).samples * std::polar(1.0, th);
      CHECK(demodulate_noncoherent(sample_bank(clean, set, 0, 13)).symbols == info.symbols);
    }
  }

  TEST_CASE("demodulator ties go to the lowest index") {
    CMatrix peaks = CMatrix::Ones(4, 1);
    CHECK(demodulate_noncoherent(peaks).symbols == std::vector<int>{0});
    CHECK(demodulate_coherent(peaks, ep_constant(1), 0.0).symbols == std::vector<int>{0});
  }
}
