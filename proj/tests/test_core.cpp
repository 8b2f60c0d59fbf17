#include "jrc/core.hpp"
#include "jrc/correlate.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <set>

using namespace jrc;

TEST_SUITE("core") {
  TEST_CASE("zero-lag autocorrelation equals the energy") {
    const CVector s = test::random_unimodular(200, 3);
    const CVector r = cross_correlation(s, s);
    CHECK(r.size() == 399);
    CHECK(std::abs(r(199) - cd(200.0, 0.0)) < 1e-9);
  }

  TEST_CASE("Barker-13 autocorrelation has unit sidelobes") {
    const int b[13] = {1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1};
    CVector s(13);
    for (int i = 0; i < 13; ++i) s(i) = b[i];
    const CVector r = cross_correlation(s, s);
    CHECK(std::abs(r(12)) == doctest::Approx(13.0));
    double side = 0.0;
    for (int i = 0; i < r.size(); ++i)
      if (i != 12) side = std::max(side, std::abs(r(i)));
    CHECK(side == doctest::Approx(1.0));
    CHECK(amplitude_db(side / 13.0) == doctest::Approx(-22.2789).epsilon(1e-4));
  }

  TEST_CASE("R_ab(tau) = conj(R_ba(-tau)) for random sequences") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const CVector a = test::random_unimodular(37, seed);
      const CVector b = test::random_unimodular(37, seed + 100);
      const CVector ab = cross_correlation(a, b);
      const CVector ba = cross_correlation(b, a);
      for (long t = -36; t <= 36; ++t) CHECK(std::abs(ab(t + 36) - std::conj(ba(-t + 36))) < 1e-12);
    }
  }

  TEST_CASE("direct correlation matches the definition") {
    const CVector a = test::random_gaussian(17, 1);
    const CVector b = test::random_gaussian(17, 2);
    const CVector r = cross_correlation(a, b);
    for (long t = -16; t <= 16; ++t) CHECK(std::abs(r(t + 16) - test::brute_correlation(a, b, t)) < 1e-12);
  }

  TEST_CASE("FFT correlation matches brute force for unequal lengths") {
    const CVector x = test::random_gaussian(131, 5);
    const CVector y = test::random_gaussian(29, 6);
    const LagSeries r = correlate(x, y);
    CHECK(r.first_lag == -28);
    CHECK(r.last_lag() == 130);
    for (long t = r.first_lag; t <= r.last_lag(); ++t)
      CHECK(std::abs(r.at(t) - test::brute_correlation(x, y, t)) < 1e-9);
    CHECK(r.at(500) == cd{});
    for (long t : {-28L, -3L, 0L, 77L, 130L}) CHECK(std::abs(correlate_at(x, y, t) - r.at(t)) < 1e-9);
    CHECK(correlate_at(x, y, 131) == cd{});
  }

  TEST_CASE("delayed copy peaks at its delay") {
    const CVector s = test::random_unimodular(50, 9);
    CVector r = CVector::Zero(120);
    r.segment(33, 50) = s;
    const LagSeries out = correlate(r, s);
    Eigen::Index arg = 0;
    out.values.cwiseAbs().maxCoeff(&arg);
    CHECK(out.first_lag + arg == 33);
  }

  TEST_CASE("power-of-two helpers") {
    CHECK(is_power_of_two(1));
    CHECK(is_power_of_two(64));
    CHECK_FALSE(is_power_of_two(3));
    CHECK_FALSE(is_power_of_two(0));
    CHECK(log2_exact(8) == 3);
  }

  TEST_CASE("derived seeds are distinct across points and trials") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t p = 0; p < 20; ++p)
      for (std::uint64_t t = 0; t < 500; ++t) seen.insert(derive_seed(1, p, t));
    CHECK(seen.size() == 10000);
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
  }

  TEST_CASE("dB helpers") {
    CHECK(to_db(10.0) == doctest::Approx(10.0));
    CHECK(amplitude_db(0.1) == doctest::Approx(-20.0));
    CHECK(from_db(to_db(3.7)) == doctest::Approx(3.7));
    CHECK(wrap_phase(-0.5) == doctest::Approx(kTwoPi - 0.5));
  }
}
