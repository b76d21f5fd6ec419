#include <doctest.h>

#include <vector>

#include "iqmr/radio.hpp"
#include "testutil.hpp"

using namespace iqmr;

TEST_CASE("nakagami shape from the Rician K-factor") {
  CHECK(nakagami_m_from_k(0.0) == doctest::Approx(2.0));
  CHECK(nakagami_m_from_k(1.0) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("path_loss: unit distance, 3-4-5 triangle, frozen zeta=3 value") {
  CHECK(path_loss(0.0, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(path_loss(3.0, 4.0, 2.0) == doctest::Approx(0.04));
  CHECK(testutil::rel_close(path_loss(3.0, 4.0, 3.0),
                            testutil::expected("path_loss_r3_h4_zeta3")));
}

TEST_CASE("path_loss: degenerate co-located geometry is rejected") {
  CHECK_THROWS_AS(path_loss(0.0, 0.0, 2.7), std::invalid_argument);
}

TEST_CASE("path_loss: strictly decreasing in r and h") {
  auto rng = testutil::prop_rng(10);
  for (int i = 0; i < 200; ++i) {
    const double r = rng.uniform(0.1, 500.0);
    const double h = rng.uniform(0.1, 300.0);
    const double zeta = rng.uniform(1.5, 4.0);
    const double dr = rng.uniform(0.1, 50.0);
    CHECK(path_loss(r + dr, h, zeta) < path_loss(r, h, zeta));
    CHECK(path_loss(r, h + dr, zeta) < path_loss(r, h, zeta));
  }
}

TEST_CASE("fading gains: unit mean and 1/m variance (sampling oracle)") {
  auto rng = testutil::prop_rng(11);
  const int n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_fading_gain(2.0, rng);
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 0.01);
  CHECK(std::abs(var - testutil::expected("fading_variance_m2")) < 0.01);
  // mean within 3 sigma of 1
  CHECK(std::abs(mean - 1.0) < 3.0 * std::sqrt(0.5 / n));
}

TEST_CASE("fading gains: large m concentrates at 1 (no fading)") {
  auto rng = testutil::prop_rng(12);
  const int n = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_fading_gain(400.0, rng);
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 1.0) < 0.01);
  CHECK(sumsq / n - mean * mean < 0.005);
}

TEST_CASE("compute_sir: symmetric transmitters give 0 dB") {
  const TransmitterView desired{30.0, 40.0};
  const std::vector<TransmitterView> interferers{{30.0, 40.0}};
  const std::vector<double> gains{1.0};
  CHECK(compute_sir(1.0, desired, gains, interferers, 2.0, 1e-9) ==
        doctest::Approx(1.0));
}

TEST_CASE("compute_sir: loss ratio by construction") {
  // zeta=2: loss 0.04 at (3,4); loss 0.01 at (6,8)
  const TransmitterView desired{3.0, 4.0};
  const std::vector<TransmitterView> interferers{{6.0, 8.0}};
  const std::vector<double> gains{1.0};
  CHECK(compute_sir(1.0, desired, gains, interferers, 2.0, 1e-9) ==
        doctest::Approx(4.0));
}

TEST_CASE("compute_sir: frozen three-interferer sum") {
  // losses {0.01, 0.02, 0.01} vs desired 0.04, zeta=2
  const TransmitterView desired{3.0, 4.0};
  const std::vector<TransmitterView> interferers{
      {6.0, 8.0}, {5.0, 5.0}, {8.0, 6.0}};
  const std::vector<double> gains{1.0, 1.0, 1.0};
  CHECK(testutil::rel_close(compute_sir(1.0, desired, gains, interferers, 2.0, 1e-9),
                            testutil::expected("sir_three_interferers")));
}

TEST_CASE("compute_sir: scale invariance in the gains") {
  auto rng = testutil::prop_rng(13);
  for (int i = 0; i < 120; ++i) {
    const TransmitterView desired{rng.uniform(1, 100), rng.uniform(50, 300)};
    std::vector<TransmitterView> interferers;
    std::vector<double> gains, scaled;
    const double c = rng.uniform(0.01, 100.0);
    const int k = 1 + static_cast<int>(rng.below(5));
    for (int j = 0; j < k; ++j) {
      interferers.push_back({rng.uniform(1, 400), rng.uniform(50, 300)});
      gains.push_back(rng.uniform(0.01, 5.0));
      scaled.push_back(gains.back() * c);
    }
    const double g0 = rng.uniform(0.01, 5.0);
    const double a = compute_sir(g0, desired, gains, interferers, 2.7, 1e-9);
    const double b = compute_sir(g0 * c, desired, scaled, interferers, 2.7, 1e-9);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("compute_sir: empty interferer set falls back to the noise floor") {
  const TransmitterView desired{3.0, 4.0};
  const double sir = compute_sir(1.0, desired, {}, {}, 2.0, 0.004);
  CHECK(sir == doctest::Approx(10.0));
}

TEST_CASE("coverage_probability: threshold limits") {
  ChannelParams p;
  p.zeta = 2.7;
  p.nakagami_m = 4.0 / 3.0;
  p.coverage_samples = 400;
  const TransmitterView desired{50.0, 120.0};
  const std::vector<TransmitterView> interferers{{120.0, 150.0}, {300.0, 100.0}};

  p.sir_threshold = 1e-12;
  CHECK(coverage_probability(desired, interferers, p, testutil::prop_rng(14)) ==
        doctest::Approx(1.0));
  p.sir_threshold = 1e12;
  CHECK(coverage_probability(desired, interferers, p, testutil::prop_rng(14)) ==
        doctest::Approx(0.0));
}

TEST_CASE("coverage_probability: symmetric single interferer at m=1 is 1/2") {
  // ratio of two iid exponentials exceeds 1 with probability 1/2
  ChannelParams p;
  p.zeta = 2.7;
  p.nakagami_m = 1.0;
  p.sir_threshold = 1.0;
  p.coverage_samples = 10000;
  const TransmitterView desired{80.0, 100.0};
  const std::vector<TransmitterView> interferers{{80.0, 100.0}};
  const double cov = coverage_probability(desired, interferers, p, testutil::prop_rng(15));
  CHECK(std::abs(cov - 0.5) <= 0.02);
}

TEST_CASE("coverage_probability: non-increasing in the threshold for a fixed substream") {
  auto geo = testutil::prop_rng(16);
  for (int i = 0; i < 40; ++i) {
    ChannelParams p;
    p.zeta = 2.7;
    p.nakagami_m = 4.0 / 3.0;
    p.coverage_samples = 200;
    const TransmitterView desired{geo.uniform(5, 200), geo.uniform(50, 300)};
    std::vector<TransmitterView> interferers;
    const int k = 1 + static_cast<int>(geo.below(4));
    for (int j = 0; j < k; ++j)
      interferers.push_back({geo.uniform(5, 500), geo.uniform(50, 300)});
    const auto substream_id = geo();
    double prev = 1.0;
    for (double th_db = -10.0; th_db <= 10.0; th_db += 2.5) {
      p.sir_threshold = db_to_linear(th_db);
      const double cov = coverage_probability(desired, interferers, p,
                                              SplitMix64(substream_id));
      CHECK(cov <= prev + 1e-12);
      prev = cov;
    }
  }
}
