#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fsolink/link.hpp"

using namespace fsolink;

namespace {

LinkConfig cfg_2x2() {
    LinkConfig cfg;
    cfg.conversion_gain = 2.0;
    cfg.n_tx = 2;
    cfg.n_rx = 2;
    cfg.noise_variance = 0.0;
    return cfg;
}

// Row-major [rx][tx] gains: rx0 = {0.5, 1.5}, rx1 = {1.0, 3.0}.
const std::vector<double> kGains = {0.5, 1.5, 1.0, 3.0};

}  // namespace

TEST_CASE("LinkConfig validation") {
    LinkConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.noise_variance = 0.0;  // noiseless is legal
    CHECK_NOTHROW(cfg.validate());

    LinkConfig bad = cfg;
    bad.conversion_gain = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.noise_variance = -1e-9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.noise_variance = std::nan("");
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.n_tx = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.n_rx = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.n_users = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("transmit_noiseless applies (G / N_t) * row_sum per aperture") {
    const auto cfg = cfg_2x2();
    const std::complex<double> x{1.0, -1.0};
    const auto y = transmit_noiseless(x, kGains, cfg);
    REQUIRE(y.size() == 2u);
    // split = 2/2 = 1; rows sum to 2 and 4.
    CHECK(y[0] == std::complex<double>(2.0, -2.0));
    CHECK(y[1] == std::complex<double>(4.0, -4.0));

    const std::vector<double> wrong = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(transmit_noiseless(x, wrong, cfg), std::invalid_argument);
}

TEST_CASE("transmit with zero noise variance equals the noiseless path") {
    const auto cfg = cfg_2x2();
    Rng rng(1);
    const std::complex<double> x{0.3, 0.7};
    const auto y = transmit(x, kGains, cfg, rng);
    const auto y0 = transmit_noiseless(x, kGains, cfg);
    REQUIRE(y.size() == y0.size());
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == y0[i]);
}

TEST_CASE("draw_noise shape and second moment") {
    Rng rng(4);
    auto n = draw_noise(3, 0.5, rng);
    REQUIRE(n.size() == 3u);

    double acc = 0.0;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) acc += std::norm(draw_noise(1, 0.5, rng)[0]);
    CHECK(acc / reps == doctest::Approx(0.5).epsilon(0.02));

    auto z = draw_noise(2, 0.0, rng);
    CHECK(z[0] == std::complex<double>(0.0, 0.0));
    CHECK(z[1] == std::complex<double>(0.0, 0.0));
}

TEST_CASE("superpose_interference adds users onto one shared noise vector") {
    const ReceivedVector a = {{1.0, 0.0}, {0.0, 2.0}};
    const ReceivedVector b = {{-0.5, 0.5}, {1.0, 1.0}};
    const ReceivedVector noise = {{0.25, 0.25}, {0.0, -1.0}};
    const std::vector<ReceivedVector> users = {a, b};
    const auto y = superpose_interference(users, noise);
    REQUIRE(y.size() == 2u);
    CHECK(y[0] == std::complex<double>(0.75, 0.75));
    CHECK(y[1] == std::complex<double>(1.0, 2.0));

    const std::vector<ReceivedVector> mismatched = {a, ReceivedVector{{1.0, 0.0}}};
    CHECK_THROWS_AS(superpose_interference(mismatched, noise), std::invalid_argument);
    CHECK_THROWS_AS(superpose_interference({}, noise), std::invalid_argument);
}

TEST_CASE("egc_combine sums apertures") {
    const ReceivedVector y = {{1.0, 2.0}, {3.0, -4.0}, {-0.5, 0.5}};
    CHECK(egc_combine(y) == std::complex<double>(3.5, -1.5));
    CHECK_THROWS_AS(egc_combine(ReceivedVector{}), std::invalid_argument);
}

TEST_CASE("sc_select picks the largest squared row sum, ties to lowest") {
    const ReceivedVector y = {{1.0, 0.0}, {2.0, 0.0}};
    const auto sel = sc_select(y, kGains, 2);
    CHECK(sel.aperture == 1);  // rows 2.0 vs 4.0
    CHECK(sel.sample == y[1]);

    const std::vector<double> tied = {1.0, 1.0, 0.5, 1.5};
    const auto sel2 = sc_select(y, tied, 2);
    CHECK(sel2.aperture == 0);
    CHECK(sel2.sample == y[0]);

    CHECK_THROWS_AS(sc_select(ReceivedVector{}, kGains, 2), std::invalid_argument);
    const std::vector<double> wrong = {1.0, 2.0};
    CHECK_THROWS_AS(sc_select(y, wrong, 2), std::invalid_argument);
}

TEST_CASE("effective gains") {
    const auto cfg = cfg_2x2();
    CHECK(egc_effective_gain(kGains, cfg) == doctest::Approx(6.0));  // 1 * (2+4)
    const std::vector<double> row = {1.0, 3.0};
    CHECK(sc_effective_gain(row, cfg) == doctest::Approx(4.0));

    LinkConfig siso;
    siso.conversion_gain = 0.7;
    const std::vector<double> one = {2.0};
    CHECK(egc_effective_gain(one, siso) == doctest::Approx(1.4));
    CHECK(sc_effective_gain(one, siso) == doctest::Approx(1.4));
}

TEST_CASE("ml_detect minimizes |y - g x_m|^2 with ties to lowest index") {
    const auto c = qam_constellation(4);
    const double g = 2.5;
    for (int m = 0; m < 4; ++m) {
        const auto y = g * c.points[m] + std::complex<double>(0.1, -0.05);
        CHECK(ml_detect(y, g, c) == m);
    }
    CHECK(ml_detect({0.0, 0.0}, g, c) == 0);   // four-way tie
    CHECK(ml_detect({1.0, 1.0}, 0.0, c) == 0);  // zero gain collapses all points
    CHECK_THROWS_AS(ml_detect({0.0, 0.0}, 1.0, Constellation{}),
                    std::invalid_argument);

    // Brute-force cross-check on a 16-point constellation with scattered rng.
    const auto c16 = qam_constellation(16);
    Rng rng(123);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::complex<double> y{4.0 * (rng.uniform() - 0.5),
                                     4.0 * (rng.uniform() - 0.5)};
        const double gain = 0.2 + 2.0 * rng.uniform();
        int best = 0;
        double best_d = std::norm(y - gain * c16.points[0]);
        for (int m = 1; m < 16; ++m) {
            const double d = std::norm(y - gain * c16.points[m]);
            if (d < best_d) {
                best_d = d;
                best = m;
            }
        }
        CHECK(ml_detect(y, gain, c16) == best);
    }
}

TEST_CASE("combiner-specific detectors agree with ml_detect") {
    const auto cfg = cfg_2x2();
    const auto c = qam_constellation(16);
    const std::complex<double> y{1.3, -2.2};
    CHECK(ml_detect_egc(y, kGains, cfg, c) ==
          ml_detect(y, egc_effective_gain(kGains, cfg), c));
    const std::vector<double> row = {1.0, 3.0};
    CHECK(ml_detect_sc(y, row, cfg, c) ==
          ml_detect(y, sc_effective_gain(row, cfg), c));
}

TEST_CASE("blind_gain_estimate hand value, clamp, and cfg overload") {
    const std::vector<std::complex<double>> block = {{3.0, 4.0}, {0.0, 0.0}};
    // mean |y|^2 = 12.5; sqrt(12.5 - 2.5) = sqrt(10)
    CHECK(blind_gain_estimate(block, 2.5) ==
          doctest::Approx(3.1622776601683795).epsilon(1e-15));
    CHECK(blind_gain_estimate(block, 12.5) == 0.0);
    CHECK(blind_gain_estimate(block, 100.0) == 0.0);  // clamped, not NaN

    LinkConfig cfg;
    cfg.noise_variance = 2.5;
    CHECK(blind_gain_estimate(block, cfg) ==
          doctest::Approx(3.1622776601683795).epsilon(1e-15));

    const std::vector<std::complex<double>> one = {{1.0, 0.0}};
    CHECK_THROWS_AS(blind_gain_estimate(one, 0.1), std::invalid_argument);

    // Consistency: over a long block the estimate recovers the true gain.
    Rng rng(55);
    const double g = 1.7, nv = 0.2;
    const auto c = qam_constellation(16);
    std::vector<std::complex<double>> big(20000);
    for (auto& v : big)
        v = g * c.points[rng.below(16)] + rng.complex_normal(nv);
    CHECK(blind_gain_estimate(big, nv) == doctest::Approx(g).epsilon(0.02));
}

TEST_CASE("allocate_best_user depends on the combiner") {
    // user 0 rows: {3, 0}; user 1 rows: {2, 2}.
    ChannelMatrix m(2, 2, 1);
    m.at(0, 0, 0) = 3.0;
    m.at(0, 1, 0) = 0.0;
    m.at(1, 0, 0) = 2.0;
    m.at(1, 1, 0) = 2.0;
    LinkConfig cfg;
    cfg.n_rx = 2;
    CHECK(allocate_best_user(m, Combiner::egc, cfg) == 1);  // totals 3 vs 4
    CHECK(allocate_best_user(m, Combiner::sc, cfg) == 0);   // best rows 3 vs 2

    // Exact tie goes to the lowest index.
    ChannelMatrix t(2, 1, 1);
    t.at(0, 0, 0) = 2.0;
    t.at(1, 0, 0) = 2.0;
    LinkConfig siso;
    CHECK(allocate_best_user(t, Combiner::egc, siso) == 0);
    CHECK(allocate_best_user(t, Combiner::sc, siso) == 0);
}
