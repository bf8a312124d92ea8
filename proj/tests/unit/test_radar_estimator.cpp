// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cdjcs/radar_estimator.hpp"
#include "cdjcs/rng.hpp"

using namespace cdjcs;

namespace {

// div(m, i) = exp(-j2π m kd / Nc) exp(j2π i kv / Ms): a target at fractional bins (kd, kv).
CMatrix tone(std::size_t nc, std::size_t ms, double kd, double kv, Complex amp = 1.0) {
    CMatrix d(nc, ms);
    for (std::size_t i = 0; i < ms; ++i) {
        for (std::size_t m = 0; m < nc; ++m) {
            d(m, i) = amp * std::polar(1.0, -2 * kPi * m * kd / nc) * std::polar(1.0, 2 * kPi * i * kv / ms);
        }
    }
    return d;
}

OfdmParams table_params(std::size_t ms) {
    OfdmParams p;
    p.symbols_per_block = ms;
    return p;
}

double image_energy(const RadarImage& im) {
    double e = 0.0;
    for (double v : im.magnitude) e += v * v;
    return e;
}

}  // namespace

TEST(Radar, ReferenceDivideMatchesNaive) {
    Rng rng(1);
    CMatrix a(8, 4), b(8, 4);
    for (auto& v : a.flat()) v = complex_gaussian(rng, 1.0);
    for (auto& v : b.flat()) v = complex_gaussian(rng, 1.0) + 0.1;
    const auto q = reference_divide(a, b);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t m = 0; m < 8; ++m) EXPECT_LT(std::abs(q(m, i) * b(m, i) - a(m, i)), 1e-12);
    const auto ones = reference_divide(b, b);
    for (auto v : ones.flat()) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-15);
}

TEST(Radar, ReferenceDivideZeroCell) {
    CMatrix a(4, 3, 1.0), b(4, 3, 1.0);
    b(2, 1) = 0.0;
    try {
        reference_divide(a, b);
        FAIL();
    } catch (const ZeroReferenceError& e) {
        EXPECT_EQ(e.subcarrier(), 2u);
        EXPECT_EQ(e.symbol(), 1u);
    }
    EXPECT_THROW(reference_divide(CMatrix(4, 3), CMatrix(3, 4)), InputShapeError);
}

TEST(Radar, IntegerTonePeak) {
    const std::size_t nc = 1024, ms = 128;
    const auto im = periodogram(tone(nc, ms, 81, 24));
    const auto p = peak_search(im);
    EXPECT_EQ(p.delay, 81u);
    EXPECT_EQ(p.doppler, 24u);
    EXPECT_NEAR(im(81, 24), std::sqrt(double(nc * ms)), 1e-8);
    EXPECT_NEAR(p.delay_offset, 0.0, 1e-9);
    EXPECT_GT(peak_to_floor_db(im, 81, 24), 150.0);
}

TEST(Radar, AllOnesPeaksAtOrigin) {
    const auto p = peak_search(periodogram(CMatrix(64, 16, 1.0)));
    EXPECT_EQ(p.delay, 0u);
    EXPECT_EQ(p.doppler, 0u);
}

TEST(Radar, Parseval) {
    Rng rng(2);
    CMatrix d(128, 32);
    for (auto& v : d.flat()) v = complex_gaussian(rng, 1.0);
    const auto im = periodogram(d);
    EXPECT_NEAR(image_energy(im), energy(d.flat()), 1e-9 * energy(d.flat()));
}

TEST(Radar, ArgmaxInvariantToScaling) {
    Rng rng(3);
    auto d = tone(64, 32, 10.3, 5.6);
    for (auto& v : d.flat()) v += complex_gaussian(rng, 0.5);
    const auto p1 = peak_search(periodogram(d));
    for (auto& v : d.flat()) v *= Complex(1e-7, 3e-7);
    const auto p2 = peak_search(periodogram(d));
    EXPECT_EQ(p1.argmax_delay, p2.argmax_delay);
    EXPECT_EQ(p1.argmax_doppler, p2.argmax_doppler);
    EXPECT_EQ(p1.delay, p2.delay);
}

TEST(Radar, TieGoesToSmallerIndex) {
    RadarImage im{4, 4, std::vector<double>(16, 0.0)};
    im.magnitude[2 * 4 + 3] = 5.0;  // (3, 2)
    im.magnitude[3 * 4 + 1] = 5.0;  // (1, 3)
    im.magnitude[0 * 4 + 1] = 5.0;  // (1, 0)
    const auto p = peak_search(im, PeakRounding::nearest);
    EXPECT_EQ(p.argmax_delay, 1u);
    EXPECT_EQ(p.argmax_doppler, 0u);
}

TEST(Radar, WhiteNoiseMaximumBound) {
    Rng rng(4);
    const std::size_t nc = 64, ms = 32;
    for (int rep = 0; rep < 50; ++rep) {
        CMatrix d(nc, ms);
        for (auto& v : d.flat()) v = complex_gaussian(rng, 1.0);
        const auto im = periodogram(d);
        double mx = 0.0;
        for (double v : im.magnitude) mx = std::max(mx, v * v);
        // |X|² ~ Exp(1) per cell: P(max > ln N + 10) < e^-10.
        EXPECT_LT(mx, std::log(double(nc * ms)) + 10.0);
    }
}

TEST(Radar, FractionalDelayRefinement) {
    const std::size_t nc = 256, ms = 16;
    for (double frac : {0.2, 0.45, 0.55, 0.92}) {
        const auto im = periodogram(tone(nc, ms, 40 + frac, 3));
        const auto floor_peak = peak_search(im, PeakRounding::floor);
        const auto near_peak = peak_search(im, PeakRounding::nearest);
        EXPECT_EQ(floor_peak.delay, 40u) << frac;
        EXPECT_EQ(near_peak.delay, frac < 0.5 ? 40u : 41u) << frac;
        const double refined = near_peak.argmax_delay + near_peak.delay_offset;
        EXPECT_NEAR(refined, 40 + frac, 0.02) << frac;
    }
}

TEST(Radar, TableScenarioNoiseFree) {
    // τ_R B = 0.6667 µs × 122.88 MHz = 81.92; f_d,R Ts Ms = 2400 × 1200/122.88e6 × 1024 = 24.
    const auto p = table_params(1024);
    const double kd = 2 * 100.0 / 3e8 * p.bandwidth_hz();
    const double kv = 2400.0 * p.frame_time_s() * 1024;
    EXPECT_NEAR(kd, 81.92, 1e-9);
    EXPECT_NEAR(kv, 24.0, 1e-9);
    RadarImage im;
    const auto e = estimate(tone(1024, 1024, kd, kv), CMatrix(1024, 1024, 1.0), p, 24e9, 3e8,
                            PeakRounding::floor, &im);
    EXPECT_EQ(e.delay_bin, 81u);
    EXPECT_EQ(e.doppler_bin, 24u);
    EXPECT_NEAR(e.range_m, 98.88, 0.01);
    EXPECT_NEAR(e.velocity_mps, 15.0, 1e-9);
    EXPECT_NEAR(e.velocity_mps, 14.99, 0.011);
    EXPECT_LE(std::abs(e.range_m - 100.0), 3e8 / (2 * p.bandwidth_hz()));
    EXPECT_EQ(im.delay_bins, 1024u);
}

TEST(Radar, ToPhysicalExamples) {
    const auto p = table_params(1024);
    const auto e = to_physical(81, 24, p, 24e9, 3e8);
    EXPECT_NEAR(e.range_m, 81 * 3e8 / (2 * 122.88e6), 1e-9);
    EXPECT_NEAR(e.range_m, 98.88, 0.01);
    EXPECT_NEAR(e.tau_s, 81 / 122.88e6, 1e-18);
    const auto still = to_physical(81, 0, p, 24e9, 3e8);
    EXPECT_EQ(still.velocity_mps, 0.0);
    const auto back = to_physical(0, 1023, p, 24e9, 3e8);
    EXPECT_LT(back.velocity_mps, 0.0);
    EXPECT_NEAR(back.velocity_mps, -e.velocity_mps / 24.0, 1e-12);
}

TEST(Radar, ZeroVelocityGivesDopplerZero) {
    const auto im = periodogram(tone(256, 64, 12, 0));
    EXPECT_EQ(peak_search(im).doppler, 0u);
}

TEST(Radar, InjectedErrorRaisesFloor) {
    Rng rng(5);
    const auto clean = tone(128, 64, 30, 7);
    CMatrix err(128, 64);
    for (auto& v : err.flat()) v = complex_gaussian(rng, 1.0);
    // The error's own image carries exactly its energy.
    EXPECT_NEAR(image_energy(periodogram(err)), energy(err.flat()), 1e-9 * energy(err.flat()));
    double last = std::numeric_limits<double>::infinity();
    for (double scale : {0.01, 0.1, 1.0, 3.0}) {
        CMatrix d = clean;
        for (std::size_t k = 0; k < d.size(); ++k) d.flat()[k] += scale * err.flat()[k];
        const auto im = periodogram(d);
        const auto p = peak_search(im);
        const double ptf = peak_to_floor_db(im, p.argmax_delay, p.argmax_doppler);
        EXPECT_LT(ptf, last);
        last = ptf;
    }
}

TEST(Radar, ImageCsv) {
    RadarImage im{2, 3, std::vector<double>(6, 1.5)};
    const auto path = std::filesystem::temp_directory_path() / "cdjcs_image_test.csv";
    write_image_csv(path, im);
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "delay_bin,doppler_bin,magnitude");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 6);
    std::filesystem::remove(path);
}
