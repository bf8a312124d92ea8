// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cdjcs/ofdm.hpp"
#include "cdjcs/rng.hpp"

using namespace cdjcs;

namespace {

CVector random_vector(Rng& rng, std::size_t n) {
    CVector v(n);
    for (auto& x : v) x = complex_gaussian(rng, 1.0);
    return v;
}

double max_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

OfdmParams small_params(std::size_t nc, std::size_t cp) {
    OfdmParams p;
    p.subcarriers = nc;
    p.subcarrier_spacing_hz = 1.0;
    p.cp_time_s = static_cast<double>(cp) / static_cast<double>(nc);
    p.symbols_per_block = 1;
    return p;
}

}  // namespace

TEST(Ofdm, DftMatrixIsUnitary) {
    for (std::size_t n : {1u, 2u, 8u, 64u}) {
        const auto f = dft_matrix(n);
        double worst = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                Complex g = 0.0;
                for (std::size_t r = 0; r < n; ++r) g += std::conj(f(r, a)) * f(r, b);
                worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
            }
        }
        EXPECT_LT(worst, 1e-12) << "n=" << n;
    }
    const auto f2 = dft_matrix(2);
    EXPECT_NEAR(std::abs(f2(1, 1) + 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(Ofdm, FftMatchesMatrix) {
    Rng rng(1);
    const std::size_t n = 32;
    const auto f = dft_matrix(n);
    auto v = random_vector(rng, n);
    auto t = v;
    fft_unitary(t);
    for (std::size_t r = 0; r < n; ++r) {
        Complex ref = 0.0;
        for (std::size_t c = 0; c < n; ++c) ref += f(r, c) * v[c];
        EXPECT_LT(std::abs(t[r] - ref), 1e-12);
    }
    ifft_unitary(t);
    EXPECT_LT(max_diff(t, v), 1e-12);
}

TEST(Ofdm, TableNumerology) {
    OfdmParams p;
    EXPECT_DOUBLE_EQ(p.bandwidth_hz(), 122.88e6);
    EXPECT_NEAR(p.useful_time_s(), 8.333333e-6, 1e-11);
    EXPECT_EQ(p.cp_samples(), 176u);
    EXPECT_NEAR(p.frame_time_s(), 1200.0 / 122.88e6, 1e-18);
    EXPECT_NEAR(p.effective_cp_time_s(), 1.4323e-6, 1e-9);
}

TEST(Ofdm, ImpulseAndConstant) {
    const auto p = small_params(16, 4);
    CVector x(16);
    x[0] = 1.0;
    const auto s = modulate(x, p);
    ASSERT_EQ(s.size(), 20u);
    for (auto v : s) EXPECT_NEAR(std::abs(v - 0.25), 0.0, 1e-15);

    CVector flat(20, Complex{1.0, 0.0});
    const auto y = demodulate(flat, p);
    EXPECT_NEAR(std::abs(y[0] - 4.0), 0.0, 1e-14);
    for (std::size_t m = 1; m < 16; ++m) EXPECT_NEAR(std::abs(y[m]), 0.0, 1e-14);
}

TEST(Ofdm, CyclicPrefixCopiesTail) {
    Rng rng(2);
    const auto p = small_params(64, 16);
    const auto x = random_vector(rng, 64);
    const auto s = modulate(x, p);
    ASSERT_EQ(s.size(), 80u);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(s[k], s[64 + k]);
}

TEST(Ofdm, RoundTripAndParseval) {
    Rng rng(3);
    OfdmParams p;
    const auto x = random_vector(rng, p.subcarriers);
    const auto s = modulate(x, p);
    const auto body = std::span(s).subspan(p.cp_samples());
    EXPECT_NEAR(energy(body), energy(x), 1e-9 * energy(x));
    EXPECT_LT(max_diff(demodulate(s, p), x), 1e-9);
}

TEST(Ofdm, CircularConvolutionThroughPrefix) {
    Rng rng(4);
    const std::size_t nc = 16, cp = 4;
    const auto p = small_params(nc, cp);
    const auto x = random_vector(rng, nc);
    const CVector taps = {Complex{0.9, 0.1}, Complex{-0.3, 0.2}, Complex{0.05, -0.1}};
    const auto s = modulate(x, p);
    CVector r(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        for (std::size_t t = 0; t < taps.size() && t <= n; ++t) r[n] += taps[t] * s[n - t];
    }
    const auto y = demodulate(r, p);
    for (std::size_t m = 0; m < nc; ++m) {
        Complex h = 0.0;
        for (std::size_t t = 0; t < taps.size(); ++t) {
            h += taps[t] * std::polar(1.0, -2.0 * kPi * static_cast<double>(m * t) / nc);
        }
        EXPECT_LT(std::abs(y[m] - h * x[m]), 1e-12) << "m=" << m;
    }
}

TEST(Ofdm, Errors) {
    OfdmParams p;
    CVector wrong(p.subcarriers - 1);
    EXPECT_THROW(modulate(wrong, p), InputShapeError);
    EXPECT_THROW(demodulate(wrong, p), InputShapeError);
    p.subcarriers = 0;
    EXPECT_THROW(p.validate(), DomainError);
    OfdmParams q;
    q.subcarrier_spacing_hz = -1.0;
    EXPECT_THROW(q.validate(), DomainError);
    OfdmParams r;
    r.cp_time_s = -1e-6;
    EXPECT_THROW(r.validate(), DomainError);
}

TEST(Ofdm, WaveformFileRoundTrip) {
    Rng rng(5);
    OfdmParams p;
    p.subcarriers = 64;
    p.symbols_per_block = 3;
    p.cp_time_s = 16.0 / p.bandwidth_hz();
    auto block = make_frame_block(p);
    for (auto& v : block.flat()) v = complex_gaussian(rng, 1.0);
    const auto path = std::filesystem::temp_directory_path() / "cdjcs_waveform_test.bin";
    write_waveform(path, block, p);
    const auto w = read_waveform(path);
    std::filesystem::remove(path);
    EXPECT_EQ(w.subcarriers, 64u);
    EXPECT_EQ(w.cp_samples, 16u);
    EXPECT_EQ(w.symbols, 3u);
    EXPECT_DOUBLE_EQ(w.sample_rate_hz, p.bandwidth_hz());
    ASSERT_EQ(w.samples.size(), 3u * 80u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto frame = std::span(w.samples).subspan(i * 80, 80);
        EXPECT_LT(max_diff(demodulate(frame, p), block.col(i)), 1e-12);
    }
}

TEST(Ofdm, RejectsForeignFile) {
    const auto path = std::filesystem::temp_directory_path() / "cdjcs_not_waveform.bin";
    {
        std::ofstream os(path, std::ios::binary);
        os << "nothing to see here";
    }
    EXPECT_THROW(read_waveform(path), InputShapeError);
    std::filesystem::remove(path);
}
