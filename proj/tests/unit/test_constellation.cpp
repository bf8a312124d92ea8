// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "cdjcs/constellation.hpp"
#include "cdjcs/rng.hpp"

using namespace cdjcs;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Bits bits_of(std::uint32_t label, unsigned n) {
    Bits b(n);
    for (unsigned i = 0; i < n; ++i) b[i] = (label >> (n - 1 - i)) & 1U;
    return b;
}

}  // namespace

TEST(Constellation, QpskGrayOrderAroundTheSquare) {
    QamConstellation qam(4);
    const Bits bits = {0, 0, 0, 1, 1, 1, 1, 0};
    const auto pts = qam.map_bits(bits);
    ASSERT_EQ(pts.size(), 4u);
    const Complex expected[] = {{-kInvSqrt2, -kInvSqrt2},
                                {-kInvSqrt2, kInvSqrt2},
                                {kInvSqrt2, kInvSqrt2},
                                {kInvSqrt2, -kInvSqrt2}};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(pts[k].real(), expected[k].real(), 1e-15);
        EXPECT_NEAR(pts[k].imag(), expected[k].imag(), 1e-15);
        EXPECT_NEAR(std::abs(pts[k]), 1.0, 1e-15);
    }
    // Neighbours around the square differ in exactly one coordinate sign.
    for (std::size_t k = 0; k < 4; ++k) {
        const auto a = pts[k];
        const auto b = pts[(k + 1) % 4];
        const int diff = (a.real() != b.real()) + (a.imag() != b.imag());
        EXPECT_EQ(diff, 1);
    }
}

TEST(Constellation, AllZeroBitsRepeatOnePoint) {
    QamConstellation qam(4);
    Bits bits(2000, 0);
    const auto pts = qam.map_bits(bits);
    double power = 0.0;
    for (auto p : pts) {
        EXPECT_EQ(p, pts[0]);
        power += std::norm(p);
    }
    EXPECT_NEAR(power / static_cast<double>(pts.size()), 1.0, 1e-12);
}

TEST(Constellation, UnitMeanPowerForAllOrders) {
    for (unsigned m : {4u, 16u, 64u}) {
        QamConstellation qam(m);
        double power = 0.0;
        for (auto p : qam.points()) power += std::norm(p);
        EXPECT_NEAR(power / m, 1.0, 1e-12) << "M=" << m;
        double axis = 0.0;
        for (double l : qam.pam_levels()) axis += l * l;
        EXPECT_NEAR(axis / static_cast<double>(qam.levels_per_axis()), 0.5, 1e-12);
    }
}

TEST(Constellation, SixteenQamSpacing) {
    QamConstellation qam(16);
    // Levels ±a/2, ±3a/2 with a = 2/sqrt(10).
    const double a = 2.0 / std::sqrt(10.0);
    EXPECT_NEAR(qam.spacing(), a, 1e-15);
    const auto& lv = qam.pam_levels();
    ASSERT_EQ(lv.size(), 4u);
    EXPECT_NEAR(lv[0], -1.5 * a, 1e-15);
    EXPECT_NEAR(lv[3], 1.5 * a, 1e-15);
}

TEST(Constellation, AdjacentLevelsDifferInOneBit) {
    for (unsigned m : {4u, 16u, 64u}) {
        QamConstellation qam(m);
        const std::size_t L = qam.levels_per_axis();
        for (std::size_t q = 0; q < L; ++q) {
            for (std::size_t i = 0; i + 1 < L; ++i) {
                const auto a = qam.label_of_levels(i, q);
                const auto b = qam.label_of_levels(i + 1, q);
                EXPECT_EQ(std::popcount(a ^ b), 1) << "M=" << m;
                const auto c = qam.label_of_levels(q, i);
                const auto d = qam.label_of_levels(q, i + 1);
                EXPECT_EQ(std::popcount(c ^ d), 1) << "M=" << m;
            }
        }
    }
}

TEST(Constellation, RoundTripEveryLabel) {
    for (unsigned m : {4u, 16u, 64u}) {
        QamConstellation qam(m);
        const unsigned n = qam.bits_per_symbol();
        for (std::uint32_t label = 0; label < m; ++label) {
            const auto bits = bits_of(label, n);
            const auto pts = qam.map_bits(bits);
            ASSERT_EQ(pts.size(), 1u);
            const auto d = qam.hard_decide(pts[0]);
            EXPECT_EQ(d.label, label);
            EXPECT_EQ(d.point, pts[0]);
            Bits back(n);
            qam.label_bits(d.label, back);
            EXPECT_EQ(back, bits);
        }
    }
}

TEST(Constellation, RandomRoundTrip) {
    QamConstellation qam(64);
    Rng rng(7);
    Bits bits(6 * 5000);
    random_bits(rng, bits);
    const auto pts = qam.map_bits(bits);
    Bits back(bits.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        qam.label_bits(qam.hard_decide(pts[k]).label, std::span(back).subspan(6 * k, 6));
    }
    EXPECT_EQ(back, bits);
}

TEST(Constellation, HardDecideExamples) {
    QamConstellation qam(4);
    const auto d = qam.hard_decide({0.1, 0.9});
    EXPECT_NEAR(d.point.real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(d.point.imag(), kInvSqrt2, 1e-15);
    // Saturation far outside the grid.
    const auto far = qam.hard_decide({-1e6, 1e6});
    EXPECT_NEAR(far.point.real(), -kInvSqrt2, 1e-15);
    EXPECT_NEAR(far.point.imag(), kInvSqrt2, 1e-15);
    // Exact boundary goes to the lower level.
    const auto tie = qam.hard_decide({0.0, 0.0});
    EXPECT_LT(tie.point.real(), 0.0);
    EXPECT_LT(tie.point.imag(), 0.0);

    QamConstellation q16(16);
    const double a = q16.spacing();
    EXPECT_EQ(q16.decide_level(0.0), 1u);
    EXPECT_EQ(q16.decide_level(a), 2u);      // boundary between levels 2 and 3
    EXPECT_EQ(q16.decide_level(a * 1.0001), 3u);
    EXPECT_EQ(q16.decide_level(-5.0), 0u);
}

TEST(Constellation, Errors) {
    EXPECT_THROW(QamConstellation(8), DomainError);
    QamConstellation qam(16);
    Bits bad(5, 0);
    EXPECT_THROW(qam.map_bits(bad), InputShapeError);
    EXPECT_THROW(qam.hard_decide({std::numeric_limits<double>::quiet_NaN(), 0.0}), DomainError);
    EXPECT_THROW(qam.hard_decide({0.0, std::numeric_limits<double>::infinity()}), DomainError);
    EXPECT_THROW(decide_prob(0, 0, 0.0, qam), DomainError);
    EXPECT_THROW(decide_prob(0, 0, -1.0, qam), DomainError);
    EXPECT_THROW(decide_prob(4, 0, 0.1, qam), DomainError);
}

TEST(Constellation, QFunctionValues) {
    EXPECT_NEAR(q_function(0.0), 0.5, 1e-15);
    EXPECT_NEAR(q_function(std::sqrt(2.0)), 0.07864960352514251, 1e-15);
    EXPECT_NEAR(q_function(3.0), 0.0013498980316300946, 1e-17);
}

TEST(Constellation, DecideProbQpsk) {
    QamConstellation qam(4);
    // a = sqrt(2); correct when the noise stays on the right side of 0.
    EXPECT_NEAR(decide_prob(1, 1, 0.5, qam), 0.9213503964748575, 1e-9);
    EXPECT_NEAR(decide_prob(0, 1, 0.5, qam), 0.07864960352514251, 1e-9);
}

TEST(Constellation, DecideProbClosureAndLimit) {
    for (unsigned m : {4u, 16u, 64u}) {
        QamConstellation qam(m);
        const std::size_t L = qam.levels_per_axis();
        for (double sigma : {1e-3, 0.05, 0.3, 1.0, 5.0}) {
            for (std::size_t r = 0; r < L; ++r) {
                double sum = 0.0;
                for (std::size_t rp = 0; rp < L; ++rp) {
                    const double p = decide_prob(rp, r, sigma, qam);
                    EXPECT_GE(p, 0.0);
                    EXPECT_LE(p, 1.0);
                    sum += p;
                }
                EXPECT_NEAR(sum, 1.0, 1e-10);
            }
        }
        const double tiny = qam.spacing() / 100.0;
        for (std::size_t r = 0; r < L; ++r) EXPECT_NEAR(decide_prob(r, r, tiny, qam), 1.0, 1e-12);
    }
}

TEST(Constellation, DecideProbMatchesMonteCarlo) {
    QamConstellation qam(16);
    const double sigma = 0.2;
    const std::size_t L = qam.levels_per_axis();
    Rng rng(11);
    const std::size_t draws = 400000;
    for (std::size_t r = 0; r < L; ++r) {
        std::vector<double> hits(L, 0.0);
        for (std::size_t n = 0; n < draws; ++n) {
            hits[qam.decide_level(qam.pam_levels()[r] + sigma * std_normal(rng))] += 1.0;
        }
        for (std::size_t rp = 0; rp < L; ++rp) {
            const double p = decide_prob(rp, r, sigma, qam);
            const double est = hits[rp] / draws;
            const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / draws);
            EXPECT_NEAR(est, p, 4.0 * se + 1e-6) << r << "->" << rp;
        }
    }
}
