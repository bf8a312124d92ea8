// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "cdjcs/analysis.hpp"

using namespace cdjcs;

namespace {

// Independent Monte Carlo: brute-force nearest point over the full grid, own
// level construction, complex noise with per-axis deviation sigma.
double oracle_mc(unsigned order, double sigma, std::uint64_t draws, std::uint64_t seed) {
    const int l = static_cast<int>(std::lround(std::sqrt(double(order))));
    const double a = std::sqrt(6.0 / (order - 1.0));
    std::vector<double> lv(l);
    for (int k = 0; k < l; ++k) lv[k] = a * (k - (l - 1) / 2.0);
    Rng rng(seed);
    double acc = 0.0;
    for (std::uint64_t n = 0; n < draws; ++n) {
        const int i = static_cast<int>(rng() % l), q = static_cast<int>(rng() % l);
        const double yi = lv[i] + sigma * std_normal(rng);
        const double yq = lv[q] + sigma * std_normal(rng);
        double best = 1e300;
        double di = 0, dq = 0;
        for (int u = 0; u < l; ++u) {
            for (int v = 0; v < l; ++v) {
                const double d = (yi - lv[u]) * (yi - lv[u]) + (yq - lv[v]) * (yq - lv[v]);
                if (d < best) {
                    best = d;
                    di = lv[u];
                    dq = lv[v];
                }
            }
        }
        acc += (lv[i] - di) * (lv[i] - di) + (lv[q] - dq) * (lv[q] - dq);
    }
    return acc / static_cast<double>(draws);
}

}  // namespace

TEST(Aepp, LiteralEqualsSeparable) {
    for (unsigned m : {4u, 16u, 64u}) {
        QamConstellation qam(m);
        for (double sigma : {0.01, 0.1, 0.3, 1.0, 4.0}) {
            EXPECT_NEAR(aepp(qam, sigma), aepp_separable(qam, sigma), 1e-12) << m << " " << sigma;
        }
    }
}

TEST(Aepp, QpskClosedForm) {
    QamConstellation qam(4);
    // Each axis flips with probability Q(a/2σ) at cost a² = 2.
    for (double sigma : {0.2, 0.5, 1.0}) {
        const double pe = q_function(std::sqrt(0.5) / sigma);
        EXPECT_NEAR(aepp(qam, sigma), 2.0 * 2.0 * pe, 1e-14);
    }
    EXPECT_NEAR(aepp(qam, 0.5), 0.3145984141, 1e-9);
}

TEST(Aepp, VanishesForSmallNoise) {
    for (unsigned m : {4u, 16u, 64u}) {
        QamConstellation qam(m);
        EXPECT_LT(aepp(qam, qam.spacing() / 20.0), 1e-12) << m;
    }
}

TEST(Aepp, MonotoneInSigmaAndBounded) {
    for (unsigned m : {4u, 16u, 64u}) {
        QamConstellation qam(m);
        double last = 0.0;
        for (double db = 40.0; db >= -30.0; db -= 1.0) {
            const double v = aepp_separable(qam, sigma_from_sinr(db));
            EXPECT_GE(v, last) << m << " " << db;
            EXPECT_GE(v, 0.0);
            // Error cannot exceed the largest squared distance in the grid.
            const double span = qam.pam_levels().back() - qam.pam_levels().front();
            EXPECT_LE(v, 2.0 * span * span);
            last = v;
        }
    }
}

TEST(Aepp, MatchesIndependentMonteCarlo) {
    const std::pair<unsigned, double> cases[] = {{4, 0.5}, {4, 0.35}, {16, 0.2}, {64, 0.08}};
    for (auto [m, sigma] : cases) {
        QamConstellation qam(m);
        const double f = aepp(qam, sigma);
        const std::uint64_t draws = m == 64 ? 1'000'000 : 2'000'000;
        const double mc = oracle_mc(m, sigma, draws, 17 + m);
        EXPECT_NEAR(mc / f, 1.0, 0.02) << "M=" << m << " sigma=" << sigma;
    }
}

TEST(Aepp, LibraryMonteCarloAgrees) {
    QamConstellation qam(16);
    Rng rng(3);
    const double f = aepp(qam, 0.25);
    EXPECT_NEAR(aepp_monte_carlo(qam, 0.25, 1'000'000, rng) / f, 1.0, 0.02);
    EXPECT_THROW(aepp_monte_carlo(qam, 0.25, 0, rng), DomainError);
    EXPECT_THROW(aepp(qam, 0.0), DomainError);
}

TEST(Aepp, SinrMapAndSigma) {
    EXPECT_NEAR(sinr_map(-20.0, 1024, 1), 10.103, 1e-3);
    EXPECT_NEAR(sinr_map(0.0, 1024, 255), 6.037, 1e-3);
    EXPECT_DOUBLE_EQ(sinr_map(5.0, 1024, 1024), 5.0);
    EXPECT_THROW(sinr_map(0.0, 1024, 0), DomainError);
    EXPECT_NEAR(sigma_from_sinr(0.0), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(sigma_from_sinr(10.0), std::sqrt(0.05), 1e-15);
}

TEST(Aepp, CurvesShiftByCdmGain) {
    const std::vector<double> grid = {-30, -25, -20, -15, -10, -5, 0};
    const auto rows = aepp_curves({4, 16}, grid, 1024, {1, 1024});
    ASSERT_EQ(rows.size(), 2u * 2u * grid.size());
    for (const auto& r : rows) {
        EXPECT_EQ(r.scheme, r.channels == 1024 ? "ofdm" : "cd-ofdm");
        const QamConstellation qam(r.order);
        const double shifted = r.channels == 1 ? r.sinr_db + 10 * std::log10(1024.0) : r.sinr_db;
        EXPECT_NEAR(r.aepp, aepp_separable(qam, sigma_from_sinr(shifted)), 1e-15);
    }
    // Spreading helps at every point.
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_LT(rows[k].aepp, rows[grid.size() + k].aepp);
}
