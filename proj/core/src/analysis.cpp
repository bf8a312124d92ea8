// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/analysis.hpp"

#include <cmath>

namespace cdjcs {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
}

// P[r' | r] for all pairs, row = sent.
std::vector<std::vector<double>> transition_table(const QamConstellation& qam, double sigma) {
    const std::size_t l = qam.levels_per_axis();
    std::vector<std::vector<double>> p(l, std::vector<double>(l));
    for (std::size_t r = 0; r < l; ++r) {
        for (std::size_t rp = 0; rp < l; ++rp) p[r][rp] = decide_prob(rp, r, sigma, qam);
    }
    return p;
}

}  // namespace

double aepp(const QamConstellation& qam, double sigma) {
    check_sigma(sigma);
    const auto& s = qam.pam_levels();
    const std::size_t l = s.size();
    const auto p = transition_table(qam, sigma);
    const double prior = 1.0 / static_cast<double>(l);

    double total = 0.0;
    for (std::size_t r1 = 0; r1 < l; ++r1) {
        for (std::size_t r2 = 0; r2 < l; ++r2) {
            double inner = 0.0;
            for (std::size_t r1p = 0; r1p < l; ++r1p) {
                for (std::size_t r2p = 0; r2p < l; ++r2p) {
                    const double d1 = s[r1] - s[r1p];
                    const double d2 = s[r2] - s[r2p];
                    inner += p[r1][r1p] * p[r2][r2p] * (d1 * d1 + d2 * d2);
                }
            }
            total += prior * prior * inner;
        }
    }
    return total;
}

double aepp_separable(const QamConstellation& qam, double sigma) {
    check_sigma(sigma);
    const auto& s = qam.pam_levels();
    const std::size_t l = s.size();
    const auto p = transition_table(qam, sigma);
    double axis = 0.0;
    for (std::size_t r = 0; r < l; ++r) {
        for (std::size_t rp = 0; rp < l; ++rp) {
            const double d = s[r] - s[rp];
            axis += p[r][rp] * d * d;
        }
    }
    return 2.0 * axis / static_cast<double>(l);
}

double aepp_monte_carlo(const QamConstellation& qam, double sigma, std::uint64_t draws, Rng& rng) {
    check_sigma(sigma);
    if (draws == 0) throw DomainError("Monte Carlo needs at least one draw");
    const auto& pts = qam.points();
    double acc = 0.0;
    for (std::uint64_t n = 0; n < draws; ++n) {
        const Complex d = pts[rng() % pts.size()];
        const double ni = sigma * std_normal(rng);
        const double nq = sigma * std_normal(rng);
        acc += std::norm(d - qam.hard_decide(d + Complex(ni, nq)).point);
    }
    return acc / static_cast<double>(draws);
}

double sinr_map(double gamma_of_db, std::size_t n_subcarriers, std::size_t n_channels) {
    if (n_channels == 0) throw DomainError("number of code channels must be positive");
    return gamma_of_db + 10.0 * std::log10(static_cast<double>(n_subcarriers) /
                                           static_cast<double>(n_channels));
}

double sigma_from_sinr(double sinr_db) {
    return std::sqrt(0.5 * std::pow(10.0, -sinr_db / 10.0));
}

std::vector<AeppRow> aepp_curves(const std::vector<unsigned>& orders,
                                 const std::vector<double>& sinr_db, std::size_t n_subcarriers,
                                 const std::vector<std::size_t>& channel_counts) {
    std::vector<AeppRow> rows;
    for (unsigned m : orders) {
        const QamConstellation qam(m);
        for (std::size_t nc : channel_counts) {
            for (double g : sinr_db) {
                AeppRow row;
                row.scheme = nc == n_subcarriers ? "ofdm" : "cd-ofdm";
                row.order = m;
                row.subcarriers = n_subcarriers;
                row.channels = nc;
                row.sinr_db = g;
                row.aepp = aepp_separable(qam, sigma_from_sinr(sinr_map(g, n_subcarriers, nc)));
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

}  // namespace cdjcs
