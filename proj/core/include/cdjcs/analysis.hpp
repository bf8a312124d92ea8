// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdjcs/constellation.hpp"
#include "cdjcs/rng.hpp"

namespace cdjcs {

/// Average error-propagation power E|d - d̂|² for a unit-power QAM symbol
/// with uniform prior, per-axis Gaussian noise of standard deviation sigma.
/// Evaluated as the full four-index sum over the PAM grid.
double aepp(const QamConstellation& constellation, double sigma);

/// Same quantity, using the per-axis separation of the sum.
double aepp_separable(const QamConstellation& constellation, double sigma);

/// Plain Monte Carlo decision-error power.
double aepp_monte_carlo(const QamConstellation& constellation, double sigma, std::uint64_t draws,
                        Rng& rng);

/// γ_CD(dB) = γ_OF(dB) + 10 log10(Nc / NC).
double sinr_map(double gamma_of_db, std::size_t n_subcarriers, std::size_t n_channels);

/// Per-axis noise standard deviation for a unit-power symbol at SINR γ:
/// total complex noise variance 1/γ, split evenly over I and Q.
double sigma_from_sinr(double sinr_db);

struct AeppRow {
    std::string scheme;
    unsigned order = 4;
    std::size_t subcarriers = 0;
    std::size_t channels = 0;
    double sinr_db = 0.0;
    double aepp = 0.0;
};

/// One row per (order, NC, SINR). The SINR axis is the OFDM reference SINR;
/// each NC is evaluated at its despread SINR. NC == Nc is labelled "ofdm".
std::vector<AeppRow> aepp_curves(const std::vector<unsigned>& orders,
                                 const std::vector<double>& sinr_db, std::size_t n_subcarriers,
                                 const std::vector<std::size_t>& channel_counts);

}  // namespace cdjcs
