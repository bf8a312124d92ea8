// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdjcs/channel.hpp"
#include "cdjcs/ofdm.hpp"
#include "cdjcs/radar_estimator.hpp"

namespace cdjcs {

enum class Scheme { cd_ofdm, ofdm, tdd_ofdm };
enum class CodebookKind { hadamard, identity };

/// Whether both users spread with the same Hadamard columns, or the sensing
/// user takes the next NC1 columns after the peer's.
enum class CodeAssignment { shared, disjoint };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SimConfig {
    OfdmParams ofdm = desk_ofdm();
    GeometryConfig geometry;
    unsigned constellation_order = 4;
    std::size_t nc1 = 1;  // code channels of the sensing user (its own reference)
    std::size_t nc2 = 1;  // code channels of the communicating peer
    double p1 = 1.0;      // W per subcarrier
    double p2 = 1.0;
    Scheme scheme = Scheme::cd_ofdm;
    CodebookKind codebook = CodebookKind::hadamard;
    CodeAssignment code_assignment = CodeAssignment::shared;
    std::vector<Scheme> baselines = {Scheme::ofdm};
    std::vector<double> sinr_db = {-30, -25, -20, -15, -10, -5, 0, 5, 10, 15, 20};
    std::uint64_t trials = 200;         // radar blocks per SINR point
    std::uint64_t ber_bits = 2'000'000; // minimum bits per BER point
    double ber_precision = 0.1;         // stderr / BER above which a row is flagged
    std::uint64_t seed = 1;
    std::optional<double> dsss_switch_threshold_db;
    PeakRounding peak_rounding = PeakRounding::floor;
    double erasure_budget = 0.01;       // tolerated fraction of deep-fade blocks
    std::vector<std::size_t> aepp_channels = {1, 255, 511};
    std::uint64_t aepp_trials = 20;     // pipeline blocks per AEPP point

    static OfdmParams desk_ofdm() {
        OfdmParams p;
        p.symbols_per_block = 256;
        return p;
    }

    /// Throws ConfigError listing every problem with its field name.
    void validate() const;
};

/// Strict JSON reader: unknown keys, wrong types and invalid values are
/// collected into one ConfigError.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, every field present).
std::string to_json(const SimConfig& config);

/// FNV-1a 64 of the canonical JSON.
std::uint64_t config_hash(const SimConfig& config);

}  // namespace cdjcs
