// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cdjcs/analysis.hpp"
#include "cdjcs/config.hpp"
#include "cdjcs/radar_estimator.hpp"
#include "cdjcs/sic_receiver.hpp"

namespace cdjcs {

/// Raised when a run hits a numerical guard (zero reference cell, or more
/// deep-fade erasures than the budget allows). Maps to exit code 3.
class NumericalGuardError : public Error {
public:
    using Error::Error;
};

struct BlockOptions {
    bool radar = false;           // run the range/Doppler estimator on the residual
    bool keep_signals = false;    // keep residual, echo and decided bits in the result
    bool diagnostics = false;     // per-symbol diagnostics against the truth
    bool noise_free = false;
};

struct BlockResult {
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t symbols = 0;        // data symbols of the peer
    double error_energy = 0.0;        // Σ|d - d̂|² over the block
    double error_prop_energy = 0.0;   // Σ‖h ⊙ A C ē‖² over the block
    bool erased = false;              // deep fade: no decisions made
    std::optional<RadarEstimate> radar;

    // Only with keep_signals.
    Bits decided_bits;
    CMatrix residual;     // what the radar estimator sees
    CMatrix radar_echo;   // h_R ⊙ x1, simulator truth
    CMatrix tx_reference; // x1
    std::vector<SymbolDiagnostics> diagnostics;
};

/// One block of the full chain for a fixed scheme: channel, both users'
/// transmit symbols, noise, SIC (or the TDD split), and optionally radar
/// estimation. The random stream depends only on (seed, point, trial), so
/// schemes compared at the same indices see the same fading draw.
class BlockSimulator {
public:
    BlockSimulator(const SimConfig& config, Scheme scheme);
    ~BlockSimulator();
    BlockSimulator(BlockSimulator&&) noexcept;
    BlockSimulator& operator=(BlockSimulator&&) noexcept;

    Scheme scheme() const noexcept;
    /// Code channels carrying the peer's data (Nc for OFDM schemes).
    std::size_t peer_channels() const noexcept;
    /// σ_n² for an SINR given at the OFDM reference point.
    double noise_variance(double sinr_db) const;

    BlockResult run(double sinr_db, std::uint64_t point, std::uint64_t trial,
                    const BlockOptions& options = {}) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct ResultRow {
    std::string scheme;
    std::size_t nc = 0;
    std::string metric;
    double sinr_db = 0.0;
    double value = 0.0;
    double stderr_value = 0.0;
    std::uint64_t trials = 0;  // bits for BER rows, blocks otherwise
    std::uint64_t seed = 0;
    std::string flags;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
};

struct RunOptions {
    unsigned threads = 1;
};

/// Runs fn(0..n-1) on up to `threads` workers; results land by index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Bits-per-point BER for the configured scheme and each baseline.
ExperimentResult run_ber_sweep(const SimConfig& config, const RunOptions& options = {});

/// Range and velocity RMSE over config.trials blocks per point.
ExperimentResult run_rmse_sweep(const SimConfig& config, const RunOptions& options = {});

struct AeppPoint {
    std::string scheme;
    unsigned order = 4;
    std::size_t subcarriers = 0;
    std::size_t channels = 0;
    double sinr_db = 0.0;
    double aepp_formula = 0.0;
    double aepp_montecarlo = 0.0;  // mean |d - d̂|² measured through the full pipeline
    double rel_err = 0.0;
    std::uint64_t symbols = 0;
};

/// Formula curve plus pipeline measurement for every NC in aepp_channels and
/// plain OFDM, at the config's constellation order.
std::vector<AeppPoint> run_aepp(const SimConfig& config, const RunOptions& options = {});

struct RadarDemoResult {
    RadarEstimate estimate;
    PeakIndices peak;
    RadarImage image;
    double true_range_m = 0.0;
    double true_velocity_mps = 0.0;
    double true_delay_bin = 0.0;    // τ_R B
    double true_doppler_bin = 0.0;  // f_d,R T_s Ms
    double sinr_db = 0.0;
};

RadarDemoResult run_radar_demo(const SimConfig& config, double sinr_db);

/// cd-ofdm below the threshold, ofdm at or above it.
Scheme select_scheme(double estimated_sinr_db, double threshold_db);

/// SINR at which a BER curve crosses `target`, interpolated linearly on the
/// 10 log10(Q⁻¹(BER)²) scale (linear in SINR dB for Gray QPSK). Rows must be
/// one metric of one scheme; returns nullopt if no bracketing pair exists.
std::optional<double> ber_crossing_db(const std::vector<ResultRow>& rows, double target);

/// "# cdjcs <version> config_hash=<hex> seed=<n> ..." header line.
std::string csv_header_comment(const SimConfig& config, const std::string& extra = {});

void write_results_csv(std::ostream& os, const SimConfig& config, const ExperimentResult& result);
void write_aepp_csv(std::ostream& os, const SimConfig& config, const std::vector<AeppPoint>& points);

/// printf-style %.12g.
std::string format_double(double v);

}  // namespace cdjcs
