// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "cdjcs/ofdm.hpp"
#include "cdjcs/rng.hpp"
#include "cdjcs/types.hpp"

namespace cdjcs {

/// One propagation path l between the two users. Path 0 is the LoS path.
struct PathParams {
    double length_m = 100.0;      // R_l
    double aoa_rad = 0.0;         // communication angle of arrival
    double aod_rad = 0.0;         // communication angle of departure, also the radar angle
    double comm_variance = 1.0;   // small-scale comm fading variance (unused on LoS)
    double rcs_variance = 1.0;    // radar cross-section variance, m^2
};

/// Distribution of the LoS radar cross-section coefficient. NLoS paths are
/// always Rayleigh.
enum class RcsFading {
    rayleigh,          // zero-mean complex Gaussian
    constant_modulus,  // |b| = sqrt(variance), uniform phase
};

struct GeometryConfig {
    double carrier_hz = 24e9;
    double speed_of_light = 2.998e8;
    double v_rel = 15.0;                 // radial relative velocity, m/s
    std::size_t tx_elements = 16;        // M
    std::size_t rx_elements = 16;        // N
    double spacing_wavelengths = 0.5;    // d / λ
    std::vector<PathParams> paths = default_paths();
    RcsFading los_rcs_fading = RcsFading::constant_modulus;

    double wavelength_m() const noexcept { return speed_of_light / carrier_hz; }

    double comm_delay_s(std::size_t l) const { return paths.at(l).length_m / speed_of_light; }
    double radar_delay_s(std::size_t l) const { return 2.0 * comm_delay_s(l); }
    double comm_doppler_hz() const noexcept { return v_rel / speed_of_light * carrier_hz; }
    double radar_doppler_hz() const noexcept { return 2.0 * comm_doppler_hz(); }

    /// LoS at 100 m plus one NLoS path at 1.3x the length, 20 degrees off.
    static std::vector<PathParams> default_paths();

    /// Throws ConfigError listing every violated constraint.
    void validate() const;
};

/// Unit-norm beamformers; tx is applied conjugated (w_TX^*).
struct BeamformingSet {
    CVector tx;
    CVector rx_comm;
    CVector rx_radar;
};

/// Large-scale times small-scale path coefficients (b_C,l, b_R,l), no beams.
struct PathGains {
    CVector comm;
    CVector radar;
};

struct JcsChannelRealization {
    CMatrix comm;   // h_C(m, i)
    CMatrix radar;  // h_R(m, i)
    PathGains gains;
    double comm_delay_s = 0.0;     // τ_C,0
    double radar_delay_s = 0.0;    // τ_R,0
    double comm_doppler_hz = 0.0;  // f_d,C,0
    double radar_doppler_hz = 0.0; // f_d,R,0
    double range_m = 0.0;          // R_0
    double v_rel = 0.0;
};

/// ULA response: entry p = exp(j 2π (d/λ) p sin θ).
CVector steering(double theta_rad, std::size_t n_elems, double spacing_wavelengths = 0.5);

/// Matched beams toward the LoS path.
BeamformingSet conjugate_beams(const GeometryConfig& geometry);

/// Draws (b_C,l, b_R,l) for path index l.
std::pair<Complex, Complex> path_gains(std::size_t l, const GeometryConfig& geometry, Rng& rng);
PathGains draw_path_gains(const GeometryConfig& geometry, Rng& rng);

/// Beamformed scalar gain of path l: (w_rx^H a_N(θ_rx)) (a_M(θ_tx)^T w_tx^*).
Complex comm_beam_factor(std::size_t l, const GeometryConfig& geometry, const BeamformingSet& beams);
Complex radar_beam_factor(std::size_t l, const GeometryConfig& geometry, const BeamformingSet& beams);

/// Per-subcarrier frequency responses over one block. Fading is drawn once
/// per block; only the Doppler phasor evolves with the symbol index.
JcsChannelRealization realize(const GeometryConfig& geometry, const BeamformingSet& beams,
                              const OfdmParams& params, Rng& rng);
JcsChannelRealization realize(const GeometryConfig& geometry, const BeamformingSet& beams,
                              const OfdmParams& params, const PathGains& gains);

enum class LinkDirection {
    forward,  // transmitter array M at θ_TX, receiver array N at θ_RX: N x M
    reverse,  // same physical paths traversed backwards: M x N
};

/// Unbeamformed MIMO communication response at subcarrier m, symbol i.
CMatrix comm_mimo_response(const GeometryConfig& geometry, const PathGains& gains,
                           const OfdmParams& params, std::size_t m, std::size_t i,
                           LinkDirection direction);

/// |b_C,0 g_C,0|^2: received LoS power per unit transmit power per subcarrier.
double los_comm_power_gain(const GeometryConfig& geometry, const BeamformingSet& beams);

/// CSV dump: subcarrier,symbol,re,im.
void write_channel_csv(const std::filesystem::path& path, const CMatrix& response);

}  // namespace cdjcs
