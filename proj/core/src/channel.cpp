// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/channel.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace cdjcs {

std::vector<PathParams> GeometryConfig::default_paths() {
    constexpr double deg = kPi / 180.0;
    return {
        PathParams{100.0, 0.0, 0.0, 1.0, 1.0},
        PathParams{130.0, 20.0 * deg, 20.0 * deg, 0.1, 0.1},
    };
}

void GeometryConfig::validate() const {
    std::vector<std::string> problems;
    if (!(carrier_hz > 0.0)) problems.emplace_back("carrier_hz must be positive");
    if (!(speed_of_light > 0.0)) problems.emplace_back("speed_of_light must be positive");
    if (!std::isfinite(v_rel)) problems.emplace_back("v_rel must be finite");
    if (tx_elements == 0) problems.emplace_back("tx_elements must be at least 1");
    if (rx_elements == 0) problems.emplace_back("rx_elements must be at least 1");
    if (!(spacing_wavelengths > 0.0)) problems.emplace_back("spacing_wavelengths must be positive");
    if (paths.empty()) problems.emplace_back("paths must contain the LoS path");
    for (std::size_t l = 0; l < paths.size(); ++l) {
        const auto& p = paths[l];
        const std::string tag = "paths[" + std::to_string(l) + "]";
        if (!(p.length_m > 0.0)) problems.push_back(tag + ".length_m must be positive");
        if (p.comm_variance < 0.0) problems.push_back(tag + ".comm_variance must be >= 0");
        if (p.rcs_variance < 0.0) problems.push_back(tag + ".rcs_variance must be >= 0");
    }
    if (!problems.empty()) throw ConfigError(problems);
}

CVector steering(double theta_rad, std::size_t n_elems, double spacing_wavelengths) {
    CVector a(n_elems);
    const double step = 2.0 * kPi * spacing_wavelengths * std::sin(theta_rad);
    for (std::size_t p = 0; p < n_elems; ++p) a[p] = std::polar(1.0, step * static_cast<double>(p));
    return a;
}

BeamformingSet conjugate_beams(const GeometryConfig& g) {
    const auto& los = g.paths.at(0);
    const double sm = 1.0 / std::sqrt(static_cast<double>(g.tx_elements));
    const double sn = 1.0 / std::sqrt(static_cast<double>(g.rx_elements));
    BeamformingSet b;
    // Applied as w_TX^*, so storing a/sqrt(M) makes a^T w_TX^* = sqrt(M) at any angle.
    b.tx = steering(los.aod_rad, g.tx_elements, g.spacing_wavelengths);
    for (auto& x : b.tx) x *= sm;
    b.rx_comm = steering(los.aoa_rad, g.rx_elements, g.spacing_wavelengths);
    for (auto& x : b.rx_comm) x *= sn;
    b.rx_radar = steering(los.aod_rad, g.rx_elements, g.spacing_wavelengths);
    for (auto& x : b.rx_radar) x *= sn;
    return b;
}

std::pair<Complex, Complex> path_gains(std::size_t l, const GeometryConfig& g, Rng& rng) {
    const auto& p = g.paths.at(l);
    const double lambda = g.wavelength_m();
    const double comm_scale = lambda / (4.0 * kPi * p.length_m);
    const double radar_scale =
        std::sqrt(lambda * lambda / (std::pow(4.0 * kPi, 3) * std::pow(p.length_m, 4)));

    Complex comm = comm_scale;
    if (l != 0) comm *= complex_gaussian(rng, p.comm_variance);

    Complex rcs;
    if (l == 0 && g.los_rcs_fading == RcsFading::constant_modulus) {
        rcs = std::polar(std::sqrt(p.rcs_variance), 2.0 * kPi * uniform01(rng));
    } else {
        rcs = complex_gaussian(rng, p.rcs_variance);
    }
    return {comm, radar_scale * rcs};
}

PathGains draw_path_gains(const GeometryConfig& g, Rng& rng) {
    PathGains out;
    out.comm.resize(g.paths.size());
    out.radar.resize(g.paths.size());
    for (std::size_t l = 0; l < g.paths.size(); ++l) {
        std::tie(out.comm[l], out.radar[l]) = path_gains(l, g, rng);
    }
    return out;
}

namespace {

Complex dot_h(const CVector& w, const CVector& a) {
    Complex acc{};
    for (std::size_t p = 0; p < w.size(); ++p) acc += std::conj(w[p]) * a[p];
    return acc;
}

// a^T w^*
Complex dot_tx(const CVector& a, const CVector& w) {
    Complex acc{};
    for (std::size_t p = 0; p < w.size(); ++p) acc += a[p] * std::conj(w[p]);
    return acc;
}

void accumulate_path(CMatrix& h, Complex amplitude, double delay_s, double doppler_hz,
                     const OfdmParams& params) {
    const std::size_t nc = h.rows();
    const std::size_t ms = h.cols();
    const double df = params.subcarrier_spacing_hz;
    const double ts = params.frame_time_s();

    CVector range_phasor(nc);
    for (std::size_t m = 0; m < nc; ++m) {
        range_phasor[m] = std::polar(1.0, -2.0 * kPi * static_cast<double>(m) * df * delay_s);
    }
    for (std::size_t i = 0; i < ms; ++i) {
        const Complex dop =
            amplitude * std::polar(1.0, 2.0 * kPi * doppler_hz * (delay_s + static_cast<double>(i) * ts));
        auto col = h.col(i);
        for (std::size_t m = 0; m < nc; ++m) col[m] += dop * range_phasor[m];
    }
}

}  // namespace

Complex comm_beam_factor(std::size_t l, const GeometryConfig& g, const BeamformingSet& beams) {
    const auto& p = g.paths.at(l);
    const auto a_rx = steering(p.aoa_rad, g.rx_elements, g.spacing_wavelengths);
    const auto a_tx = steering(p.aod_rad, g.tx_elements, g.spacing_wavelengths);
    return dot_h(beams.rx_comm, a_rx) * dot_tx(a_tx, beams.tx);
}

Complex radar_beam_factor(std::size_t l, const GeometryConfig& g, const BeamformingSet& beams) {
    const auto& p = g.paths.at(l);
    const auto a_rx = steering(p.aod_rad, g.rx_elements, g.spacing_wavelengths);
    const auto a_tx = steering(p.aod_rad, g.tx_elements, g.spacing_wavelengths);
    return dot_h(beams.rx_radar, a_rx) * dot_tx(a_tx, beams.tx);
}

JcsChannelRealization realize(const GeometryConfig& g, const BeamformingSet& beams,
                              const OfdmParams& params, Rng& rng) {
    return realize(g, beams, params, draw_path_gains(g, rng));
}

JcsChannelRealization realize(const GeometryConfig& g, const BeamformingSet& beams,
                              const OfdmParams& params, const PathGains& gains) {
    require_size(gains.comm.size(), g.paths.size(), "path gains");
    JcsChannelRealization out;
    out.comm = CMatrix(params.subcarriers, params.symbols_per_block);
    out.radar = CMatrix(params.subcarriers, params.symbols_per_block);
    out.gains = gains;

    for (std::size_t l = 0; l < g.paths.size(); ++l) {
        accumulate_path(out.comm, gains.comm[l] * comm_beam_factor(l, g, beams), g.comm_delay_s(l),
                        g.comm_doppler_hz(), params);
        accumulate_path(out.radar, gains.radar[l] * radar_beam_factor(l, g, beams),
                        g.radar_delay_s(l), g.radar_doppler_hz(), params);
    }

    out.comm_delay_s = g.comm_delay_s(0);
    out.radar_delay_s = g.radar_delay_s(0);
    out.comm_doppler_hz = g.comm_doppler_hz();
    out.radar_doppler_hz = g.radar_doppler_hz();
    out.range_m = g.paths[0].length_m;
    out.v_rel = g.v_rel;
    return out;
}

CMatrix comm_mimo_response(const GeometryConfig& g, const PathGains& gains, const OfdmParams& params,
                           std::size_t m, std::size_t i, LinkDirection direction) {
    const bool fwd = direction == LinkDirection::forward;
    CMatrix h(fwd ? g.rx_elements : g.tx_elements, fwd ? g.tx_elements : g.rx_elements);
    const double ts = params.frame_time_s();
    const double fd = g.comm_doppler_hz();
    for (std::size_t l = 0; l < g.paths.size(); ++l) {
        const auto& p = g.paths[l];
        const double tau = g.comm_delay_s(l);
        const Complex coeff =
            gains.comm.at(l) * std::polar(1.0, 2.0 * kPi * fd * (tau + static_cast<double>(i) * ts)) *
            std::polar(1.0, -2.0 * kPi * static_cast<double>(m) * params.subcarrier_spacing_hz * tau);
        // Forward: a_N(θ_RX) a_M(θ_TX)^T. Reverse: departure from the N array, arrival at the M array.
        const auto a_n = steering(p.aoa_rad, g.rx_elements, g.spacing_wavelengths);
        const auto a_m = steering(p.aod_rad, g.tx_elements, g.spacing_wavelengths);
        for (std::size_t q = 0; q < g.tx_elements; ++q) {
            for (std::size_t n = 0; n < g.rx_elements; ++n) {
                const Complex v = coeff * a_n[n] * a_m[q];
                if (fwd) h(n, q) += v;
                else h(q, n) += v;
            }
        }
    }
    return h;
}

double los_comm_power_gain(const GeometryConfig& g, const BeamformingSet& beams) {
    const double lambda = g.wavelength_m();
    const double b0 = lambda / (4.0 * kPi * g.paths.at(0).length_m);
    return std::norm(b0 * comm_beam_factor(0, g, beams));
}

void write_channel_csv(const std::filesystem::path& path, const CMatrix& response) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << "subcarrier,symbol,re,im\n";
    os.precision(17);
    for (std::size_t i = 0; i < response.cols(); ++i) {
        for (std::size_t m = 0; m < response.rows(); ++m) {
            const auto& h = response(m, i);
            os << m << ',' << i << ',' << h.real() << ',' << h.imag() << '\n';
        }
    }
}

}  // namespace cdjcs
