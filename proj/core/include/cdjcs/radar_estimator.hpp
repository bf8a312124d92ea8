// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "cdjcs/ofdm.hpp"
#include "cdjcs/types.hpp"

namespace cdjcs {

/// Magnitude of the delay/Doppler periodogram, column-major like CMatrix:
/// rows are delay bins (Nc), columns Doppler bins (Ms).
struct RadarImage {
    std::size_t delay_bins = 0;
    std::size_t doppler_bins = 0;
    std::vector<double> magnitude;

    double operator()(std::size_t r, std::size_t c) const noexcept {
        return magnitude[c * delay_bins + r];
    }
};

/// How a refined peak position is turned into a bin index.
enum class PeakRounding {
    floor,    // integer part of the refined position
    nearest,  // the argmax bin itself
};

struct PeakIndices {
    std::size_t delay = 0;
    std::size_t doppler = 0;
    std::size_t argmax_delay = 0;
    std::size_t argmax_doppler = 0;
    double delay_offset = 0.0;    // refined position minus argmax, in bins
    double doppler_offset = 0.0;
};

struct RadarEstimate {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double tau_s = 0.0;
    double doppler_hz = 0.0;
    double peak_to_floor_db = 0.0;
    std::size_t delay_bin = 0;
    std::size_t doppler_bin = 0;
};

/// Element-wise residual / reference. Throws ZeroReferenceError at the first
/// reference cell with magnitude below threshold.
CMatrix reference_divide(const CMatrix& residual, const CMatrix& tx_reference,
                         double threshold = 1e-12);

/// Unitary IFFT down each column (subcarriers), then unitary FFT along each
/// row (symbols); magnitudes.
RadarImage periodogram(const CMatrix& div);

/// Global argmax (ties to the lexicographically smaller (delay, doppler)),
/// refined by the neighbour ratio of the Dirichlet kernel. In floor mode a
/// bin is stepped down when the refined position lies clearly below it.
PeakIndices peak_search(const RadarImage& image, PeakRounding rounding = PeakRounding::floor,
                        double snap_tolerance = 0.01);

/// Doppler bins above Ms/2 map to negative frequencies.
RadarEstimate to_physical(std::size_t delay_bin, std::size_t doppler_bin, const OfdmParams& params,
                          double carrier_hz, double speed_of_light);

/// Peak power over the mean power outside the 3x3 neighbourhood of the peak, dB.
double peak_to_floor_db(const RadarImage& image, std::size_t delay_bin, std::size_t doppler_bin);

RadarEstimate estimate(const CMatrix& residual, const CMatrix& tx_reference, const OfdmParams& params,
                       double carrier_hz, double speed_of_light,
                       PeakRounding rounding = PeakRounding::floor, RadarImage* image_out = nullptr);

/// CSV dump: delay_bin,doppler_bin,magnitude.
void write_image_csv(const std::filesystem::path& path, const RadarImage& image);

}  // namespace cdjcs
