// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "cdjcs/types.hpp"

namespace cdjcs {

/// Numerology of one OFDM radar block. Δf is the primary quantity; B, T and
/// Ts are derived from it and from the integer cyclic-prefix length.
struct OfdmParams {
    std::size_t subcarriers = 1024;          // Nc
    double subcarrier_spacing_hz = 120e3;    // Δf
    double cp_time_s = 1.43e-6;              // requested Tg; rounded to whole samples
    std::size_t symbols_per_block = 1024;    // Ms

    double bandwidth_hz() const noexcept {
        return static_cast<double>(subcarriers) * subcarrier_spacing_hz;
    }
    double useful_time_s() const noexcept { return 1.0 / subcarrier_spacing_hz; }
    /// round(Tg * B).
    std::size_t cp_samples() const noexcept;
    /// Tg actually realized by cp_samples().
    double effective_cp_time_s() const noexcept {
        return static_cast<double>(cp_samples()) / bandwidth_hz();
    }
    /// Ts = T + Tg with the realized prefix.
    double frame_time_s() const noexcept {
        return static_cast<double>(subcarriers + cp_samples()) / bandwidth_hz();
    }

    /// Throws DomainError on non-positive sizes or spacing, or negative Tg.
    void validate() const;
};

/// Nc x Ms block of frequency-domain symbols (column = OFDM symbol).
using FrameBlock = CMatrix;

inline FrameBlock make_frame_block(const OfdmParams& p) {
    return FrameBlock(p.subcarriers, p.symbols_per_block);
}

/// F(m, q) = exp(-j 2π m q / n) / sqrt(n).
CMatrix dft_matrix(std::size_t n);

/// In-place unitary DFT / inverse DFT (FFTW backed; safe to call concurrently).
void fft_unitary(std::span<Complex> v);
void ifft_unitary(std::span<Complex> v);

/// IFFT of one frequency-domain symbol with its cyclic prefix prepended.
CVector modulate(std::span<const Complex> freq_symbols, const OfdmParams& params);

/// Strips the prefix and returns the unitary DFT of the body.
CVector demodulate(std::span<const Complex> samples, const OfdmParams& params);

/// Binary waveform export. Little-endian layout:
///   char[4] "CDJW", u32 version (1), u64 Nc, u64 CP, u64 Ms, f64 sample rate,
///   then Ms frames of (Nc + CP) samples as interleaved f64 (re, im).
void write_waveform(const std::filesystem::path& path, const FrameBlock& block,
                    const OfdmParams& params);

struct Waveform {
    std::uint64_t subcarriers = 0;
    std::uint64_t cp_samples = 0;
    std::uint64_t symbols = 0;
    double sample_rate_hz = 0.0;
    CVector samples;
};

Waveform read_waveform(const std::filesystem::path& path);

}  // namespace cdjcs
