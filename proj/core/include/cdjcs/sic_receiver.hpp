// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cdjcs/constellation.hpp"
#include "cdjcs/spreading.hpp"
#include "cdjcs/types.hpp"

namespace cdjcs {

inline constexpr double kDeepFadeThreshold = 1e-12;

/// Per-chip amplitude so that every subcarrier carries `power` on average
/// with an orthonormal code book: sqrt(P Nc / NC). Identity book: sqrt(P).
double transmit_amplitude(double power, const CodeBook& book);

/// y / h per subcarrier. Throws DeepFadeError naming (m, symbol) if |h| < threshold.
CVector equalize(std::span<const Complex> y, std::span<const Complex> h, std::size_t symbol = 0,
                 double threshold = kDeepFadeThreshold);

struct SymbolDecisions {
    CVector soft;                      // despread, amplitude-normalized ŷ
    CVector symbols;                   // d̂
    std::vector<std::uint32_t> labels;
    Bits bits;
};

struct SymbolDiagnostics {
    std::size_t symbol = 0;
    std::size_t bit_errors = 0;
    double residual_energy = 0.0;
    double error_prop_energy = 0.0;  // ‖h ⊙ A C ē‖², needs truth
    double error_energy = 0.0;       // ‖ē‖², needs truth
};

struct BlockOutput {
    Bits bits;
    CMatrix symbols;   // NC x Ms decisions
    CMatrix residual;  // Nc x Ms
    std::vector<SymbolDiagnostics> diagnostics;
    std::size_t bit_errors = 0;  // only meaningful when truth was supplied
};

/// Simulator-side ground truth for diagnostics; never used for decisions.
struct BlockTruth {
    const Bits* bits = nullptr;       // NC * log2(M) * Ms bits, symbol-major
    const CMatrix* symbols = nullptr; // NC x Ms
};

/// Code-division receiver: equalize, despread, decide, rebuild, cancel.
class SicReceiver {
public:
    SicReceiver(CodeBook book, QamConstellation constellation, double power);

    const CodeBook& book() const noexcept { return book_; }
    const QamConstellation& constellation() const noexcept { return qam_; }
    double amplitude() const noexcept { return amplitude_; }

    SymbolDecisions demodulate_comm(std::span<const Complex> y, std::span<const Complex> h,
                                    std::size_t symbol = 0) const;

    /// y - h ⊙ (A C d̂).
    CVector cancel(std::span<const Complex> y, std::span<const Complex> h,
                   std::span<const Complex> decided) const;

    /// A C d: the frequency-domain transmit vector for symbols d.
    CVector transmit(std::span<const Complex> d) const;

    BlockOutput run_block(const CMatrix& received, const CMatrix& h_comm,
                          const std::optional<BlockTruth>& truth = std::nullopt) const;

private:
    CodeBook book_;
    QamConstellation qam_;
    double amplitude_;
};

/// Plain OFDM receiver: one symbol per subcarrier, no spreading.
class OfdmSicReceiver {
public:
    OfdmSicReceiver(QamConstellation constellation, double power);

    const QamConstellation& constellation() const noexcept { return qam_; }
    double amplitude() const noexcept { return amplitude_; }

    SymbolDecisions demodulate_comm(std::span<const Complex> y, std::span<const Complex> h,
                                    std::size_t symbol = 0) const;
    CVector cancel(std::span<const Complex> y, std::span<const Complex> h,
                   std::span<const Complex> decided) const;
    CVector transmit(std::span<const Complex> d) const;

    BlockOutput run_block(const CMatrix& received, const CMatrix& h_comm,
                          const std::optional<BlockTruth>& truth = std::nullopt) const;

private:
    QamConstellation qam_;
    double amplitude_;
};

/// Per-symbol diagnostics CSV: trial,symbol,bit_errors,residual_energy,error_prop_energy.
void write_diagnostics_csv(std::ostream& os, std::size_t trial,
                           const std::vector<SymbolDiagnostics>& diagnostics, bool header);

}  // namespace cdjcs
