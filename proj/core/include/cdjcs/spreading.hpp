// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cdjcs/constellation.hpp"
#include "cdjcs/rng.hpp"
#include "cdjcs/types.hpp"

namespace cdjcs {

/// Spreading matrix C (Nc x NC). Hadamard books hold Sylvester Walsh-Hadamard
/// columns scaled by 1/sqrt(Nc), so the columns are orthonormal. The identity
/// book (plain OFDM) is the Nc x Nc identity.
///
/// Immutable after construction.
class CodeBook {
public:
    /// Columns `indices` of the order-Nc Sylvester Hadamard matrix.
    /// Throws ConstructionError if Nc is not a power of two and
    /// InputShapeError on empty, out-of-range or duplicate indices.
    static CodeBook hadamard(std::size_t n_subcarriers, std::vector<std::size_t> indices);
    /// Columns 0 .. n_channels-1.
    static CodeBook hadamard(std::size_t n_subcarriers, std::size_t n_channels);
    static CodeBook identity(std::size_t n_subcarriers);

    std::size_t subcarriers() const noexcept { return nc_; }
    std::size_t channels() const noexcept { return indices_.size(); }
    bool is_identity() const noexcept { return identity_; }
    const std::vector<std::size_t>& channel_indices() const noexcept { return indices_; }

    /// C(m, k).
    double entry(std::size_t m, std::size_t k) const;
    /// Sign of the underlying +/-1 code chip (1 for identity diagonal, 0 off it).
    int chip(std::size_t m, std::size_t k) const;

    /// C d. d has length channels(), result length subcarriers().
    CVector spread(std::span<const Complex> d) const;
    void spread(std::span<const Complex> d, std::span<Complex> out) const;

    /// C^H y. y has length subcarriers(), result length channels().
    CVector despread(std::span<const Complex> y) const;
    void despread(std::span<const Complex> y, std::span<Complex> out) const;

    /// CDM gain Nc / NC (linear).
    double cdm_gain() const noexcept {
        return static_cast<double>(nc_) / static_cast<double>(indices_.size());
    }

private:
    CodeBook(std::size_t nc, std::vector<std::size_t> idx, bool identity);
    bool use_fast_transform() const noexcept;

    std::size_t nc_ = 0;
    std::vector<std::size_t> indices_;
    bool identity_ = false;
    double scale_ = 1.0;
    std::vector<double> columns_;  // scaled entries for the direct path, column-major
};

/// Selection rule for build_hadamard: explicit column list, or the first NC.
CodeBook build_hadamard(std::size_t n_subcarriers, std::size_t n_channels,
                        const std::optional<std::vector<std::size_t>>& selection = std::nullopt);

/// CDM gain Nc/NC in dB.
double cdm_gain_db(std::size_t n_subcarriers, std::size_t n_channels);

/// In-place unnormalized fast Walsh-Hadamard transform (Sylvester order);
/// length must be a power of two.
void fwht(std::span<Complex> v);
void fwht(std::span<std::int64_t> v);

bool is_power_of_two(std::size_t n) noexcept;

enum class ZeroSearchMode { exhaustive, randomized };

struct ZeroFreeReport {
    ZeroSearchMode mode = ZeroSearchMode::exhaustive;
    bool zero_free = true;           // no zero entry seen (certified when exhaustive)
    std::uint64_t vectors_checked = 0;
    double min_abs_entry = 0.0;      // smallest |(C d)(m)| seen
    std::optional<std::vector<std::uint32_t>> witness_labels;  // symbol labels of a zero witness
    std::optional<std::size_t> witness_row;
};

/// Searches C d over QAM symbol vectors d for a zero entry. Exhaustive mode
/// enumerates all M^NC vectors and throws BudgetError if that exceeds
/// `budget`; randomized mode draws `trials` uniform vectors from rng. Entry
/// sums are evaluated in exact integer arithmetic on the odd PAM lattice.
ZeroFreeReport check_zero_free(const CodeBook& book, const QamConstellation& constellation,
                               ZeroSearchMode mode, std::uint64_t trials = 0, Rng* rng = nullptr,
                               std::uint64_t budget = 10'000'000);

}  // namespace cdjcs
