// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdjcs/types.hpp"

namespace cdjcs {

/// Gaussian tail probability Q(x) = P(N(0,1) > x), via erfc.
double q_function(double x);

/// Square M-QAM built from two identical Gray-labelled PAM axes, normalized
/// to unit average symbol power (0.5 per axis).
///
/// A symbol label is the integer formed by its log2(M) bits, MSB first. The
/// upper half of the bits selects the in-phase level, the lower half the
/// quadrature level; within an axis the level index is the reflected-Gray
/// decode of those bits, so adjacent levels differ in exactly one bit.
class QamConstellation {
public:
    struct Decision {
        Complex point;
        std::uint32_t label;
        std::size_t level_i;
        std::size_t level_q;
    };

    /// order must be 4, 16 or 64.
    explicit QamConstellation(unsigned order);

    unsigned order() const noexcept { return order_; }
    unsigned bits_per_symbol() const noexcept { return bits_; }
    std::size_t levels_per_axis() const noexcept { return levels_.size(); }
    /// Ascending PAM amplitudes, symmetric about zero.
    const std::vector<double>& pam_levels() const noexcept { return levels_; }
    /// Distance between adjacent PAM levels (a).
    double spacing() const noexcept { return spacing_; }

    /// Point for a label in [0, M).
    Complex point(std::uint32_t label) const;
    const std::vector<Complex>& points() const noexcept { return points_; }

    std::uint32_t label_of_levels(std::size_t level_i, std::size_t level_q) const;

    /// Maps groups of log2(M) bits to points. Throws InputShapeError if the
    /// length is not a multiple of log2(M).
    CVector map_bits(std::span<const std::uint8_t> bits) const;
    void map_bits(std::span<const std::uint8_t> bits, std::span<Complex> out) const;

    /// Per-axis nearest-level decision; saturates outside the outermost
    /// levels; exact boundary ties go to the lower level. Throws DomainError
    /// on non-finite input.
    Decision hard_decide(Complex received) const;

    /// PAM level index in [0, levels) nearest to x (same rule as hard_decide).
    std::size_t decide_level(double x) const;

    /// Appends the bits of label (MSB first) to out.
    void label_bits(std::uint32_t label, std::span<std::uint8_t> out) const;

private:
    unsigned order_;
    unsigned bits_;
    unsigned bits_per_axis_;
    double spacing_;
    std::vector<double> levels_;
    std::vector<std::uint32_t> gray_of_level_;  // axis bits for each level index
    std::vector<std::size_t> level_of_gray_;
    std::vector<Complex> points_;
};

/// Probability that a PAM symbol sent at level index `sent` (0-based) is
/// decided as level index `decided` under per-axis Gaussian noise of standard
/// deviation sigma. Outermost decision regions extend to infinity.
/// Throws DomainError if sigma <= 0 or an index is out of range.
double decide_prob(std::size_t decided, std::size_t sent, double sigma,
                   const QamConstellation& constellation);

}  // namespace cdjcs
