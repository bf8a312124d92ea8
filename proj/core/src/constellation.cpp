// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdjcs {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

unsigned log2_exact(unsigned v) {
    unsigned k = 0;
    while ((1U << k) < v) ++k;
    return k;
}

}  // namespace

QamConstellation::QamConstellation(unsigned order) : order_(order) {
    if (order != 4 && order != 16 && order != 64) {
        throw DomainError("QAM order must be 4, 16 or 64, got " + std::to_string(order));
    }
    bits_ = log2_exact(order);
    bits_per_axis_ = bits_ / 2;
    const std::size_t n = std::size_t{1} << bits_per_axis_;

    // Per-axis power (n^2 - 1) a^2 / 12 = 0.5.
    spacing_ = std::sqrt(6.0 / static_cast<double>(n * n - 1));
    levels_.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        levels_[r] = (2.0 * static_cast<double>(r) - static_cast<double>(n) + 1.0) * spacing_ / 2.0;
    }

    gray_of_level_.resize(n);
    level_of_gray_.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto g = static_cast<std::uint32_t>(r ^ (r >> 1));
        gray_of_level_[r] = g;
        level_of_gray_[g] = r;
    }

    points_.resize(order_);
    for (std::uint32_t label = 0; label < order_; ++label) {
        const std::size_t li = level_of_gray_[label >> bits_per_axis_];
        const std::size_t lq = level_of_gray_[label & ((1U << bits_per_axis_) - 1)];
        points_[label] = {levels_[li], levels_[lq]};
    }
}

Complex QamConstellation::point(std::uint32_t label) const {
    if (label >= order_) throw DomainError("label out of range");
    return points_[label];
}

std::uint32_t QamConstellation::label_of_levels(std::size_t level_i, std::size_t level_q) const {
    return (gray_of_level_.at(level_i) << bits_per_axis_) | gray_of_level_.at(level_q);
}

CVector QamConstellation::map_bits(std::span<const std::uint8_t> bits) const {
    if (bits.size() % bits_ != 0) {
        throw InputShapeError("bit count " + std::to_string(bits.size()) +
                              " is not a multiple of " + std::to_string(bits_));
    }
    CVector out(bits.size() / bits_);
    map_bits(bits, out);
    return out;
}

void QamConstellation::map_bits(std::span<const std::uint8_t> bits, std::span<Complex> out) const {
    if (bits.size() != out.size() * bits_) {
        throw InputShapeError("bit count " + std::to_string(bits.size()) + " does not fill " +
                              std::to_string(out.size()) + " symbols of " + std::to_string(bits_) +
                              " bits");
    }
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::uint32_t label = 0;
        for (unsigned b = 0; b < bits_; ++b) label = (label << 1) | (bits[s * bits_ + b] & 1U);
        out[s] = points_[label];
    }
}

std::size_t QamConstellation::decide_level(double x) const {
    const double t = (x - levels_.front()) / spacing_;
    // ceil(t - 0.5) sends exact midpoints to the lower level.
    const double idx = std::ceil(t - 0.5);
    if (idx <= 0.0) return 0;
    const auto top = static_cast<double>(levels_.size() - 1);
    if (idx >= top) return levels_.size() - 1;
    return static_cast<std::size_t>(idx);
}

QamConstellation::Decision QamConstellation::hard_decide(Complex received) const {
    if (!std::isfinite(received.real()) || !std::isfinite(received.imag())) {
        throw DomainError("hard_decide: non-finite input");
    }
    const std::size_t li = decide_level(received.real());
    const std::size_t lq = decide_level(received.imag());
    return {Complex(levels_[li], levels_[lq]), label_of_levels(li, lq), li, lq};
}

void QamConstellation::label_bits(std::uint32_t label, std::span<std::uint8_t> out) const {
    require_size(out.size(), bits_, "label_bits");
    for (unsigned b = 0; b < bits_; ++b) {
        out[b] = static_cast<std::uint8_t>((label >> (bits_ - 1 - b)) & 1U);
    }
}

double decide_prob(std::size_t decided, std::size_t sent, double sigma,
                   const QamConstellation& constellation) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("decide_prob: sigma must be positive and finite");
    }
    const auto& s = constellation.pam_levels();
    if (decided >= s.size() || sent >= s.size()) throw DomainError("decide_prob: level index out of range");

    const double half = constellation.spacing() / 2.0;
    const double delta = s[decided] - s[sent];
    const double lo = (delta - half) / sigma;
    const double hi = (delta + half) / sigma;
    const std::size_t last = s.size() - 1;
    // 1 - Q(x) is written as Q(-x) so far-tail probabilities keep full precision.
    if (decided == 0) return q_function(-hi);
    if (decided == last) return q_function(lo);
    if (lo >= 0.0) return q_function(lo) - q_function(hi);
    if (hi <= 0.0) return q_function(-hi) - q_function(-lo);
    return 1.0 - q_function(hi) - q_function(-lo);
}

}  // namespace cdjcs
