// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/spreading.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace cdjcs {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

namespace {

template <typename T>
void fwht_impl(std::span<T> v) {
    const std::size_t n = v.size();
    if (!is_power_of_two(n)) throw InputShapeError("fwht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const T a = v[j];
                const T b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

std::size_t ilog2(std::size_t n) {
    std::size_t k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

}  // namespace

void fwht(std::span<Complex> v) { fwht_impl(v); }
void fwht(std::span<std::int64_t> v) { fwht_impl(v); }

CodeBook::CodeBook(std::size_t nc, std::vector<std::size_t> idx, bool identity)
    : nc_(nc),
      indices_(std::move(idx)),
      identity_(identity),
      scale_(identity ? 1.0 : 1.0 / std::sqrt(static_cast<double>(nc))) {
    if (!identity_ && !use_fast_transform()) {
        columns_.resize(indices_.size() * nc_);
        for (std::size_t k = 0; k < indices_.size(); ++k) {
            for (std::size_t m = 0; m < nc_; ++m) {
                columns_[k * nc_ + m] = (std::popcount(m & indices_[k]) & 1) ? -scale_ : scale_;
            }
        }
    }
}

CodeBook CodeBook::hadamard(std::size_t n_subcarriers, std::vector<std::size_t> indices) {
    if (!is_power_of_two(n_subcarriers)) {
        throw ConstructionError("Hadamard order " + std::to_string(n_subcarriers) +
                                " is not a power of two");
    }
    if (indices.empty() || indices.size() > n_subcarriers) {
        throw InputShapeError("number of code channels must be in [1, " +
                              std::to_string(n_subcarriers) + "]");
    }
    std::vector<std::size_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InputShapeError("duplicate code channel index");
    }
    if (sorted.back() >= n_subcarriers) {
        throw InputShapeError("code channel index " + std::to_string(sorted.back()) +
                              " out of range");
    }
    return CodeBook(n_subcarriers, std::move(indices), false);
}

CodeBook CodeBook::hadamard(std::size_t n_subcarriers, std::size_t n_channels) {
    std::vector<std::size_t> idx(n_channels);
    for (std::size_t k = 0; k < n_channels; ++k) idx[k] = k;
    return hadamard(n_subcarriers, std::move(idx));
}

CodeBook CodeBook::identity(std::size_t n_subcarriers) {
    if (n_subcarriers == 0) throw InputShapeError("identity code book needs at least one subcarrier");
    std::vector<std::size_t> idx(n_subcarriers);
    for (std::size_t k = 0; k < n_subcarriers; ++k) idx[k] = k;
    return CodeBook(n_subcarriers, std::move(idx), true);
}

int CodeBook::chip(std::size_t m, std::size_t k) const {
    const std::size_t col = indices_.at(k);
    if (identity_) return m == col ? 1 : 0;
    return (std::popcount(m & col) & 1) ? -1 : 1;
}

double CodeBook::entry(std::size_t m, std::size_t k) const { return scale_ * chip(m, k); }

bool CodeBook::use_fast_transform() const noexcept {
    return !identity_ && indices_.size() > ilog2(nc_);
}

CVector CodeBook::spread(std::span<const Complex> d) const {
    CVector out(nc_);
    spread(d, out);
    return out;
}

void CodeBook::spread(std::span<const Complex> d, std::span<Complex> out) const {
    require_size(d.size(), indices_.size(), "spread input");
    require_size(out.size(), nc_, "spread output");
    if (identity_) {
        std::copy(d.begin(), d.end(), out.begin());
        return;
    }
    if (use_fast_transform()) {
        std::fill(out.begin(), out.end(), Complex{});
        for (std::size_t k = 0; k < d.size(); ++k) out[indices_[k]] = d[k];
        fwht(out);
        for (auto& x : out) x *= scale_;
        return;
    }
    std::fill(out.begin(), out.end(), Complex{});
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double* c = columns_.data() + k * nc_;
        const Complex dk = d[k];
        for (std::size_t m = 0; m < nc_; ++m) out[m] += c[m] * dk;
    }
}

CVector CodeBook::despread(std::span<const Complex> y) const {
    CVector out(indices_.size());
    despread(y, out);
    return out;
}

void CodeBook::despread(std::span<const Complex> y, std::span<Complex> out) const {
    require_size(y.size(), nc_, "despread input");
    require_size(out.size(), indices_.size(), "despread output");
    if (identity_) {
        std::copy(y.begin(), y.end(), out.begin());
        return;
    }
    if (use_fast_transform()) {
        CVector work(y.begin(), y.end());
        fwht(work);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = work[indices_[k]] * scale_;
        return;
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double* c = columns_.data() + k * nc_;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t m = 0; m < nc_; ++m) {
            re += c[m] * y[m].real();
            im += c[m] * y[m].imag();
        }
        out[k] = {re, im};
    }
}

CodeBook build_hadamard(std::size_t n_subcarriers, std::size_t n_channels,
                        const std::optional<std::vector<std::size_t>>& selection) {
    if (selection) {
        if (selection->size() != n_channels) {
            throw InputShapeError("selection lists " + std::to_string(selection->size()) +
                                  " columns but " + std::to_string(n_channels) + " were requested");
        }
        return CodeBook::hadamard(n_subcarriers, *selection);
    }
    return CodeBook::hadamard(n_subcarriers, n_channels);
}

double cdm_gain_db(std::size_t n_subcarriers, std::size_t n_channels) {
    return 10.0 * std::log10(static_cast<double>(n_subcarriers) / static_cast<double>(n_channels));
}

namespace {

// Integer image of the spread vector: entries are in units of (a/2) times the
// code book scale, so every PAM level is an odd integer.
class IntegerSpreader {
public:
    IntegerSpreader(const CodeBook& book, const QamConstellation& qam)
        : book_(book),
          re_(book.subcarriers()),
          im_(book.subcarriers()),
          fast_(!book.is_identity() && book.channels() > ilog2(book.subcarriers())) {
        const auto& levels = qam.pam_levels();
        odd_.resize(levels.size());
        for (std::size_t r = 0; r < levels.size(); ++r) {
            odd_[r] = 2 * static_cast<std::int64_t>(r) - static_cast<std::int64_t>(levels.size()) + 1;
        }
        lvl_i_.resize(qam.order());
        lvl_q_.resize(qam.order());
        for (std::uint32_t label = 0; label < qam.order(); ++label) {
            const auto d = qam.hard_decide(qam.point(label));
            lvl_i_[label] = d.level_i;
            lvl_q_[label] = d.level_q;
        }
        unit_ = qam.spacing() / 2.0 *
                (book.is_identity() ? 1.0 : 1.0 / std::sqrt(static_cast<double>(book.subcarriers())));
    }

    // Fills re_/im_ for the symbol labels.
    void evaluate(std::span<const std::uint32_t> labels) {
        const std::size_t nc = book_.subcarriers();
        const auto& idx = book_.channel_indices();
        if (book_.is_identity()) {
            for (std::size_t m = 0; m < nc; ++m) {
                re_[m] = odd_[lvl_i_[labels[m]]];
                im_[m] = odd_[lvl_q_[labels[m]]];
            }
            return;
        }
        if (fast_) {
            std::fill(re_.begin(), re_.end(), 0);
            std::fill(im_.begin(), im_.end(), 0);
            for (std::size_t k = 0; k < labels.size(); ++k) {
                re_[idx[k]] = odd_[lvl_i_[labels[k]]];
                im_[idx[k]] = odd_[lvl_q_[labels[k]]];
            }
            fwht(std::span<std::int64_t>(re_));
            fwht(std::span<std::int64_t>(im_));
            return;
        }
        for (std::size_t m = 0; m < nc; ++m) {
            std::int64_t r = 0;
            std::int64_t i = 0;
            for (std::size_t k = 0; k < labels.size(); ++k) {
                const int c = book_.chip(m, k);
                r += c * odd_[lvl_i_[labels[k]]];
                i += c * odd_[lvl_q_[labels[k]]];
            }
            re_[m] = r;
            im_[m] = i;
        }
    }

    // Returns the first zero row, updating the running minimum magnitude.
    std::optional<std::size_t> scan(double& min_abs) const {
        std::optional<std::size_t> zero_row;
        std::int64_t min_norm = std::numeric_limits<std::int64_t>::max();
        for (std::size_t m = 0; m < re_.size(); ++m) {
            const std::int64_t n = re_[m] * re_[m] + im_[m] * im_[m];
            if (n < min_norm) {
                min_norm = n;
                if (n == 0 && !zero_row) zero_row = m;
            }
        }
        min_abs = std::min(min_abs, std::sqrt(static_cast<double>(min_norm)) * unit_);
        return zero_row;
    }

private:
    const CodeBook& book_;
    std::vector<std::int64_t> re_;
    std::vector<std::int64_t> im_;
    std::vector<std::int64_t> odd_;
    std::vector<std::size_t> lvl_i_;
    std::vector<std::size_t> lvl_q_;
    bool fast_;
    double unit_ = 1.0;
};

}  // namespace

ZeroFreeReport check_zero_free(const CodeBook& book, const QamConstellation& constellation,
                               ZeroSearchMode mode, std::uint64_t trials, Rng* rng,
                               std::uint64_t budget) {
    ZeroFreeReport report;
    report.mode = mode;
    report.min_abs_entry = std::numeric_limits<double>::infinity();

    const std::size_t nc_channels = book.channels();
    const std::uint32_t order = constellation.order();
    IntegerSpreader spreader(book, constellation);
    std::vector<std::uint32_t> labels(nc_channels, 0);

    auto visit = [&]() {
        spreader.evaluate(labels);
        ++report.vectors_checked;
        if (auto row = spreader.scan(report.min_abs_entry); row && report.zero_free) {
            report.zero_free = false;
            report.witness_labels = labels;
            report.witness_row = *row;
        }
    };

    if (mode == ZeroSearchMode::exhaustive) {
        // order^NC with overflow-safe comparison against the budget.
        std::uint64_t combos = 1;
        for (std::size_t k = 0; k < nc_channels; ++k) {
            if (combos > budget / order) {
                throw BudgetError("exhaustive search over " + std::to_string(order) + "^" +
                                  std::to_string(nc_channels) + " vectors exceeds budget " +
                                  std::to_string(budget));
            }
            combos *= order;
        }
        for (std::uint64_t n = 0; n < combos; ++n) {
            visit();
            for (std::size_t k = 0; k < nc_channels; ++k) {
                if (++labels[k] < order) break;
                labels[k] = 0;
            }
        }
        return report;
    }

    if (rng == nullptr) throw DomainError("randomized zero search needs a random generator");
    // The order is a power of two, so slicing each 64-bit draw into label-sized
    // fields keeps the labels uniform.
    const unsigned width = constellation.bits_per_symbol();
    const unsigned per_word = 64 / width;
    const std::uint64_t mask = order - 1;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::uint64_t word = 0;
        unsigned left = 0;
        for (auto& l : labels) {
            if (left == 0) {
                word = (*rng)();
                left = per_word;
            }
            l = static_cast<std::uint32_t>(word & mask);
            word >>= width;
            --left;
        }
        visit();
    }
    return report;
}

}  // namespace cdjcs
