// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdjcs/errors.hpp"

namespace cdjcs {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using Bits = std::vector<std::uint8_t>;

inline constexpr double kPi = 3.14159265358979323846;

/// Dense complex matrix, column-major. Rows index subcarriers, columns index
/// OFDM symbols, so one symbol is a contiguous column.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols, Complex fill = {})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept {
        return data_[c * rows_ + r];
    }

    std::span<Complex> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
    std::span<const Complex> col(std::size_t c) const noexcept {
        return {data_.data() + c * rows_, rows_};
    }

    std::span<Complex> flat() noexcept { return data_; }
    std::span<const Complex> flat() const noexcept { return data_; }

    bool same_shape(const CMatrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

inline double energy(std::span<const Complex> v) noexcept {
    double e = 0.0;
    for (const auto& x : v) e += std::norm(x);
    return e;
}

inline void require_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw InputShapeError(std::string(what) + ": expected length " + std::to_string(want) +
                              ", got " + std::to_string(got));
    }
}

}  // namespace cdjcs
