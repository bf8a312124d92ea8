// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/radar_estimator.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace cdjcs {

CMatrix reference_divide(const CMatrix& residual, const CMatrix& tx_reference, double threshold) {
    if (!residual.same_shape(tx_reference)) {
        throw InputShapeError("residual and reference blocks differ in shape");
    }
    CMatrix out(residual.rows(), residual.cols());
    for (std::size_t i = 0; i < residual.cols(); ++i) {
        for (std::size_t m = 0; m < residual.rows(); ++m) {
            const Complex ref = tx_reference(m, i);
            if (std::abs(ref) < threshold) throw ZeroReferenceError(m, i);
            out(m, i) = residual(m, i) / ref;
        }
    }
    return out;
}

RadarImage periodogram(const CMatrix& div) {
    const std::size_t nc = div.rows();
    const std::size_t ms = div.cols();
    CMatrix work = div;
    for (std::size_t i = 0; i < ms; ++i) ifft_unitary(work.col(i));

    RadarImage image;
    image.delay_bins = nc;
    image.doppler_bins = ms;
    image.magnitude.resize(nc * ms);
    CVector row(ms);
    for (std::size_t r = 0; r < nc; ++r) {
        for (std::size_t i = 0; i < ms; ++i) row[i] = work(r, i);
        fft_unitary(row);
        for (std::size_t i = 0; i < ms; ++i) image.magnitude[i * nc + r] = std::abs(row[i]);
    }
    return image;
}

namespace {

// Dirichlet-kernel neighbour ratio: for a tone at k + δ the larger neighbour
// has magnitude ratio r ≈ |δ| / (1 - |δ|), so |δ| = r / (1 + r).
double refine(double left, double peak, double right) {
    if (!(peak > 0.0)) return 0.0;
    if (right >= left) {
        const double r = right / peak;
        return r / (1.0 + r);
    }
    const double r = left / peak;
    return -r / (1.0 + r);
}

std::size_t wrap(std::size_t k, std::ptrdiff_t step, std::size_t n) {
    return static_cast<std::size_t>((static_cast<std::ptrdiff_t>(k) + step + static_cast<std::ptrdiff_t>(n)) %
                                    static_cast<std::ptrdiff_t>(n));
}

std::size_t apply_rounding(std::size_t k, double offset, std::size_t n, PeakRounding rounding,
                           double tol) {
    if (rounding == PeakRounding::floor && offset < -tol) return wrap(k, -1, n);
    return k;
}

}  // namespace

PeakIndices peak_search(const RadarImage& image, PeakRounding rounding, double snap_tolerance) {
    const std::size_t nr = image.delay_bins;
    const std::size_t nd = image.doppler_bins;
    if (nr == 0 || nd == 0) throw InputShapeError("empty radar image");

    // Scan in lexicographic (delay, doppler) order; strict '>' keeps the first maximum.
    std::size_t best_r = 0;
    std::size_t best_d = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t d = 0; d < nd; ++d) {
            const double v = image(r, d);
            if (v > best) {
                best = v;
                best_r = r;
                best_d = d;
            }
        }
    }

    PeakIndices p;
    p.argmax_delay = best_r;
    p.argmax_doppler = best_d;
    if (nr > 1) {
        p.delay_offset = refine(image(wrap(best_r, -1, nr), best_d), best,
                                image(wrap(best_r, 1, nr), best_d));
    }
    if (nd > 1) {
        p.doppler_offset = refine(image(best_r, wrap(best_d, -1, nd)), best,
                                  image(best_r, wrap(best_d, 1, nd)));
    }
    p.delay = apply_rounding(best_r, p.delay_offset, nr, rounding, snap_tolerance);
    p.doppler = apply_rounding(best_d, p.doppler_offset, nd, rounding, snap_tolerance);
    return p;
}

RadarEstimate to_physical(std::size_t delay_bin, std::size_t doppler_bin, const OfdmParams& params,
                          double carrier_hz, double speed_of_light) {
    RadarEstimate e;
    e.delay_bin = delay_bin;
    e.doppler_bin = doppler_bin;
    const auto ms = static_cast<std::ptrdiff_t>(params.symbols_per_block);
    auto signed_doppler = static_cast<std::ptrdiff_t>(doppler_bin);
    if (signed_doppler > ms / 2) signed_doppler -= ms;
    e.tau_s = static_cast<double>(delay_bin) / params.bandwidth_hz();
    e.doppler_hz = static_cast<double>(signed_doppler) /
                   (params.frame_time_s() * static_cast<double>(params.symbols_per_block));
    e.range_m = e.tau_s * speed_of_light / 2.0;
    e.velocity_mps = e.doppler_hz * speed_of_light / (2.0 * carrier_hz);
    return e;
}

double peak_to_floor_db(const RadarImage& image, std::size_t delay_bin, std::size_t doppler_bin) {
    const std::size_t nr = image.delay_bins;
    const std::size_t nd = image.doppler_bins;
    auto near = [](std::size_t a, std::size_t b, std::size_t n) {
        const std::size_t d = a > b ? a - b : b - a;
        return d <= 1 || d + 1 == n;
    };
    double floor_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t r = 0; r < nr; ++r) {
            if (near(r, delay_bin, nr) && near(d, doppler_bin, nd)) continue;
            const double v = image(r, d);
            floor_sum += v * v;
            ++count;
        }
    }
    const double peak = image(delay_bin, doppler_bin);
    if (count == 0 || floor_sum <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / (floor_sum / static_cast<double>(count)));
}

RadarEstimate estimate(const CMatrix& residual, const CMatrix& tx_reference, const OfdmParams& params,
                       double carrier_hz, double speed_of_light, PeakRounding rounding,
                       RadarImage* image_out) {
    const auto image = periodogram(reference_divide(residual, tx_reference));
    const auto peak = peak_search(image, rounding);
    auto e = to_physical(peak.delay, peak.doppler, params, carrier_hz, speed_of_light);
    e.peak_to_floor_db = peak_to_floor_db(image, peak.argmax_delay, peak.argmax_doppler);
    if (image_out) *image_out = image;
    return e;
}

void write_image_csv(const std::filesystem::path& path, const RadarImage& image) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << "delay_bin,doppler_bin,magnitude\n";
    os.precision(17);
    for (std::size_t d = 0; d < image.doppler_bins; ++d) {
        for (std::size_t r = 0; r < image.delay_bins; ++r) {
            os << r << ',' << d << ',' << image(r, d) << '\n';
        }
    }
}

}  // namespace cdjcs
