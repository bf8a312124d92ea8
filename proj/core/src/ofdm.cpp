// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/ofdm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <utility>

namespace cdjcs {

std::size_t OfdmParams::cp_samples() const noexcept {
    return static_cast<std::size_t>(std::llround(cp_time_s * bandwidth_hz()));
}

void OfdmParams::validate() const {
    if (subcarriers == 0) throw DomainError("subcarrier count must be positive");
    if (symbols_per_block == 0) throw DomainError("symbols per block must be positive");
    if (!(subcarrier_spacing_hz > 0.0) || !std::isfinite(subcarrier_spacing_hz)) {
        throw DomainError("subcarrier spacing must be positive");
    }
    if (!(cp_time_s >= 0.0) || !std::isfinite(cp_time_s)) {
        throw DomainError("cyclic prefix time must be non-negative");
    }
}

CMatrix dft_matrix(std::size_t n) {
    CMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t m = 0; m < n; ++m) {
            // Reduce m*q mod n first so large products keep full phase precision.
            const auto k = static_cast<double>((m * q) % n);
            f(m, q) = std::polar(scale, -2.0 * kPi * k / static_cast<double>(n));
        }
    }
    return f;
}

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* buf = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void run_fft(std::span<Complex> v, int sign) {
    if (v.empty()) return;
    auto plan = PlanCache::instance().get(v.size(), sign);
    auto* p = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(plan, p, p);
    const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
    for (auto& x : v) x *= scale;
}

}  // namespace

void fft_unitary(std::span<Complex> v) { run_fft(v, FFTW_FORWARD); }
void ifft_unitary(std::span<Complex> v) { run_fft(v, FFTW_BACKWARD); }

CVector modulate(std::span<const Complex> freq_symbols, const OfdmParams& params) {
    require_size(freq_symbols.size(), params.subcarriers, "modulate input");
    const std::size_t nc = params.subcarriers;
    const std::size_t cp = params.cp_samples();
    if (cp > nc) throw DomainError("cyclic prefix longer than the symbol body");
    CVector out(cp + nc);
    std::copy(freq_symbols.begin(), freq_symbols.end(), out.begin() + static_cast<std::ptrdiff_t>(cp));
    ifft_unitary(std::span<Complex>(out).subspan(cp));
    std::copy(out.end() - static_cast<std::ptrdiff_t>(cp), out.end(), out.begin());
    return out;
}

CVector demodulate(std::span<const Complex> samples, const OfdmParams& params) {
    const std::size_t cp = params.cp_samples();
    require_size(samples.size(), params.subcarriers + cp, "demodulate input");
    CVector body(samples.begin() + static_cast<std::ptrdiff_t>(cp), samples.end());
    fft_unitary(body);
    return body;
}

namespace {

constexpr char kMagic[4] = {'C', 'D', 'J', 'W'};
constexpr std::uint32_t kWaveformVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw InputShapeError("waveform file truncated");
    return v;
}

}  // namespace

void write_waveform(const std::filesystem::path& path, const FrameBlock& block,
                    const OfdmParams& params) {
    require_size(block.rows(), params.subcarriers, "waveform block rows");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kWaveformVersion);
    put<std::uint64_t>(os, params.subcarriers);
    put<std::uint64_t>(os, params.cp_samples());
    put<std::uint64_t>(os, block.cols());
    put<double>(os, params.bandwidth_hz());
    for (std::size_t i = 0; i < block.cols(); ++i) {
        for (const auto& s : modulate(block.col(i), params)) {
            put<double>(os, s.real());
            put<double>(os, s.imag());
        }
    }
}

Waveform read_waveform(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw InputShapeError("not a waveform file");
    if (get<std::uint32_t>(is) != kWaveformVersion) throw InputShapeError("unsupported waveform version");
    Waveform w;
    w.subcarriers = get<std::uint64_t>(is);
    w.cp_samples = get<std::uint64_t>(is);
    w.symbols = get<std::uint64_t>(is);
    w.sample_rate_hz = get<double>(is);
    const std::uint64_t n = (w.subcarriers + w.cp_samples) * w.symbols;
    w.samples.resize(n);
    for (auto& s : w.samples) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        s = {re, im};
    }
    return w;
}

}  // namespace cdjcs
