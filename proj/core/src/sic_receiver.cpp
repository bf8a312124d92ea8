// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/sic_receiver.hpp"

#include <cmath>
#include <ostream>

namespace cdjcs {

double transmit_amplitude(double power, const CodeBook& book) {
    if (!(power >= 0.0)) throw DomainError("transmit power must be non-negative");
    if (book.is_identity()) return std::sqrt(power);
    return std::sqrt(power * static_cast<double>(book.subcarriers()) /
                     static_cast<double>(book.channels()));
}

CVector equalize(std::span<const Complex> y, std::span<const Complex> h, std::size_t symbol,
                 double threshold) {
    require_size(h.size(), y.size(), "channel response");
    CVector out(y.size());
    const double floor2 = threshold * threshold;
    for (std::size_t m = 0; m < y.size(); ++m) {
        if (std::norm(h[m]) < floor2) throw DeepFadeError(m, symbol);
        out[m] = y[m] / h[m];
    }
    return out;
}

namespace {

SymbolDecisions decide_all(CVector soft, const QamConstellation& qam) {
    SymbolDecisions out;
    out.symbols.resize(soft.size());
    out.labels.resize(soft.size());
    out.bits.resize(soft.size() * qam.bits_per_symbol());
    for (std::size_t k = 0; k < soft.size(); ++k) {
        const auto d = qam.hard_decide(soft[k]);
        out.symbols[k] = d.point;
        out.labels[k] = d.label;
        qam.label_bits(d.label, std::span(out.bits).subspan(k * qam.bits_per_symbol(),
                                                            qam.bits_per_symbol()));
    }
    out.soft = std::move(soft);
    return out;
}

CVector subtract_rebuilt(std::span<const Complex> y, std::span<const Complex> h,
                         const CVector& rebuilt) {
    require_size(h.size(), y.size(), "channel response");
    CVector r(y.size());
    for (std::size_t m = 0; m < y.size(); ++m) r[m] = y[m] - h[m] * rebuilt[m];
    return r;
}

template <typename Receiver>
BlockOutput run_block_impl(const Receiver& rx, std::size_t channels, const CMatrix& received,
                           const CMatrix& h_comm, const std::optional<BlockTruth>& truth) {
    if (!received.same_shape(h_comm)) {
        throw InputShapeError("received block and channel block differ in shape");
    }
    const std::size_t ms = received.cols();
    const std::size_t bps = rx.constellation().bits_per_symbol();
    const std::size_t bits_per_ofdm = channels * bps;

    if (truth) {
        if (truth->bits) require_size(truth->bits->size(), bits_per_ofdm * ms, "truth bits");
        if (truth->symbols && (truth->symbols->rows() != channels || truth->symbols->cols() != ms)) {
            throw InputShapeError("truth symbol block has the wrong shape");
        }
    }

    BlockOutput out;
    out.bits.resize(bits_per_ofdm * ms);
    out.symbols = CMatrix(channels, ms);
    out.residual = CMatrix(received.rows(), ms);
    out.diagnostics.resize(ms);

    for (std::size_t i = 0; i < ms; ++i) {
        const auto y = received.col(i);
        const auto h = h_comm.col(i);
        auto dec = rx.demodulate_comm(y, h, i);
        auto residual = rx.cancel(y, h, dec.symbols);

        std::copy(dec.bits.begin(), dec.bits.end(),
                  out.bits.begin() + static_cast<std::ptrdiff_t>(i * bits_per_ofdm));
        std::copy(dec.symbols.begin(), dec.symbols.end(), out.symbols.col(i).begin());
        std::copy(residual.begin(), residual.end(), out.residual.col(i).begin());

        auto& diag = out.diagnostics[i];
        diag.symbol = i;
        diag.residual_energy = energy(residual);
        if (truth && truth->bits) {
            const auto* ref = truth->bits->data() + i * bits_per_ofdm;
            for (std::size_t b = 0; b < bits_per_ofdm; ++b) diag.bit_errors += ref[b] != dec.bits[b];
            out.bit_errors += diag.bit_errors;
        }
        if (truth && truth->symbols) {
            CVector err(channels);
            const auto sent = truth->symbols->col(i);
            for (std::size_t k = 0; k < channels; ++k) err[k] = sent[k] - dec.symbols[k];
            diag.error_energy = energy(err);
            if (diag.error_energy > 0.0) {
                const auto leak = rx.transmit(err);
                for (std::size_t m = 0; m < leak.size(); ++m) {
                    diag.error_prop_energy += std::norm(h[m] * leak[m]);
                }
            }
        }
    }
    return out;
}

}  // namespace

SicReceiver::SicReceiver(CodeBook book, QamConstellation constellation, double power)
    : book_(std::move(book)), qam_(std::move(constellation)), amplitude_(transmit_amplitude(power, book_)) {
    if (!(amplitude_ > 0.0)) throw DomainError("receiver needs a positive transmit power");
}

CVector SicReceiver::transmit(std::span<const Complex> d) const {
    auto x = book_.spread(d);
    for (auto& v : x) v *= amplitude_;
    return x;
}

SymbolDecisions SicReceiver::demodulate_comm(std::span<const Complex> y, std::span<const Complex> h,
                                             std::size_t symbol) const {
    require_size(y.size(), book_.subcarriers(), "received symbol");
    auto soft = book_.despread(equalize(y, h, symbol));
    for (auto& v : soft) v /= amplitude_;
    return decide_all(std::move(soft), qam_);
}

CVector SicReceiver::cancel(std::span<const Complex> y, std::span<const Complex> h,
                            std::span<const Complex> decided) const {
    return subtract_rebuilt(y, h, transmit(decided));
}

BlockOutput SicReceiver::run_block(const CMatrix& received, const CMatrix& h_comm,
                                   const std::optional<BlockTruth>& truth) const {
    require_size(received.rows(), book_.subcarriers(), "received block rows");
    return run_block_impl(*this, book_.channels(), received, h_comm, truth);
}

OfdmSicReceiver::OfdmSicReceiver(QamConstellation constellation, double power)
    : qam_(std::move(constellation)), amplitude_(std::sqrt(power)) {
    if (!(amplitude_ > 0.0)) throw DomainError("receiver needs a positive transmit power");
}

CVector OfdmSicReceiver::transmit(std::span<const Complex> d) const {
    CVector x(d.begin(), d.end());
    for (auto& v : x) v *= amplitude_;
    return x;
}

SymbolDecisions OfdmSicReceiver::demodulate_comm(std::span<const Complex> y,
                                                 std::span<const Complex> h,
                                                 std::size_t symbol) const {
    auto soft = equalize(y, h, symbol);
    for (auto& v : soft) v /= amplitude_;
    return decide_all(std::move(soft), qam_);
}

CVector OfdmSicReceiver::cancel(std::span<const Complex> y, std::span<const Complex> h,
                                std::span<const Complex> decided) const {
    return subtract_rebuilt(y, h, transmit(decided));
}

BlockOutput OfdmSicReceiver::run_block(const CMatrix& received, const CMatrix& h_comm,
                                       const std::optional<BlockTruth>& truth) const {
    return run_block_impl(*this, received.rows(), received, h_comm, truth);
}

void write_diagnostics_csv(std::ostream& os, std::size_t trial,
                           const std::vector<SymbolDiagnostics>& diagnostics, bool header) {
    if (header) os << "trial,symbol,bit_errors,residual_energy,error_prop_energy\n";
    const auto old = os.precision(17);
    for (const auto& d : diagnostics) {
        os << trial << ',' << d.symbol << ',' << d.bit_errors << ',' << d.residual_energy << ','
           << d.error_prop_energy << '\n';
    }
    os.precision(old);
}

}  // namespace cdjcs
