// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "cdjcs/channel.hpp"
#include "cdjcs/version.hpp"

namespace cdjcs {

namespace {

// Transmit/receive endpoint of one user: either a code-division chain or plain OFDM.
class Endpoint {
public:
    Endpoint(const SimConfig& c, Scheme scheme, std::size_t channels, std::size_t first_column,
             double power, const QamConstellation& qam) {
        if (scheme == Scheme::cd_ofdm) {
            std::vector<std::size_t> columns(channels);
            for (std::size_t k = 0; k < channels; ++k) columns[k] = first_column + k;
            auto book = c.codebook == CodebookKind::identity
                            ? CodeBook::identity(c.ofdm.subcarriers)
                            : CodeBook::hadamard(c.ofdm.subcarriers, std::move(columns));
            cd_.emplace(std::move(book), qam, power);
            channels_ = cd_->book().channels();
        } else {
            plain_.emplace(qam, power);
            channels_ = c.ofdm.subcarriers;
        }
    }

    std::size_t channels() const noexcept { return channels_; }

    CVector transmit(std::span<const Complex> d) const {
        return cd_ ? cd_->transmit(d) : plain_->transmit(d);
    }

    BlockOutput run_block(const CMatrix& y, const CMatrix& h, const BlockTruth& truth) const {
        return cd_ ? cd_->run_block(y, h, truth) : plain_->run_block(y, h, truth);
    }

private:
    std::optional<SicReceiver> cd_;
    std::optional<OfdmSicReceiver> plain_;
    std::size_t channels_ = 0;
};

}  // namespace

struct BlockSimulator::Impl {
    SimConfig cfg;
    Scheme scheme;
    QamConstellation qam;
    BeamformingSet beams;
    double los_gain;
    Endpoint self;  // sensing user, transmits the radar reference
    Endpoint peer;  // communicating user

    Impl(const SimConfig& c, Scheme s)
        : cfg(c),
          scheme(s),
          qam(c.constellation_order),
          beams(conjugate_beams(c.geometry)),
          los_gain(los_comm_power_gain(c.geometry, beams)),
          self(c, s, c.nc1, c.code_assignment == CodeAssignment::disjoint ? c.nc2 : 0, c.p1, qam),
          peer(c, s, c.nc2, 0, c.p2, qam) {}

    // Draws bits for one user and returns (bits, symbols, transmit block).
    void draw_user(const Endpoint& ep, Rng& rng, Bits& bits, CMatrix& symbols, CMatrix& tx) const {
        const std::size_t ms = cfg.ofdm.symbols_per_block;
        const std::size_t bps = qam.bits_per_symbol();
        bits.resize(ep.channels() * bps * ms);
        random_bits(rng, bits);
        symbols = CMatrix(ep.channels(), ms);
        tx = CMatrix(cfg.ofdm.subcarriers, ms);
        for (std::size_t i = 0; i < ms; ++i) {
            qam.map_bits(std::span<const std::uint8_t>(bits).subspan(i * ep.channels() * bps,
                                                                       ep.channels() * bps),
                         symbols.col(i));
            const auto x = ep.transmit(symbols.col(i));
            std::copy(x.begin(), x.end(), tx.col(i).begin());
        }
    }
};

BlockSimulator::BlockSimulator(const SimConfig& config, Scheme scheme)
    : impl_(std::make_unique<Impl>(config, scheme)) {}
BlockSimulator::~BlockSimulator() = default;
BlockSimulator::BlockSimulator(BlockSimulator&&) noexcept = default;
BlockSimulator& BlockSimulator::operator=(BlockSimulator&&) noexcept = default;

Scheme BlockSimulator::scheme() const noexcept { return impl_->scheme; }
std::size_t BlockSimulator::peer_channels() const noexcept { return impl_->peer.channels(); }

double BlockSimulator::noise_variance(double sinr_db) const {
    return impl_->cfg.p2 * impl_->los_gain / std::pow(10.0, sinr_db / 10.0);
}

BlockResult BlockSimulator::run(double sinr_db, std::uint64_t point, std::uint64_t trial,
                                const BlockOptions& options) const {
    const auto& c = impl_->cfg;
    const bool tdd = impl_->scheme == Scheme::tdd_ofdm;
    Rng rng = make_stream(c.seed, {point, trial});

    // Draw order: fading, peer bits, own bits, noise.
    const auto ch = realize(c.geometry, impl_->beams, c.ofdm, draw_path_gains(c.geometry, rng));

    Bits peer_bits, own_bits;
    CMatrix peer_symbols, own_symbols, x2, x1;
    impl_->draw_user(impl_->peer, rng, peer_bits, peer_symbols, x2);
    impl_->draw_user(impl_->self, rng, own_bits, own_symbols, x1);

    const std::size_t n = ch.comm.size();
    CMatrix echo(ch.radar.rows(), ch.radar.cols());
    {
        auto e = echo.flat();
        const auto hr = ch.radar.flat();
        const auto tx = x1.flat();
        for (std::size_t k = 0; k < n; ++k) e[k] = hr[k] * tx[k];
    }

    CMatrix y(ch.comm.rows(), ch.comm.cols());
    {
        auto yf = y.flat();
        const auto hc = ch.comm.flat();
        const auto tx = x2.flat();
        const auto e = echo.flat();
        for (std::size_t k = 0; k < n; ++k) yf[k] = hc[k] * tx[k] + (tdd ? Complex{} : e[k]);
    }
    const double nv = noise_variance(sinr_db);
    if (!options.noise_free) add_complex_noise(y.flat(), nv, rng);

    CMatrix radar_rx;
    if (tdd) {
        // Separate time slot: the echo is observed against noise only.
        radar_rx = echo;
        if (!options.noise_free) add_complex_noise(radar_rx.flat(), nv, rng);
    }

    BlockResult result;
    BlockOutput out;
    try {
        out = impl_->peer.run_block(y, ch.comm, BlockTruth{&peer_bits, &peer_symbols});
    } catch (const DeepFadeError&) {
        result.erased = true;
        return result;
    }

    result.bits = peer_bits.size();
    result.bit_errors = out.bit_errors;
    result.symbols = peer_symbols.size();
    for (const auto& d : out.diagnostics) {
        result.error_energy += d.error_energy;
        result.error_prop_energy += d.error_prop_energy;
    }

    CMatrix residual = tdd ? std::move(radar_rx) : std::move(out.residual);
    if (options.radar) {
        result.radar = estimate(residual, x1, c.ofdm, c.geometry.carrier_hz, c.geometry.speed_of_light,
                                c.peak_rounding);
    }
    if (options.diagnostics) result.diagnostics = std::move(out.diagnostics);
    if (options.keep_signals) {
        result.decided_bits = std::move(out.bits);
        result.residual = std::move(residual);
        result.radar_echo = std::move(echo);
        result.tx_reference = std::move(x1);
    }
    return result;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    // Lowest failing index wins, so the reported error does not depend on scheduling.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

namespace {

std::vector<Scheme> schemes_to_run(const SimConfig& c) {
    std::vector<Scheme> s{c.scheme};
    for (auto b : c.baselines) {
        if (std::find(s.begin(), s.end(), b) == s.end()) s.push_back(b);
    }
    return s;
}

void check_erasures(std::uint64_t erased, std::uint64_t blocks, double budget, double sinr_db) {
    if (static_cast<double>(erased) > budget * static_cast<double>(blocks)) {
        throw NumericalGuardError("deep-fade erasures (" + std::to_string(erased) + " of " +
                                  std::to_string(blocks) + " blocks at " + format_double(sinr_db) +
                                  " dB) exceed the erasure budget");
    }
}

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const ZeroReferenceError& e) {
        throw NumericalGuardError(e.what());
    }
}

}  // namespace

ExperimentResult run_ber_sweep(const SimConfig& config, const RunOptions& options) {
    config.validate();
    ExperimentResult result;
    const std::size_t bps = QamConstellation(config.constellation_order).bits_per_symbol();
    for (Scheme scheme : schemes_to_run(config)) {
        const BlockSimulator sim(config, scheme);
        const std::uint64_t bits_per_block =
            sim.peer_channels() * bps * config.ofdm.symbols_per_block;
        const std::uint64_t blocks = (config.ber_bits + bits_per_block - 1) / bits_per_block;
        for (std::size_t p = 0; p < config.sinr_db.size(); ++p) {
            const double g = config.sinr_db[p];
            std::vector<BlockResult> trials(blocks);
            guarded([&] {
                parallel_for(blocks, options.threads, [&](std::size_t t) { trials[t] = sim.run(g, p, t); });
                return 0;
            });
            std::uint64_t bits = 0, errors = 0, erased = 0;
            for (const auto& r : trials) {
                bits += r.bits;
                errors += r.bit_errors;
                erased += r.erased;
            }
            check_erasures(erased, blocks, config.erasure_budget, g);

            ResultRow row;
            row.scheme = to_string(scheme);
            row.nc = sim.peer_channels();
            row.metric = "ber";
            row.sinr_db = g;
            row.trials = bits;
            row.seed = config.seed;
            if (bits > 0) {
                const double ber = static_cast<double>(errors) / static_cast<double>(bits);
                row.value = ber;
                row.stderr_value = std::sqrt(ber * (1.0 - ber) / static_cast<double>(bits));
            }
            if (errors == 0 || row.stderr_value > config.ber_precision * row.value) {
                row.flags = "under-sampled";
            }
            if (erased > 0) row.flags += (row.flags.empty() ? "" : ";") + std::string("erasures");
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

ExperimentResult run_rmse_sweep(const SimConfig& config, const RunOptions& options) {
    config.validate();
    ExperimentResult result;
    const double r0 = config.geometry.paths.front().length_m;
    const double v0 = config.geometry.v_rel;
    for (Scheme scheme : schemes_to_run(config)) {
        const BlockSimulator sim(config, scheme);
        BlockOptions opt;
        opt.radar = true;
        for (std::size_t p = 0; p < config.sinr_db.size(); ++p) {
            const double g = config.sinr_db[p];
            std::vector<BlockResult> trials(config.trials);
            guarded([&] {
                parallel_for(config.trials, options.threads,
                             [&](std::size_t t) { trials[t] = sim.run(g, p, t, opt); });
                return 0;
            });

            std::vector<double> se_r, se_v;
            std::uint64_t erased = 0;
            for (const auto& r : trials) {
                if (r.erased || !r.radar) {
                    ++erased;
                    continue;
                }
                se_r.push_back(std::pow(r.radar->range_m - r0, 2));
                se_v.push_back(std::pow(r.radar->velocity_mps - v0, 2));
            }
            check_erasures(erased, config.trials, config.erasure_budget, g);

            auto emit = [&](const char* metric, const std::vector<double>& se) {
                ResultRow row;
                row.scheme = to_string(scheme);
                row.nc = sim.peer_channels();
                row.metric = metric;
                row.sinr_db = g;
                row.trials = se.size();
                row.seed = config.seed;
                if (!se.empty()) {
                    double mean = 0.0;
                    for (double v : se) mean += v;
                    mean /= static_cast<double>(se.size());
                    double var = 0.0;
                    for (double v : se) var += (v - mean) * (v - mean);
                    const double nn = static_cast<double>(se.size());
                    const double mse_err = se.size() > 1 ? std::sqrt(var / (nn - 1.0) / nn) : 0.0;
                    row.value = std::sqrt(mean);
                    // Delta method: d sqrt(x) = dx / (2 sqrt(x)).
                    row.stderr_value = row.value > 0.0 ? mse_err / (2.0 * row.value) : 0.0;
                }
                if (erased > 0) row.flags = "erasures";
                result.rows.push_back(std::move(row));
            };
            emit("range_rmse", se_r);
            emit("velocity_rmse", se_v);
        }
    }
    return result;
}

std::vector<AeppPoint> run_aepp(const SimConfig& config, const RunOptions& options) {
    config.validate();
    const std::size_t nc = config.ofdm.subcarriers;
    const QamConstellation qam(config.constellation_order);

    std::vector<std::size_t> channels = config.aepp_channels;
    if (std::find(channels.begin(), channels.end(), nc) == channels.end()) channels.push_back(nc);

    std::vector<AeppPoint> points;
    for (std::size_t ncode : channels) {
        SimConfig c = config;
        Scheme scheme = Scheme::ofdm;
        if (ncode != nc) {
            scheme = Scheme::cd_ofdm;
            c.codebook = CodebookKind::hadamard;
            c.nc2 = ncode;
        }
        const BlockSimulator sim(c, scheme);
        for (std::size_t p = 0; p < config.sinr_db.size(); ++p) {
            const double g = config.sinr_db[p];
            std::vector<BlockResult> trials(config.aepp_trials);
            parallel_for(config.aepp_trials, options.threads,
                         [&](std::size_t t) { trials[t] = sim.run(g, p, t); });
            double err = 0.0;
            std::uint64_t symbols = 0;
            for (const auto& r : trials) {
                err += r.error_energy;
                symbols += r.symbols;
            }
            AeppPoint pt;
            pt.scheme = to_string(scheme);
            pt.order = config.constellation_order;
            pt.subcarriers = nc;
            pt.channels = ncode;
            pt.sinr_db = g;
            pt.aepp_formula = aepp_separable(qam, sigma_from_sinr(sinr_map(g, nc, ncode)));
            pt.symbols = symbols;
            pt.aepp_montecarlo = symbols > 0 ? err / static_cast<double>(symbols) : 0.0;
            pt.rel_err = pt.aepp_formula > 0.0
                             ? std::abs(pt.aepp_montecarlo - pt.aepp_formula) / pt.aepp_formula
                             : 0.0;
            points.push_back(std::move(pt));
        }
    }
    return points;
}

RadarDemoResult run_radar_demo(const SimConfig& config, double sinr_db) {
    config.validate();
    const BlockSimulator sim(config, config.scheme);
    BlockOptions opt;
    opt.keep_signals = true;
    const auto block = sim.run(sinr_db, 0, 0, opt);
    if (block.erased) throw NumericalGuardError("deep fade in the demo block");

    RadarDemoResult r;
    r.sinr_db = sinr_db;
    guarded([&] {
        r.image = periodogram(reference_divide(block.residual, block.tx_reference));
        return 0;
    });
    r.peak = peak_search(r.image, config.peak_rounding);
    const auto& g = config.geometry;
    r.estimate = to_physical(r.peak.delay, r.peak.doppler, config.ofdm, g.carrier_hz, g.speed_of_light);
    r.estimate.peak_to_floor_db = peak_to_floor_db(r.image, r.peak.argmax_delay, r.peak.argmax_doppler);
    r.true_range_m = g.paths.front().length_m;
    r.true_velocity_mps = g.v_rel;
    r.true_delay_bin = g.radar_delay_s(0) * config.ofdm.bandwidth_hz();
    r.true_doppler_bin = g.radar_doppler_hz() * config.ofdm.frame_time_s() *
                         static_cast<double>(config.ofdm.symbols_per_block);
    return r;
}

Scheme select_scheme(double estimated_sinr_db, double threshold_db) {
    return estimated_sinr_db < threshold_db ? Scheme::cd_ofdm : Scheme::ofdm;
}

std::optional<double> ber_crossing_db(const std::vector<ResultRow>& rows, double target) {
    auto scale = [](double ber) {
        const double q = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * ber);
        return 20.0 * std::log10(q);
    };
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        if (r.value > 0.0 && r.value < 0.5) pts.emplace_back(r.sinr_db, r.value);
    }
    std::sort(pts.begin(), pts.end());
    const double t = scale(target);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const auto [g0, b0] = pts[k];
        const auto [g1, b1] = pts[k + 1];
        if (b0 >= target && b1 <= target) {
            const double s0 = scale(b0);
            const double s1 = scale(b1);
            if (s1 == s0) return g0;
            return g0 + (t - s0) * (g1 - g0) / (s1 - s0);
        }
    }
    return std::nullopt;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_header_comment(const SimConfig& config, const std::string& extra) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# cdjcs %s config_hash=%016" PRIx64 " seed=%" PRIu64, kVersion,
                  config_hash(config), config.seed);
    std::string s = buf;
    s += " ber_bits=" + std::to_string(config.ber_bits) + " trials=" + std::to_string(config.trials);
    if (!extra.empty()) s += " " + extra;
    return s;
}

void write_results_csv(std::ostream& os, const SimConfig& config, const ExperimentResult& result) {
    os << csv_header_comment(config) << '\n';
    os << "scheme,nc,metric,sinr_db,value,stderr,trials,seed,flags\n";
    for (const auto& r : result.rows) {
        os << r.scheme << ',' << r.nc << ',' << r.metric << ',' << format_double(r.sinr_db) << ','
           << format_double(r.value) << ',' << format_double(r.stderr_value) << ',' << r.trials << ','
           << r.seed << ',' << r.flags << '\n';
    }
}

void write_aepp_csv(std::ostream& os, const SimConfig& config, const std::vector<AeppPoint>& points) {
    os << csv_header_comment(config, "aepp_trials=" + std::to_string(config.aepp_trials)) << '\n';
    os << "scheme,M,Nc,NC,sinr_db,aepp_formula,aepp_montecarlo,rel_err\n";
    for (const auto& p : points) {
        os << p.scheme << ',' << p.order << ',' << p.subcarriers << ',' << p.channels << ','
           << format_double(p.sinr_db) << ',' << format_double(p.aepp_formula) << ','
           << format_double(p.aepp_montecarlo) << ',' << format_double(p.rel_err) << '\n';
    }
}

}  // namespace cdjcs
