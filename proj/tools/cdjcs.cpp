// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <optional>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "CLI11.hpp"

#include "cdjcs/harness.hpp"
#include "cdjcs/spreading.hpp"
#include "cdjcs/version.hpp"

using namespace cdjcs;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> bits;
    std::string out = ".";
    bool full_scale = false;
    unsigned threads = std::max(1U, std::thread::hardware_concurrency());
};

SimConfig load(const Common& o) {
    SimConfig c = o.config_path.empty() ? SimConfig{} : load_config(o.config_path);
    if (o.seed) c.seed = *o.seed;
    if (o.trials) c.trials = *o.trials;
    if (o.bits) c.ber_bits = *o.bits;
    if (o.full_scale) c.ofdm.symbols_per_block = 1024;
    c.validate();
    return c;
}

std::ofstream open_out(const Common& o, const std::string& name) {
    std::filesystem::create_directories(o.out);
    const auto path = std::filesystem::path(o.out) / name;
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    std::cout << "wrote " << path.string() << '\n';
    return os;
}

void log_switch(const SimConfig& c) {
    if (!c.dsss_switch_threshold_db) return;
    for (double g : c.sinr_db) {
        std::cout << "switch: sinr " << format_double(g) << " dB -> "
                  << to_string(select_scheme(g, *c.dsss_switch_threshold_db)) << '\n';
    }
}

void print_rows(const ExperimentResult& r) {
    for (const auto& row : r.rows) {
        std::printf("%-9s nc=%-5zu %-14s %7s dB  %-12s +/- %-10s %s\n", row.scheme.c_str(), row.nc,
                    row.metric.c_str(), format_double(row.sinr_db).c_str(),
                    format_double(row.value).c_str(), format_double(row.stderr_value).c_str(),
                    row.flags.c_str());
    }
}

int ber_sweep(const Common& o) {
    const auto c = load(o);
    log_switch(c);
    const auto r = run_ber_sweep(c, RunOptions{o.threads});
    print_rows(r);
    auto os = open_out(o, "ber.csv");
    write_results_csv(os, c, r);
    return 0;
}

int rmse_sweep(const Common& o) {
    const auto c = load(o);
    const auto r = run_rmse_sweep(c, RunOptions{o.threads});
    print_rows(r);
    auto os = open_out(o, "rmse.csv");
    write_results_csv(os, c, r);
    return 0;
}

int aepp_cmd(const Common& o) {
    const auto c = load(o);
    const auto pts = run_aepp(c, RunOptions{o.threads});
    for (const auto& p : pts) {
        std::printf("%-8s NC=%-5zu %7s dB  formula %-12s pipeline %-12s rel %s\n", p.scheme.c_str(),
                    p.channels, format_double(p.sinr_db).c_str(), format_double(p.aepp_formula).c_str(),
                    format_double(p.aepp_montecarlo).c_str(), format_double(p.rel_err).c_str());
    }
    auto os = open_out(o, "aepp.csv");
    write_aepp_csv(os, c, pts);
    return 0;
}

int radar_demo(const Common& o, double sinr_db) {
    const auto c = load(o);
    const auto r = run_radar_demo(c, sinr_db);
    std::printf("truth     range %.3f m  velocity %.3f m/s  bins (%.3f, %.3f)\n", r.true_range_m,
                r.true_velocity_mps, r.true_delay_bin, r.true_doppler_bin);
    std::printf("estimate  range %.3f m  velocity %.3f m/s  bins (%zu, %zu)  argmax (%zu, %zu)\n",
                r.estimate.range_m, r.estimate.velocity_mps, r.peak.delay, r.peak.doppler,
                r.peak.argmax_delay, r.peak.argmax_doppler);
    std::printf("peak-to-floor %.2f dB at %s dB SINR\n", r.estimate.peak_to_floor_db,
                format_double(sinr_db).c_str());

    {
        auto os = open_out(o, "radar_estimate.csv");
        os << csv_header_comment(c, "sinr_db=" + format_double(sinr_db)) << '\n';
        os << "quantity,truth,estimate\n";
        os << "range_m," << format_double(r.true_range_m) << ',' << format_double(r.estimate.range_m) << '\n';
        os << "velocity_mps," << format_double(r.true_velocity_mps) << ','
           << format_double(r.estimate.velocity_mps) << '\n';
        os << "delay_bin," << format_double(r.true_delay_bin) << ',' << r.peak.delay << '\n';
        os << "doppler_bin," << format_double(r.true_doppler_bin) << ',' << r.peak.doppler << '\n';
        os << "peak_to_floor_db,," << format_double(r.estimate.peak_to_floor_db) << '\n';
    }
    auto os = open_out(o, "radar_image.csv");
    os << csv_header_comment(c, "sinr_db=" + format_double(sinr_db)) << '\n';
    os << "delay_bin,doppler_bin,magnitude\n";
    for (std::size_t d = 0; d < r.image.doppler_bins; ++d) {
        for (std::size_t k = 0; k < r.image.delay_bins; ++k) {
            os << k << ',' << d << ',' << format_double(r.image(k, d)) << '\n';
        }
    }
    return 0;
}

int theorem_check(const Common& o, std::uint64_t draws) {
    const auto c = load(o);
    auto os = open_out(o, "theorem.csv");
    os << csv_header_comment(c, "draws=" + std::to_string(draws)) << '\n';
    os << "Nc,NC,M,mode,vectors,zero_free,min_abs,witness_row,witness_labels\n";
    auto emit = [&](std::size_t nc, std::size_t ch, unsigned m, const ZeroFreeReport& r) {
        std::string labels;
        if (r.witness_labels) {
            for (auto l : *r.witness_labels) labels += (labels.empty() ? "" : " ") + std::to_string(l);
        }
        const char* mode = r.mode == ZeroSearchMode::exhaustive ? "exhaustive" : "randomized";
        os << nc << ',' << ch << ',' << m << ',' << mode << ',' << r.vectors_checked << ','
           << (r.zero_free ? 1 : 0) << ',' << format_double(r.min_abs_entry) << ','
           << (r.witness_row ? std::to_string(*r.witness_row) : "") << ',' << labels << '\n';
        std::printf("Nc=%-5zu NC=%-4zu M=%-2u %-10s %10llu vectors  %s\n", nc, ch, m, mode,
                    static_cast<unsigned long long>(r.vectors_checked),
                    r.zero_free ? "zero-free" : "ZERO ENTRY FOUND");
    };
    for (unsigned m : {4u, 16u}) {
        for (std::size_t ch = 1; ch <= 8; ++ch) {
            const std::uint64_t combos = static_cast<std::uint64_t>(std::pow(m, ch));
            if (combos > 10'000'000) continue;
            emit(8, ch, m, check_zero_free(CodeBook::hadamard(8, ch), QamConstellation(m),
                                           ZeroSearchMode::exhaustive));
        }
    }
    const std::size_t nc = c.ofdm.subcarriers;
    std::vector<std::size_t> channels = {c.nc1};
    if (c.nc2 != c.nc1) channels.push_back(c.nc2);
    if (is_power_of_two(nc) && nc > 1) channels.push_back(nc / 2 - 1);
    for (std::size_t ch : channels) {
        if (ch == 0 || ch > nc || !is_power_of_two(nc)) continue;
        for (unsigned m : {4u, 16u, 64u}) {
            Rng rng = make_stream(c.seed, {ch, m});
            emit(nc, ch, m, check_zero_free(CodeBook::hadamard(nc, ch), QamConstellation(m),
                                            ZeroSearchMode::randomized, draws, &rng));
        }
    }
    return 0;
}

void add_common(CLI::App* sub, Common& o) {
    sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed (overrides the config)");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--trials", o.trials, "radar trials per SINR point (overrides the config)");
    sub->add_option("--bits", o.bits, "minimum bits per BER point (overrides the config)");
    sub->add_flag("--full-scale", o.full_scale, "use 1024 symbols per block");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
    // Blocks are a few MB each; keep them on the heap instead of fresh mmaps.
    mallopt(M_MMAP_THRESHOLD, 512 << 20);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
    CLI::App app{"cdjcs: code-division OFDM joint communication and sensing simulator"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common o;
    double demo_sinr = 20.0;
    std::uint64_t draws = 10000;
    auto* ber = app.add_subcommand("ber-sweep", "BER versus SINR for the configured scheme and baselines");
    auto* rmse = app.add_subcommand("rmse-sweep", "range and velocity RMSE versus SINR");
    auto* aepp = app.add_subcommand("aepp", "average error-propagation power, formula and pipeline");
    auto* demo = app.add_subcommand("radar-demo", "one block: radar image, estimate and truth");
    auto* theorem = app.add_subcommand("theorem-check", "zero-free spreading check for odd code counts");
    for (auto* s : {ber, rmse, aepp, demo, theorem}) add_common(s, o);
    demo->add_option("--sinr", demo_sinr, "SINR in dB")->capture_default_str();
    theorem->add_option("--draws", draws, "randomized draws per case")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*ber) return ber_sweep(o);
        if (*rmse) return rmse_sweep(o);
        if (*aepp) return aepp_cmd(o);
        if (*demo) return radar_demo(o, demo_sinr);
        if (*theorem) return theorem_check(o, draws);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ZeroReferenceError& e) {
        std::cerr << "numerical guard: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DeepFadeError& e) {
        std::cerr << "numerical guard: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
