// SPDX-License-Identifier: Apache-2.0
#include "cdjcs/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cdjcs/spreading.hpp"

namespace cdjcs {

using nlohmann::json;

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::cd_ofdm: return "cd-ofdm";
        case Scheme::ofdm: return "ofdm";
        case Scheme::tdd_ofdm: return "tdd-ofdm";
    }
    return "?";
}

Scheme parse_scheme(const std::string& s) {
    if (s == "cd-ofdm") return Scheme::cd_ofdm;
    if (s == "ofdm") return Scheme::ofdm;
    if (s == "tdd-ofdm") return Scheme::tdd_ofdm;
    throw ConfigError("scheme: expected cd-ofdm, ofdm or tdd-ofdm, got '" + s + "'");
}

namespace {

constexpr double kDeg = kPi / 180.0;

std::string rounding_name(PeakRounding r) { return r == PeakRounding::floor ? "floor" : "nearest"; }
std::string rcs_name(RcsFading f) { return f == RcsFading::rayleigh ? "rayleigh" : "constant"; }

}  // namespace

void SimConfig::validate() const {
    std::vector<std::string> problems;
    auto add = [&](std::string p) { problems.push_back(std::move(p)); };

    try {
        ofdm.validate();
    } catch (const DomainError& e) {
        add(std::string("ofdm: ") + e.what());
    }
    try {
        geometry.validate();
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) add(p);
    }
    if (ofdm.subcarriers > 0 && ofdm.cp_samples() > ofdm.subcarriers) {
        add("cp_time_s: cyclic prefix longer than the symbol body");
    }
    if (constellation_order != 4 && constellation_order != 16 && constellation_order != 64) {
        add("constellation_order: must be 4, 16 or 64");
    }
    if (!(p1 > 0.0)) add("p1: must be positive");
    if (!(p2 > 0.0)) add("p2: must be positive");
    if (sinr_db.empty()) add("sinr_db: sweep must not be empty");
    for (double g : sinr_db) {
        if (!std::isfinite(g)) add("sinr_db: values must be finite");
    }
    if (trials == 0) add("trials: must be at least 1");
    if (ber_bits == 0) add("ber_bits: must be at least 1");
    if (!(ber_precision > 0.0)) add("ber_precision: must be positive");
    if (!(erasure_budget >= 0.0 && erasure_budget <= 1.0)) add("erasure_budget: must be in [0, 1]");
    if (aepp_trials == 0) add("aepp_trials: must be at least 1");

    const std::size_t nc = ofdm.subcarriers;
    if (scheme == Scheme::cd_ofdm) {
        if (codebook == CodebookKind::identity) {
            if (nc1 != nc) add("nc1: identity code book needs nc1 == subcarriers");
            if (nc2 != nc) add("nc2: identity code book needs nc2 == subcarriers");
        } else {
            if (!is_power_of_two(nc)) add("subcarriers: Hadamard spreading needs a power of two");
            if (code_assignment == CodeAssignment::disjoint && nc1 + nc2 > nc) {
                add("code_assignment: disjoint columns need nc1 + nc2 <= subcarriers");
            }
            for (auto [name, v] : {std::pair{"nc1", nc1}, std::pair{"nc2", nc2}}) {
                if (v == 0 || v > nc) {
                    add(std::string(name) + ": must be in [1, subcarriers]");
                } else if (v % 2 == 0) {
                    add(std::string(name) +
                        ": must be odd, an even number of code channels can null a subcarrier "
                        "of the spread symbol (odd-NC zero-free theorem)");
                }
            }
        }
    }
    for (auto c : aepp_channels) {
        if (c == 0 || c > nc) add("aepp_channels: entries must be in [1, subcarriers]");
    }
    if (!problems.empty()) throw ConfigError(problems);
}

namespace {

class Reader {
public:
    explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

    template <typename T>
    void get(const json& v, const std::string& key, T& out) {
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw std::invalid_argument("expected a number");
                out = v.get<double>();
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_unsigned()) {
                    throw std::invalid_argument("expected a non-negative integer");
                }
                out = v.get<T>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw std::invalid_argument("expected a string");
                out = v.get<std::string>();
            } else {
                out = v.get<T>();
            }
        } catch (const std::exception& e) {
            problems_.push_back(key + ": " + e.what());
        }
    }

    void problem(std::string p) { problems_.push_back(std::move(p)); }

private:
    std::vector<std::string>& problems_;
};

PathParams parse_path(const json& j, const std::string& tag, Reader& rd) {
    PathParams p;
    if (!j.is_object()) {
        rd.problem(tag + ": expected an object");
        return p;
    }
    double aoa_deg = 0.0;
    double aod_deg = 0.0;
    for (const auto& [key, v] : j.items()) {
        const std::string k = tag + "." + key;
        if (key == "length_m") rd.get(v, k, p.length_m);
        else if (key == "aoa_deg") rd.get(v, k, aoa_deg);
        else if (key == "aod_deg") rd.get(v, k, aod_deg);
        else if (key == "comm_variance") rd.get(v, k, p.comm_variance);
        else if (key == "rcs_variance") rd.get(v, k, p.rcs_variance);
        else rd.problem(k + ": unknown key");
    }
    p.aoa_rad = aoa_deg * kDeg;
    p.aod_rad = aod_deg * kDeg;
    return p;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");

    SimConfig c;
    std::vector<std::string> problems;
    Reader rd(problems);
    std::string s;

    using Handler = std::function<void(const json&)>;
    const std::map<std::string, Handler> handlers = {
        {"subcarriers", [&](const json& v) { rd.get(v, "subcarriers", c.ofdm.subcarriers); }},
        {"subcarrier_spacing_hz", [&](const json& v) { rd.get(v, "subcarrier_spacing_hz", c.ofdm.subcarrier_spacing_hz); }},
        {"cp_time_s", [&](const json& v) { rd.get(v, "cp_time_s", c.ofdm.cp_time_s); }},
        {"symbols_per_block", [&](const json& v) { rd.get(v, "symbols_per_block", c.ofdm.symbols_per_block); }},
        {"carrier_hz", [&](const json& v) { rd.get(v, "carrier_hz", c.geometry.carrier_hz); }},
        {"speed_of_light", [&](const json& v) { rd.get(v, "speed_of_light", c.geometry.speed_of_light); }},
        {"v_rel", [&](const json& v) { rd.get(v, "v_rel", c.geometry.v_rel); }},
        {"tx_elements", [&](const json& v) { rd.get(v, "tx_elements", c.geometry.tx_elements); }},
        {"rx_elements", [&](const json& v) { rd.get(v, "rx_elements", c.geometry.rx_elements); }},
        {"spacing_wavelengths", [&](const json& v) { rd.get(v, "spacing_wavelengths", c.geometry.spacing_wavelengths); }},
        {"paths", [&](const json& v) {
             if (!v.is_array()) {
                 rd.problem("paths: expected an array");
                 return;
             }
             c.geometry.paths.clear();
             for (std::size_t l = 0; l < v.size(); ++l) {
                 c.geometry.paths.push_back(parse_path(v[l], "paths[" + std::to_string(l) + "]", rd));
             }
         }},
        {"los_rcs_model", [&](const json& v) {
             rd.get(v, "los_rcs_model", s);
             if (s == "constant") c.geometry.los_rcs_fading = RcsFading::constant_modulus;
             else if (s == "rayleigh") c.geometry.los_rcs_fading = RcsFading::rayleigh;
             else rd.problem("los_rcs_model: expected constant or rayleigh");
         }},
        {"constellation_order", [&](const json& v) { rd.get(v, "constellation_order", c.constellation_order); }},
        {"nc1", [&](const json& v) { rd.get(v, "nc1", c.nc1); }},
        {"nc2", [&](const json& v) { rd.get(v, "nc2", c.nc2); }},
        {"p1", [&](const json& v) { rd.get(v, "p1", c.p1); }},
        {"p2", [&](const json& v) { rd.get(v, "p2", c.p2); }},
        {"scheme", [&](const json& v) {
             rd.get(v, "scheme", s);
             try {
                 c.scheme = parse_scheme(s);
             } catch (const ConfigError& e) {
                 rd.problem(e.problems().front());
             }
         }},
        {"codebook", [&](const json& v) {
             rd.get(v, "codebook", s);
             if (s == "hadamard") c.codebook = CodebookKind::hadamard;
             else if (s == "identity") c.codebook = CodebookKind::identity;
             else rd.problem("codebook: expected hadamard or identity");
         }},
        {"code_assignment", [&](const json& v) {
             rd.get(v, "code_assignment", s);
             if (s == "shared") c.code_assignment = CodeAssignment::shared;
             else if (s == "disjoint") c.code_assignment = CodeAssignment::disjoint;
             else rd.problem("code_assignment: expected shared or disjoint");
         }},
        {"baselines", [&](const json& v) {
             if (!v.is_array()) {
                 rd.problem("baselines: expected an array of scheme names");
                 return;
             }
             c.baselines.clear();
             for (const auto& e : v) {
                 if (!e.is_string()) {
                     rd.problem("baselines: expected scheme names");
                     continue;
                 }
                 try {
                     c.baselines.push_back(parse_scheme(e.get<std::string>()));
                 } catch (const ConfigError& err) {
                     rd.problem("baselines: " + err.problems().front());
                 }
             }
         }},
        {"sinr_db", [&](const json& v) {
             if (!v.is_array()) {
                 rd.problem("sinr_db: expected an array of numbers");
                 return;
             }
             c.sinr_db.clear();
             for (const auto& e : v) {
                 double g = 0.0;
                 rd.get(e, "sinr_db", g);
                 c.sinr_db.push_back(g);
             }
         }},
        {"trials", [&](const json& v) { rd.get(v, "trials", c.trials); }},
        {"ber_bits", [&](const json& v) { rd.get(v, "ber_bits", c.ber_bits); }},
        {"ber_precision", [&](const json& v) { rd.get(v, "ber_precision", c.ber_precision); }},
        {"seed", [&](const json& v) { rd.get(v, "seed", c.seed); }},
        {"dsss_switch_threshold_db", [&](const json& v) {
             if (v.is_null()) {
                 c.dsss_switch_threshold_db.reset();
                 return;
             }
             double t = 0.0;
             rd.get(v, "dsss_switch_threshold_db", t);
             c.dsss_switch_threshold_db = t;
         }},
        {"peak_rounding", [&](const json& v) {
             rd.get(v, "peak_rounding", s);
             if (s == "floor") c.peak_rounding = PeakRounding::floor;
             else if (s == "nearest") c.peak_rounding = PeakRounding::nearest;
             else rd.problem("peak_rounding: expected floor or nearest");
         }},
        {"erasure_budget", [&](const json& v) { rd.get(v, "erasure_budget", c.erasure_budget); }},
        {"aepp_channels", [&](const json& v) {
             if (!v.is_array()) {
                 rd.problem("aepp_channels: expected an array of integers");
                 return;
             }
             c.aepp_channels.clear();
             for (const auto& e : v) {
                 std::size_t n = 0;
                 rd.get(e, "aepp_channels", n);
                 c.aepp_channels.push_back(n);
             }
         }},
        {"aepp_trials", [&](const json& v) { rd.get(v, "aepp_trials", c.aepp_trials); }},
    };

    for (const auto& [key, v] : j.items()) {
        auto it = handlers.find(key);
        if (it == handlers.end()) {
            problems.push_back(key + ": unknown key");
            continue;
        }
        it->second(v);
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const SimConfig& c) {
    json j;  // std::map-backed, so keys come out sorted
    j["subcarriers"] = c.ofdm.subcarriers;
    j["subcarrier_spacing_hz"] = c.ofdm.subcarrier_spacing_hz;
    j["cp_time_s"] = c.ofdm.cp_time_s;
    j["symbols_per_block"] = c.ofdm.symbols_per_block;
    j["carrier_hz"] = c.geometry.carrier_hz;
    j["speed_of_light"] = c.geometry.speed_of_light;
    j["v_rel"] = c.geometry.v_rel;
    j["tx_elements"] = c.geometry.tx_elements;
    j["rx_elements"] = c.geometry.rx_elements;
    j["spacing_wavelengths"] = c.geometry.spacing_wavelengths;
    json paths = json::array();
    for (const auto& p : c.geometry.paths) {
        paths.push_back({{"length_m", p.length_m},
                         {"aoa_deg", p.aoa_rad / kDeg},
                         {"aod_deg", p.aod_rad / kDeg},
                         {"comm_variance", p.comm_variance},
                         {"rcs_variance", p.rcs_variance}});
    }
    j["paths"] = paths;
    j["los_rcs_model"] = rcs_name(c.geometry.los_rcs_fading);
    j["constellation_order"] = c.constellation_order;
    j["nc1"] = c.nc1;
    j["nc2"] = c.nc2;
    j["p1"] = c.p1;
    j["p2"] = c.p2;
    j["scheme"] = to_string(c.scheme);
    j["codebook"] = c.codebook == CodebookKind::identity ? "identity" : "hadamard";
    j["code_assignment"] = c.code_assignment == CodeAssignment::disjoint ? "disjoint" : "shared";
    json base = json::array();
    for (auto b : c.baselines) base.push_back(to_string(b));
    j["baselines"] = base;
    j["sinr_db"] = c.sinr_db;
    j["trials"] = c.trials;
    j["ber_bits"] = c.ber_bits;
    j["ber_precision"] = c.ber_precision;
    j["seed"] = c.seed;
    j["dsss_switch_threshold_db"] =
        c.dsss_switch_threshold_db ? json(*c.dsss_switch_threshold_db) : json(nullptr);
    j["peak_rounding"] = rounding_name(c.peak_rounding);
    j["erasure_budget"] = c.erasure_budget;
    j["aepp_channels"] = c.aepp_channels;
    j["aepp_trials"] = c.aepp_trials;
    return j.dump(2);
}

std::uint64_t config_hash(const SimConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace cdjcs
