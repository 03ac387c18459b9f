#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../gains.hpp"
#include "../polynomial.hpp"
#include "../transfer.hpp"

namespace nmpgain::cli {

using json = nlohmann::json;

// Malformed or unreadable configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline constexpr const char* kTauToken = "TAU";

struct RootEntry {
    Complex value;
    bool is_tau = false;
};

// A polynomial given either as ascending coefficients or as roots with a
// leading coefficient.
struct PolySpec {
    std::optional<std::vector<double>> coeffs;
    std::vector<RootEntry> roots;
    double gain = 1.0;

    [[nodiscard]] bool uses_tau() const {
        for (const auto& r : roots) {
            if (r.is_tau) {
                return true;
            }
        }
        return false;
    }

    [[nodiscard]] Polynomial build(std::optional<double> tau) const {
        if (coeffs) {
            return Polynomial(*coeffs);
        }
        std::vector<Complex> rts;
        rts.reserve(roots.size());
        for (const auto& r : roots) {
            if (r.is_tau) {
                if (!tau) {
                    throw ConfigError("root list uses TAU but no tau value was given");
                }
                rts.emplace_back(*tau, 0.0);
            } else {
                rts.push_back(r.value);
            }
        }
        try {
            return Polynomial::from_roots(rts, gain);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
};

struct TransferSpec {
    std::string label;
    PolySpec num;
    PolySpec den;
};

// Two labelled transfer functions. For the output-to-output gain the first
// entry is T_ayr (residual output) and the second T_ayp (performance output);
// for the input-to-input gain they are T_fr (fault) and T_dr (disturbance).
struct SystemConfig {
    std::string name;
    Orientation orientation = Orientation::iig;
    std::array<TransferSpec, 2> pair;
    std::optional<double> tau;
    json source;

    [[nodiscard]] bool uses_tau() const {
        for (const auto& t : pair) {
            if (t.num.uses_tau() || t.den.uses_tau()) {
                return true;
            }
        }
        return false;
    }

    [[nodiscard]] std::pair<TransferFunction, TransferFunction> instantiate(std::optional<double> tau_override = {}) const {
        const auto t = tau_override ? tau_override : tau;
        std::array<TransferFunction, 2> out;
        for (std::size_t i = 0; i < 2; ++i) {
            const Polynomial den = pair[i].den.build(t);
            if (den.is_zero()) {
                throw ConfigError(pair[i].label + ": zero denominator");
            }
            out[i] = make_tf(pair[i].num.build(t), den);
        }
        return {out[0], out[1]};
    }
};

namespace detail {

inline double finite_number(const json& j, const std::string& where) {
    if (!j.is_number()) {
        throw ConfigError(where + ": expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ConfigError(where + ": not finite");
    }
    return v;
}

inline RootEntry parse_root(const json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() != kTauToken) {
            throw ConfigError(where + ": the only string allowed in a root list is \"TAU\"");
        }
        return {Complex{}, true};
    }
    if (j.is_array()) {
        if (j.size() != 2) {
            throw ConfigError(where + ": complex roots are [re, im]");
        }
        return {Complex{finite_number(j[0], where), finite_number(j[1], where)}, false};
    }
    return {Complex{finite_number(j, where), 0.0}, false};
}

inline PolySpec parse_poly(const json& tf, const std::string& key, const std::string& where) {
    const bool has_coeffs = tf.contains(key);
    const bool has_roots = tf.contains(key + "_roots");
    if (has_coeffs == has_roots) {
        throw ConfigError(where + ": give exactly one of \"" + key + "\" or \"" + key + "_roots\"");
    }
    PolySpec spec;
    if (has_coeffs) {
        const auto& arr = tf.at(key);
        if (!arr.is_array() || arr.empty()) {
            throw ConfigError(where + "." + key + ": expected a nonempty ascending coefficient array");
        }
        std::vector<double> c;
        for (const auto& v : arr) {
            c.push_back(finite_number(v, where + "." + key));
        }
        spec.coeffs = std::move(c);
        if (tf.contains(key + "_gain")) {
            throw ConfigError(where + ": \"" + key + "_gain\" only applies to \"" + key + "_roots\"");
        }
        return spec;
    }
    const auto& arr = tf.at(key + "_roots");
    if (!arr.is_array()) {
        throw ConfigError(where + "." + key + "_roots: expected an array");
    }
    for (const auto& v : arr) {
        spec.roots.push_back(parse_root(v, where + "." + key + "_roots"));
    }
    if (tf.contains(key + "_gain")) {
        spec.gain = finite_number(tf.at(key + "_gain"), where + "." + key + "_gain");
    }
    return spec;
}

} // namespace detail

inline SystemConfig parse_config(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    SystemConfig cfg;
    cfg.source = j;
    cfg.name = j.value("name", std::string("system"));
    const std::string orient = j.value("orientation", std::string("iig"));
    if (orient == "oog") {
        cfg.orientation = Orientation::oog;
    } else if (orient == "iig") {
        cfg.orientation = Orientation::iig;
    } else {
        throw ConfigError("orientation must be \"oog\" or \"iig\"");
    }
    if (!j.contains("pair") || !j.at("pair").is_array() || j.at("pair").size() != 2) {
        throw ConfigError("\"pair\" must be an array of exactly two transfer functions");
    }
    const bool oog_side = cfg.orientation == Orientation::oog;
    const std::array<const char*, 2> default_labels = {oog_side ? "T_ayr" : "T_fr", oog_side ? "T_ayp" : "T_dr"};
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& tf = j.at("pair")[i];
        const std::string where = "pair[" + std::to_string(i) + "]";
        if (!tf.is_object()) {
            throw ConfigError(where + ": expected an object");
        }
        cfg.pair[i].label = tf.value("label", std::string(default_labels[i]));
        cfg.pair[i].num = detail::parse_poly(tf, "num", where);
        cfg.pair[i].den = detail::parse_poly(tf, "den", where);
    }
    if (j.contains("tau")) {
        cfg.tau = detail::finite_number(j.at("tau"), "tau");
    }
    if (cfg.tau && !cfg.uses_tau()) {
        throw ConfigError("\"tau\" is set but no root list uses TAU");
    }
    return cfg;
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace nmpgain::cli
