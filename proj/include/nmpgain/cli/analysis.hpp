#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "../gains.hpp"
#include "../limits.hpp"
#include "../transfer.hpp"
#include "config.hpp"

namespace nmpgain::cli {

inline constexpr const char* kToolName = "nmpgain";
inline constexpr const char* kToolVersion = "0.1.0";

struct RootSets {
    std::vector<Complex> minimum_phase;
    std::vector<Complex> nmp;
    std::vector<Complex> boundary;

    friend bool operator==(const RootSets&, const RootSets&) = default;
};

struct LimitSummary {
    double bound = 1.0;
    double proven_bound = 0.0;
    std::string witness_kind;
    std::optional<Complex> witness_zero;
    std::vector<Complex> s_nmp;
    std::vector<Complex> p_nmp;

    friend bool operator==(const LimitSummary&, const LimitSummary&) = default;
};

struct AnalysisReport {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    std::string name;
    Orientation orientation = Orientation::iig;
    std::optional<double> tau;
    json input;

    std::vector<double> ratio_num;
    std::vector<double> ratio_den;
    double hinf_ratio = 0.0;
    double peak_omega = 0.0;
    double oog = 0.0;
    double iig_lower = 0.0;
    std::optional<double> classical_lo;
    std::optional<double> classical_hi;
    std::optional<std::string> infinite_reason;

    std::optional<LimitSummary> limit;
    std::optional<std::string> limit_note;

    std::string first_label;
    std::string second_label;
    RootSets first_zeros;
    RootSets second_zeros;

    double elapsed_ms = 0.0;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

namespace detail {

inline RootSets root_sets(const TransferFunction& t) {
    if (t.is_zero()) {
        return {};
    }
    auto cls = classify_zeros(t);
    return {std::move(cls.minimum_phase_zeros), std::move(cls.nmp_zeros), std::move(cls.boundary_zeros)};
}

} // namespace detail

// Gain metrics, limitation bound and zero classification for one system.
// Throws DegenerateError for imaginary-axis roots and ConfigError for
// unusable input.
inline AnalysisReport analyze_system(const SystemConfig& cfg, std::optional<double> tau_override = {},
                                     double axis_tol = kAxisTol) {
    const auto start = std::chrono::steady_clock::now();
    AnalysisReport rep;
    rep.name = cfg.name;
    rep.orientation = cfg.orientation;
    rep.tau = tau_override ? tau_override : cfg.tau;
    rep.input = cfg.source;
    if (cfg.uses_tau() && !rep.tau) {
        throw ConfigError("config uses TAU; a tau value is required");
    }

    const auto [first, second] = cfg.instantiate(rep.tau);
    if (first.is_zero()) {
        throw ConfigError(cfg.pair[0].label + " is identically zero");
    }
    rep.first_label = cfg.pair[0].label;
    rep.second_label = cfg.pair[1].label;
    rep.first_zeros = detail::root_sets(first);
    rep.second_zeros = detail::root_sets(second);

    const GainReport gain = cfg.orientation == Orientation::oog ? oog(first, second, axis_tol)
                                                                : iig_lower(first, second, axis_tol);
    rep.ratio_num = gain.ratio.num().coeffs();
    rep.ratio_den = gain.ratio.den().coeffs();
    rep.hinf_ratio = gain.hinf_ratio;
    rep.peak_omega = gain.peak_omega;
    rep.oog = gain.oog;
    rep.iig_lower = gain.iig_lower;
    rep.classical_lo = gain.classical_lo;
    rep.classical_hi = gain.classical_hi;
    if (gain.infinite_reason) {
        rep.infinite_reason = std::string(to_string(*gain.infinite_reason));
    }

    if (gain.infinite_reason == InfiniteReason::unshared_nmp_zero_in_divisor) {
        rep.limit_note = "ratio has right-half-plane poles; limitation bound not applicable";
    } else {
        const LimitBound lb = nmp_limit_bound(gain.ratio, axis_tol);
        rep.limit = LimitSummary{lb.bound, lb.proven_bound, std::string(to_string(lb.witness_kind)),
                                 lb.witness_zero, lb.s_nmp, lb.p_nmp};
    }
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

// ---- JSON --------------------------------------------------------------

namespace detail {

inline json number_to_json(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

inline double number_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return kInf;
        }
        if (s == "-inf") {
            return -kInf;
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        throw ConfigError("unrecognised number \"" + s + "\"");
    }
    return j.get<double>();
}

inline json roots_to_json(const std::vector<Complex>& v) {
    json out = json::array();
    for (const auto& r : v) {
        out.push_back(json::array({r.real(), r.imag()}));
    }
    return out;
}

inline std::vector<Complex> roots_from_json(const json& j) {
    std::vector<Complex> out;
    for (const auto& r : j) {
        out.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
    }
    return out;
}

inline json root_sets_to_json(const RootSets& r) {
    return {{"minimum_phase", roots_to_json(r.minimum_phase)},
            {"nmp", roots_to_json(r.nmp)},
            {"boundary", roots_to_json(r.boundary)}};
}

inline RootSets root_sets_from_json(const json& j) {
    return {roots_from_json(j.at("minimum_phase")), roots_from_json(j.at("nmp")), roots_from_json(j.at("boundary"))};
}

template <typename T, typename F>
json optional_to_json(const std::optional<T>& v, F&& conv) {
    return v ? conv(*v) : json(nullptr);
}

} // namespace detail

inline json to_json(const AnalysisReport& r) {
    using namespace detail;
    json limit = nullptr;
    if (r.limit) {
        limit = {{"bound", number_to_json(r.limit->bound)},
                 {"proven_bound", number_to_json(r.limit->proven_bound)},
                 {"witness_kind", r.limit->witness_kind},
                 {"witness_zero", r.limit->witness_zero ? json::array({r.limit->witness_zero->real(),
                                                                       r.limit->witness_zero->imag()})
                                                        : json(nullptr)},
                 {"s_nmp", roots_to_json(r.limit->s_nmp)},
                 {"p_nmp", roots_to_json(r.limit->p_nmp)}};
    }
    return {
        {"tool", r.tool},
        {"version", r.version},
        {"name", r.name},
        {"orientation", std::string(to_string(r.orientation))},
        {"tau", optional_to_json(r.tau, number_to_json)},
        {"input", r.input},
        {"gain",
         {{"ratio_num", r.ratio_num},
          {"ratio_den", r.ratio_den},
          {"hinf_ratio", number_to_json(r.hinf_ratio)},
          {"peak_omega", number_to_json(r.peak_omega)},
          {"oog", number_to_json(r.oog)},
          {"iig_lower", number_to_json(r.iig_lower)},
          {"classical_lo", optional_to_json(r.classical_lo, number_to_json)},
          {"classical_hi", optional_to_json(r.classical_hi, number_to_json)},
          {"infinite_reason", optional_to_json(r.infinite_reason, [](const std::string& s) { return json(s); })}}},
        {"limit", limit},
        {"limit_note", optional_to_json(r.limit_note, [](const std::string& s) { return json(s); })},
        {"zeros",
         {{"first", {{"label", r.first_label}, {"sets", root_sets_to_json(r.first_zeros)}}},
          {"second", {{"label", r.second_label}, {"sets", root_sets_to_json(r.second_zeros)}}}}},
        {"timing_ms", r.elapsed_ms},
    };
}

inline AnalysisReport report_from_json(const json& j) {
    using namespace detail;
    AnalysisReport r;
    r.tool = j.at("tool").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.orientation = j.at("orientation").get<std::string>() == "oog" ? Orientation::oog : Orientation::iig;
    if (!j.at("tau").is_null()) {
        r.tau = number_from_json(j.at("tau"));
    }
    r.input = j.at("input");
    const auto& g = j.at("gain");
    r.ratio_num = g.at("ratio_num").get<std::vector<double>>();
    r.ratio_den = g.at("ratio_den").get<std::vector<double>>();
    r.hinf_ratio = number_from_json(g.at("hinf_ratio"));
    r.peak_omega = number_from_json(g.at("peak_omega"));
    r.oog = number_from_json(g.at("oog"));
    r.iig_lower = number_from_json(g.at("iig_lower"));
    if (!g.at("classical_lo").is_null()) {
        r.classical_lo = number_from_json(g.at("classical_lo"));
    }
    if (!g.at("classical_hi").is_null()) {
        r.classical_hi = number_from_json(g.at("classical_hi"));
    }
    if (!g.at("infinite_reason").is_null()) {
        r.infinite_reason = g.at("infinite_reason").get<std::string>();
    }
    if (const auto& l = j.at("limit"); !l.is_null()) {
        LimitSummary s;
        s.bound = number_from_json(l.at("bound"));
        s.proven_bound = number_from_json(l.at("proven_bound"));
        s.witness_kind = l.at("witness_kind").get<std::string>();
        if (!l.at("witness_zero").is_null()) {
            s.witness_zero = Complex{l.at("witness_zero").at(0).get<double>(), l.at("witness_zero").at(1).get<double>()};
        }
        s.s_nmp = roots_from_json(l.at("s_nmp"));
        s.p_nmp = roots_from_json(l.at("p_nmp"));
        r.limit = std::move(s);
    }
    if (!j.at("limit_note").is_null()) {
        r.limit_note = j.at("limit_note").get<std::string>();
    }
    const auto& z = j.at("zeros");
    r.first_label = z.at("first").at("label").get<std::string>();
    r.second_label = z.at("second").at("label").get<std::string>();
    r.first_zeros = root_sets_from_json(z.at("first").at("sets"));
    r.second_zeros = root_sets_from_json(z.at("second").at("sets"));
    r.elapsed_ms = j.at("timing_ms").get<double>();
    return r;
}

// ---- parameter sweep ---------------------------------------------------

struct SweepPoint {
    double tau = 0.0;
    std::string status = "ok";
    double bound = 0.0;
    double hinf = 0.0;
    std::vector<double> real_p_nmp; // real right-half-plane zeros of P = 1 - S
};

inline SweepPoint sweep_point(const SystemConfig& cfg, double tau, double axis_tol) {
    SweepPoint pt;
    pt.tau = tau;
    try {
        const auto [first, second] = cfg.instantiate(tau);
        const GainReport gain = cfg.orientation == Orientation::oog ? oog(first, second, axis_tol)
                                                                    : iig_lower(first, second, axis_tol);
        if (gain.infinite_reason) {
            pt.status = "infinite_" + std::string(to_string(*gain.infinite_reason));
            pt.bound = gain.infinite_reason == InfiniteReason::non_proper ? kInf : std::nan("");
            pt.hinf = kInf;
            return pt;
        }
        const LimitBound lb = nmp_limit_bound(gain.ratio, axis_tol);
        pt.bound = lb.bound;
        pt.hinf = gain.hinf_ratio;
        for (const auto& z : lb.p_nmp) {
            if (z.imag() == 0.0) {
                pt.real_p_nmp.push_back(z.real());
            }
        }
    } catch (const DegenerateError&) {
        pt.status = "degenerate";
        pt.bound = pt.hinf = std::nan("");
    } catch (const DomainError&) {
        pt.status = "invalid";
        pt.bound = pt.hinf = std::nan("");
    }
    return pt;
}

// Evaluates steps evenly spaced values of tau on [lo, hi] (lo alone when
// steps == 1). Points are computed concurrently and returned in tau order.
inline std::vector<SweepPoint> run_sweep(const SystemConfig& cfg, double lo, double hi, int steps,
                                         double axis_tol = kAxisTol, unsigned threads = 0) {
    if (!cfg.uses_tau()) {
        throw ConfigError("sweep needs a config whose root lists use TAU");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo || steps < 1) {
        throw ConfigError("bad sweep range");
    }
    std::vector<SweepPoint> out(static_cast<std::size_t>(steps));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < out.size(); i = next++) {
            const double tau =
                steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
            out[i] = sweep_point(cfg, tau, axis_tol);
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    pool.clear();
    return out;
}

} // namespace nmpgain::cli
