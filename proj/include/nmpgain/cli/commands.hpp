#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../gains.hpp"
#include "../limits.hpp"
#include "../random_systems.hpp"
#include "../witness.hpp"
#include "analysis.hpp"
#include "config.hpp"

namespace nmpgain::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitPropertyFailure = 1,
    kExitInvalidInput = 2,
    kExitDegenerate = 3,
};

inline constexpr const char* kOutDirEnv = "NMPGAIN_OUT_DIR";

inline std::filesystem::path default_out_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? std::filesystem::path(env) : std::filesystem::path(".");
}

// 12 significant digits; "inf"/"-inf" for infinities, empty for NaN.
inline std::string csv_number(double v) {
    if (std::isnan(v)) {
        return "";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const DegenerateError& e) {
        err << "degenerate system: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const DomainError& e) {
        err << "degenerate system: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPropertyFailure;
    }
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream os(path);
    if (!os) {
        throw ConfigError("cannot write " + path.string());
    }
    return os;
}

inline void write_signal(const std::filesystem::path& path, const Signal& s, const char* value_name) {
    auto os = open_output(path);
    write_csv(os, s, value_name);
}

inline std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '"' || c == '\n') {
            c = '_';
        }
    }
    return s;
}

} // namespace detail

// ---- analyze -----------------------------------------------------------

struct AnalyzeOptions {
    std::string config_path;
    bool csv = false;
    double axis_tol = kAxisTol;
    std::optional<double> tau;
    std::string out; // empty: <out dir>/<name>.report.{json,csv}; "-": stdout
};

inline void write_report_csv(std::ostream& os, const AnalysisReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
    os << "key,value\n";
    os << "tool," << r.tool << '\n';
    os << "version," << r.version << '\n';
    os << "name," << detail::sanitize(r.name) << '\n';
    os << "orientation," << to_string(r.orientation) << '\n';
    os << "tau," << opt(r.tau) << '\n';
    os << "hinf_ratio," << csv_number(r.hinf_ratio) << '\n';
    os << "peak_omega," << csv_number(r.peak_omega) << '\n';
    os << "oog," << csv_number(r.oog) << '\n';
    os << "iig_lower," << csv_number(r.iig_lower) << '\n';
    os << "classical_lo," << opt(r.classical_lo) << '\n';
    os << "classical_hi," << opt(r.classical_hi) << '\n';
    os << "infinite_reason," << r.infinite_reason.value_or("") << '\n';
    os << "limit_bound," << (r.limit ? csv_number(r.limit->bound) : std::string()) << '\n';
    os << "limit_proven_bound," << (r.limit ? csv_number(r.limit->proven_bound) : std::string()) << '\n';
    os << "limit_witness_kind," << (r.limit ? r.limit->witness_kind : std::string()) << '\n';
}

inline void print_summary(std::ostream& os, const AnalysisReport& r) {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::isinf(v) ? std::string("inf") : std::string(buf);
    };
    const std::string ratio_name = "N(" + r.second_label + ")/N(" + r.first_label + ")";
    os << r.name << " (" << to_string(r.orientation);
    if (r.tau) {
        os << ", tau=" << num(*r.tau);
    }
    os << ")\n";
    os << "  ||" << ratio_name << "||_Hinf = " << num(r.hinf_ratio) << " at omega = "
       << num(r.peak_omega) << '\n';
    if (r.infinite_reason) {
        os << "  gain infinite: " << *r.infinite_reason << '\n';
    }
    if (r.orientation == Orientation::oog) {
        os << "  output-to-output gain = " << num(r.oog) << '\n';
    } else {
        os << "  input-to-input gain lower bound = " << num(r.iig_lower) << '\n';
    }
    if (r.classical_lo && r.classical_hi) {
        os << "  classical bracket (squared): " << num(*r.classical_lo) << " <= " << num(r.hinf_ratio * r.hinf_ratio) << " <= "
           << num(*r.classical_hi) << '\n';
    }
    if (r.limit) {
        os << "  NMP limitation bound on ||S||_Hinf: " << num(r.limit->bound) << " (" << r.limit->witness_kind
           << ")\n";
        if (r.limit->proven_bound != r.limit->bound) {
            os << "  (P = 1 - S has no right-half-plane zeros; without the floor of 1 the bound is "
               << num(r.limit->proven_bound) << ")\n";
        }
    } else if (r.limit_note) {
        os << "  limitation bound: " << *r.limit_note << '\n';
    }
}

inline int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const SystemConfig cfg = load_config(opt.config_path);
        const AnalysisReport rep = analyze_system(cfg, opt.tau, opt.axis_tol);
        std::ostringstream body;
        if (opt.csv) {
            write_report_csv(body, rep);
        } else {
            body << to_json(rep).dump(2) << '\n';
        }
        if (opt.out == "-") {
            out << body.str();
        } else {
            const auto path = opt.out.empty()
                                  ? default_out_dir() / (cfg.name + (opt.csv ? ".report.csv" : ".report.json"))
                                  : std::filesystem::path(opt.out);
            detail::open_output(path) << body.str();
            print_summary(out, rep);
            out << "  report written to " << path.string() << '\n';
        }
        return kExitOk;
    });
}

// ---- sweep -------------------------------------------------------------

struct SweepOptions {
    std::string config_path;
    std::string param = "tau";
    double min = -20.0;
    double max = 20.0;
    int steps = 401;
    double axis_tol = kAxisTol;
    std::string out_dir; // empty: default_out_dir()
    unsigned threads = 0;
};

inline void write_sweep_csvs(const std::vector<SweepPoint>& pts, std::ostream& zeros_csv, std::ostream& bound_csv) {
    std::size_t width = 1;
    for (const auto& p : pts) {
        width = std::max(width, p.real_p_nmp.size());
    }
    zeros_csv << "tau,status";
    for (std::size_t k = 1; k <= width; ++k) {
        zeros_csv << ",nmp_zero_" << k;
    }
    zeros_csv << '\n';
    bound_csv << "tau,status,bound,hinf_s\n";
    for (const auto& p : pts) {
        zeros_csv << csv_number(p.tau) << ',' << p.status;
        for (std::size_t k = 0; k < width; ++k) {
            zeros_csv << ',' << (k < p.real_p_nmp.size() ? csv_number(p.real_p_nmp[k]) : std::string());
        }
        zeros_csv << '\n';
        bound_csv << csv_number(p.tau) << ',' << p.status << ',' << csv_number(p.bound) << ','
                  << csv_number(p.hinf) << '\n';
    }
}

inline int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (opt.param != "tau") {
            throw ConfigError("only the tau parameter can be swept");
        }
        const SystemConfig cfg = load_config(opt.config_path);
        const auto pts = run_sweep(cfg, opt.min, opt.max, opt.steps, opt.axis_tol, opt.threads);
        const auto dir = opt.out_dir.empty() ? default_out_dir() : std::filesystem::path(opt.out_dir);
        std::filesystem::create_directories(dir);
        auto zeros_csv = detail::open_output(dir / "nmp_zero_vs_tau.csv");
        auto bound_csv = detail::open_output(dir / "bound_vs_tau.csv");
        write_sweep_csvs(pts, zeros_csv, bound_csv);
        std::size_t bad = 0;
        for (const auto& p : pts) {
            bad += p.status != "ok" ? 1 : 0;
        }
        out << "sweep over tau in [" << csv_number(opt.min) << ", " << csv_number(opt.max) << "], " << pts.size()
            << " points (" << bad << " not ok) written to " << dir.string() << '\n';
        return kExitOk;
    });
}

// ---- bode --------------------------------------------------------------

struct BodeOptions {
    std::string config_path;
    double wmin = 1e-3;
    double wmax = 1e3;
    int points = 400;
    std::optional<double> tau;
    std::string out; // empty: <out dir>/<name>.bode.csv; "-": stdout
};

inline void write_bode_csv(std::ostream& os, const TransferFunction& first, const TransferFunction& second,
                           const std::string& first_label, const std::string& second_label, double wmin, double wmax,
                           int points) {
    const auto l1 = detail::sanitize(first_label);
    const auto l2 = detail::sanitize(second_label);
    os << "omega,mag_ratio,mag_" << l2 << ",mag_" << l1 << ",db_ratio,db_" << l2 << ",db_" << l1 << '\n';
    auto db = [](double m) { return 20.0 * std::log10(m); };
    for (int i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        const double w = wmin * std::pow(wmax / wmin, frac);
        const double m1 = std::abs(freq_response(first, w));
        const double m2 = std::abs(freq_response(second, w));
        const double mr = m1 == 0.0 ? (m2 == 0.0 ? std::nan("") : kInf) : m2 / m1;
        os << csv_number(w) << ',' << csv_number(mr) << ',' << csv_number(m2) << ',' << csv_number(m1) << ','
           << csv_number(db(mr)) << ',' << csv_number(db(m2)) << ',' << csv_number(db(m1)) << '\n';
    }
}

inline int cmd_bode(const BodeOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (!(opt.wmin > 0.0) || !(opt.wmax > opt.wmin) || !std::isfinite(opt.wmax) || opt.points < 2) {
            throw ConfigError("empty or invalid frequency range");
        }
        const SystemConfig cfg = load_config(opt.config_path);
        const auto tau = opt.tau ? opt.tau : cfg.tau;
        if (cfg.uses_tau() && !tau) {
            throw ConfigError("config uses TAU; a tau value is required");
        }
        const auto [first, second] = cfg.instantiate(tau);
        std::ostringstream body;
        write_bode_csv(body, first, second, cfg.pair[0].label, cfg.pair[1].label, opt.wmin, opt.wmax, opt.points);
        if (opt.out == "-") {
            out << body.str();
        } else {
            const auto path =
                opt.out.empty() ? default_out_dir() / (cfg.name + ".bode.csv") : std::filesystem::path(opt.out);
            detail::open_output(path) << body.str();
            out << "frequency response (" << opt.points << " points) written to " << path.string() << '\n';
        }
        return kExitOk;
    });
}

// ---- witness -----------------------------------------------------------

struct WitnessOptions {
    std::string config_path;
    std::optional<double> horizon;
    std::optional<double> dt;
    std::optional<double> tau;
    std::string out_dir; // empty: default_out_dir()
};

inline int cmd_witness(const WitnessOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (opt.dt && !(*opt.dt > 0.0)) {
            throw ConfigError("--dt must be positive");
        }
        if (opt.horizon && !(*opt.horizon > 0.0)) {
            throw ConfigError("--horizon must be positive");
        }
        const SystemConfig cfg = load_config(opt.config_path);
        const auto tau = opt.tau ? opt.tau : cfg.tau;
        if (cfg.uses_tau() && !tau) {
            throw ConfigError("config uses TAU; a tau value is required");
        }
        const auto [first, second] = cfg.instantiate(tau);
        const auto dir = opt.out_dir.empty() ? default_out_dir() : std::filesystem::path(opt.out_dir);
        std::filesystem::create_directories(dir);

        const GainReport rep = cfg.orientation == Orientation::oog ? oog(first, second) : iig_lower(first, second);
        nlohmann::json summary = {{"name", cfg.name}, {"orientation", std::string(to_string(cfg.orientation))}};
        if (!rep.finite()) {
            summary["status"] = "infinite";
            summary["reason"] = std::string(to_string(*rep.infinite_reason));
            detail::open_output(dir / "summary.json") << summary.dump(2) << '\n';
            out << "gain is infinite (" << to_string(*rep.infinite_reason) << "); no witness signals written\n";
            return kExitOk;
        }
        const WitnessPlan plan = plan_witness(rep, first, second);
        const double horizon = opt.horizon.value_or(plan.default_horizon);
        const double dt = opt.dt.value_or(plan.default_dt);
        summary["status"] = "ok";
        summary["omega"] = plan.omega;
        summary["horizon"] = horizon;
        summary["dt"] = dt;

        bool all_ok = true;
        auto flag = [&](const char* name, bool v) {
            summary["feasibility"][name] = v;
            all_ok = all_ok && v;
        };
        if (cfg.orientation == Orientation::oog) {
            const auto w = build_stealthy_attack(first, second, horizon, dt);
            detail::write_signal(dir / "attack.csv", w.attack, "a");
            detail::write_signal(dir / "residual_output.csv", w.residual_output, "y_r");
            detail::write_signal(dir / "performance_output.csv", w.performance_output, "y_p");
            summary["bound"] = w.oog;
            summary["achieved"] = w.achieved_yp_energy;
            summary["achieved_over_bound"] = w.achieved_yp_energy / w.oog;
            summary["yr_energy"] = w.yr_energy;
            flag("residual_energy_at_threshold", std::abs(w.yr_energy - kDetectionThreshold) <= 1e-6);
            flag("below_bound", w.achieved_yp_energy <= w.oog * 1.02);
        } else {
            const auto w = build_undetectable_fault(first, second, horizon, dt);
            detail::write_signal(dir / "fault.csv", w.fault, "f");
            detail::write_signal(dir / "disturbance.csv", w.disturbance, "d");
            detail::write_signal(dir / "residual.csv", w.residual, "r");
            const double rd = w.residual_disturbance_only.energy();
            summary["bound"] = w.iig_lower;
            summary["achieved"] = w.f_energy;
            summary["achieved_over_bound"] = w.iig_lower > 0.0 ? w.f_energy / w.iig_lower : 1.0;
            summary["d_energy"] = w.d_energy;
            summary["detectability_slack"] = w.detectability_slack;
            flag("disturbance_energy_unit", std::abs(w.d_energy - 1.0) <= 1e-6);
            flag("undetectable", verify_undetectability(w.residual, w.residual_disturbance_only));
            flag("slack_within_tolerance", w.detectability_slack >= -1e-3 * rd);
        }
        detail::open_output(dir / "summary.json") << summary.dump(2) << '\n';
        out << "witness achieved/bound = " << csv_number(summary["achieved_over_bound"].get<double>())
            << (all_ok ? ", all feasibility checks passed" : ", FEASIBILITY CHECK FAILED") << '\n';
        return all_ok ? kExitOk : kExitPropertyFailure;
    });
}

// ---- poisson-check -----------------------------------------------------

struct PoissonCheckOptions {
    int trials = 100;
    std::uint64_t seed = 1;
    bool adversarial = false;
    double tolerance = 1e-8;
};

struct PoissonCheckResult {
    int passed = 0;
    int rejected = 0;
    std::vector<std::uint64_t> failing_seeds;
    double max_error = 0.0;
};

namespace detail {

// Roots closer to the imaginary axis than this are outside what the
// quadrature can resolve to 1e-8.
inline bool near_boundary(const TransferFunction& f) {
    for (const auto* set : {&f.num(), &f.den()}) {
        if (set->degree() < 1) {
            continue;
        }
        for (const auto& r : roots(*set)) {
            if (std::abs(r.real()) < 1e-4 * std::max(1.0, std::abs(r))) {
                return true;
            }
        }
    }
    return false;
}

} // namespace detail

inline PoissonCheckResult run_poisson_check(const PoissonCheckOptions& opt) {
    PoissonCheckResult res;
    auto one = [&](const TransferFunction& f, Complex s0, std::uint64_t trial_seed) {
        if (detail::near_boundary(f)) {
            ++res.rejected;
            return;
        }
        double err = kInf;
        try {
            err = std::abs(poisson_integral(f, s0) - std::log(std::abs(f(s0))));
        } catch (const DegenerateError&) {
            ++res.rejected;
            return;
        } catch (const DomainError&) {
        }
        res.max_error = std::max(res.max_error, err);
        if (err <= opt.tolerance) {
            ++res.passed;
        } else {
            res.failing_seeds.push_back(trial_seed);
        }
    };
    for (int i = 0; i < opt.trials; ++i) {
        const std::uint64_t trial_seed = opt.seed + static_cast<std::uint64_t>(i);
        Rng rng(trial_seed);
        const auto f = random_min_phase_biproper(rng);
        one(f, random_rhp_point(rng), trial_seed);
    }
    if (opt.adversarial) {
        const std::vector<Complex> zs{{-1e-6, 0.0}};
        const std::vector<Complex> ps{{-1.0, 0.0}};
        one(TransferFunction::from_factors(1.0, zs, ps), Complex{1.0, 0.5}, opt.seed);
    }
    return res;
}

inline int cmd_poisson_check(const PoissonCheckOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (opt.trials < 0) {
            throw ConfigError("--trials must be nonnegative");
        }
        if (opt.trials == 0) {
            err << "warning: zero trials requested; the check passes vacuously\n";
        }
        const auto res = run_poisson_check(opt);
        out << "poisson-check: " << res.passed << " passed, " << res.rejected << " rejected as degenerate, "
            << res.failing_seeds.size() << " failed, max |error| = " << csv_number(res.max_error) << '\n';
        for (auto s : res.failing_seeds) {
            out << "  failing seed " << s << '\n';
        }
        if (!res.failing_seeds.empty()) {
            out << "FAIL\n";
            return kExitPropertyFailure;
        }
        out << "PASS\n";
        return kExitOk;
    });
}

} // namespace nmpgain::cli
