// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nmpgain/nmpgain.hpp"
#include "nmpgain/random_systems.hpp"
#include "oracles.hpp"

using namespace nmpgain;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    const char* id;
    const char* title;
    double time_limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

TransferFunction tf(std::vector<Complex> zs, std::vector<Complex> ps, double k = 1.0) {
    return TransferFunction::from_factors(k, zs, ps);
}

TransferFunction example_fr() { return tf({-0.1, -0.2, -0.6}, {-0.3, -0.4, -0.5}); }
TransferFunction example_dr(double tau) { return tf({-1.0, 0.04, tau}, {-0.3, -0.4, -0.5}); }

// Printed two-decimal values for the example at tau = 20.
constexpr double kPrintedDr = 57.17;
constexpr double kPrintedFr = 1.00;
constexpr double kPrintedHminus = 0.20;
constexpr double kPrintedRatio = 114.33;
constexpr double kPrintedTol = 0.01;

Outcome norm_reproduction() {
    const double dr = hinf_norm(example_dr(20.0)).value;
    const double fr = hinf_norm(example_fr()).value;
    const double hm = h_minus_index(example_fr());
    const double ratio = iig_lower(example_fr(), example_dr(20.0)).hinf_ratio;
    const bool ok_dr = std::abs(dr - kPrintedDr) <= kPrintedTol;
    const bool ok_fr = std::abs(fr - kPrintedFr) <= kPrintedTol;
    const bool ok_hm = std::abs(hm - kPrintedHminus) <= kPrintedTol;
    const bool ok_ratio = std::abs(ratio - kPrintedRatio) <= kPrintedTol;
    return {ok_dr && ok_fr && ok_hm && ok_ratio,
            fmt("||T_dr||=%.4f (want %.2f%s) ||T_fr||=%.4f%s H-=%.4f%s ||N_d/N_f||=%.4f%s", dr, kPrintedDr,
                ok_dr ? "" : " MISMATCH", fr, ok_fr ? "" : " MISMATCH", hm, ok_hm ? "" : " MISMATCH", ratio,
                ok_ratio ? "" : " MISMATCH")};
}

Outcome bracket() {
    const auto fr = example_fr();
    const auto dr = example_dr(20.0);
    const auto b = classical_bounds(fr, dr);
    const double sq = kPrintedRatio * kPrintedRatio;
    const bool holds = b.lo <= sq && sq <= b.hi;
    const double want_lo = (kPrintedDr / kPrintedFr) * (kPrintedDr / kPrintedFr);
    const double want_hi = (kPrintedDr / kPrintedHminus) * (kPrintedDr / kPrintedHminus);
    // Compare on the printed (unsquared) scale with the two-decimal tolerance.
    const bool lo_matches = std::abs(std::sqrt(b.lo) - kPrintedDr / kPrintedFr) <= kPrintedTol;
    const bool hi_matches = std::abs(std::sqrt(b.hi) * kPrintedHminus - kPrintedDr) <= kPrintedTol;

    Rng rng(2024);
    int violations = 0;
    for (int i = 0; i < 200; ++i) {
        const auto first = random_min_phase_biproper(rng);
        const auto second = random_stable_proper(rng);
        const auto r = oog(first, second);
        const double s = r.hinf_ratio * r.hinf_ratio;
        if (!(r.classical_lo && r.classical_hi) || *r.classical_lo > s * (1.0 + 1e-9) ||
            s > *r.classical_hi * (1.0 + 1e-9)) {
            ++violations;
        }
    }
    return {holds && lo_matches && hi_matches && violations == 0,
            fmt("lo=%.2f (want %.2f%s) <= %.2f <= hi=%.2f (want %.2f%s), bracket %s; random violations %d/200", b.lo,
                want_lo, lo_matches ? "" : " MISMATCH", sq, b.hi, want_hi, hi_matches ? "" : " MISMATCH",
                holds ? "holds" : "VIOLATED", violations)};
}

Outcome hinf_oracle() {
    Rng rng(31337);
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < 200; ++i) {
        const auto g = random_stable_proper(rng, 6);
        const auto want = oracle::hinf(g.num().coeffs(), g.den().coeffs());
        const double got = hinf_norm(g).value;
        const double err = std::abs(got - want.value) / want.value;
        worst = std::max(worst, err);
        bad += err <= 1e-6 ? 0 : 1;
    }
    return {bad == 0, fmt("max relative error %.2e over 200 systems, %d above 1e-6", worst, bad)};
}

Outcome poisson_identity() {
    Rng rng(4242);
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        TransferFunction f = random_min_phase_biproper(rng);
        if (i % 4 == 3) {
            // strictly proper variant
            const auto ps = poles(f);
            f = TransferFunction::from_factors(random_gain(rng),
                                               random_stable_roots(rng, static_cast<int>(ps.size()) - 1), ps);
        }
        const Complex s0 = random_rhp_point(rng);
        const double err = std::abs(poisson_integral(f, s0) - std::log(std::abs(f(s0))));
        worst = std::max(worst, err);
        bad += err <= 1e-8 ? 0 : 1;
    }
    return {bad == 0, fmt("max |quadrature - log|f(s0)|| = %.2e over 100 systems, %d above 1e-8", worst, bad)};
}

Outcome nmp_dominance() {
    Rng rng(777);
    int violations = 0;
    int violations_without_p_zero = 0;
    int proven_violations = 0;
    int trivial_wrong = 0;
    for (int i = 0; i < 200; ++i) {
        std::uniform_int_distribution<int> deg(1, 6);
        const int nd = deg(rng);
        std::uniform_int_distribution<int> nz(0, nd - 1);
        auto zs = random_stable_roots(rng, nz(rng));
        zs.push_back(random_rhp_point(rng).real()); // injected NMP zero
        if (i % 2 == 0) {
            const Complex z = random_rhp_point(rng);
            if (static_cast<int>(zs.size()) + 2 <= nd) {
                zs.push_back(z);
                zs.push_back(std::conj(z));
            }
        }
        const auto s = TransferFunction::from_factors(random_gain(rng), zs, random_stable_roots(rng, nd));
        const auto lb = nmp_limit_bound(s);
        const double norm = hinf_norm(s).value;
        if (lb.bound > norm + 1e-9) {
            ++violations;
            violations_without_p_zero += lb.p_nmp.empty() ? 1 : 0;
        }
        proven_violations += lb.proven_bound <= norm + 1e-9 ? 0 : 1;
        const bool some_empty = lb.s_nmp.empty() || lb.p_nmp.empty();
        trivial_wrong += some_empty && lb.bound != 1.0 ? 1 : 0;
    }
    const double closed = nmp_limit_bound(tf({1.0}, {-1.0}, 3.0)).bound;
    const bool ok = violations == 0 && trivial_wrong == 0 && std::abs(closed - 3.0) <= 1e-12;
    return {ok, fmt("floored bound exceeds ||S|| in %d/200 (%d of them with P = 1 - S free of NMP zeros); "
                    "Poisson-only bound violations %d/200; empty-set cases not exactly 1: %d; {1} vs {2} bound %.12g",
                    violations, violations_without_p_zero, proven_violations, trivial_wrong, closed)};
}

Outcome tau_sweep() {
    constexpr int steps = 401;
    struct Point {
        double tau;
        bool ok;
        double bound;
        std::vector<double> p_real;
    };
    std::vector<Point> pts;
    for (int k = 0; k < steps; ++k) {
        const double tau = -20.0 + 40.0 * k / (steps - 1);
        Point p{tau, false, 0.0, {}};
        try {
            const auto g = iig_lower(example_fr(), example_dr(tau));
            if (g.finite()) {
                const auto lb = nmp_limit_bound(g.ratio);
                p.ok = true;
                p.bound = lb.bound;
                for (const auto& z : lb.p_nmp) {
                    if (z.imag() == 0.0) {
                        p.p_real.push_back(z.real());
                    }
                }
            }
        } catch (const Error&) {
        }
        pts.push_back(p);
    }
    // (a)
    auto near_004 = [](const Point& p) {
        return p.ok && p.p_real.size() == 1 && std::abs(p.p_real[0] - 0.04) <= 0.01;
    };
    const bool a = near_004(pts.front()) && near_004(pts.back());

    // (b) run of unit bounds next to tau = 0, skipping the degenerate point itself
    const int zero = steps / 2;
    auto unit = [&](int k) { return pts[k].ok && std::abs(pts[k].bound - 1.0) <= 1e-9; };
    int lo = -1;
    int hi = -1;
    for (int start : {zero, zero + 1, zero - 1}) {
        if (start >= 0 && start < steps && unit(start)) {
            lo = hi = start;
            break;
        }
    }
    if (lo >= 0) {
        while (lo > 0 && unit(lo - 1)) {
            --lo;
        }
        while (hi + 1 < steps && unit(hi + 1)) {
            ++hi;
        }
    }
    const bool b = lo >= 0;

    // (c) nondecreasing in |tau| on each side of that run
    bool c = b;
    if (b) {
        double prev = 1.0;
        for (int k = lo - 1; k >= 0; --k) {
            if (pts[k].ok) {
                c = c && pts[k].bound >= prev - 1e-9;
                prev = pts[k].bound;
            }
        }
        prev = 1.0;
        for (int k = hi + 1; k < steps; ++k) {
            if (pts[k].ok) {
                c = c && pts[k].bound >= prev - 1e-9;
                prev = pts[k].bound;
            }
        }
    }
    int degenerate = 0;
    for (const auto& p : pts) {
        degenerate += p.ok ? 0 : 1;
    }
    return {a && b && c,
            fmt("(a) P zero at tau=-20: %.5f, tau=20: %.5f %s; (b) bound=1 for tau in [%.2f, %.2f] %s; (c) %s; "
                "%d degenerate points",
                pts.front().p_real.empty() ? NAN : pts.front().p_real[0],
                pts.back().p_real.empty() ? NAN : pts.back().p_real[0], a ? "ok" : "FAIL", b ? pts[lo].tau : NAN,
                b ? pts[hi].tau : NAN, b ? "ok" : "FAIL", c ? "monotone" : "NOT MONOTONE", degenerate)};
}

Outcome witnesses() {
    const auto fr = example_fr();
    const auto dr = example_dr(20.0);
    const auto plan = plan_witness(iig_lower(fr, dr), fr, dr);
    const auto w = build_undetectable_fault(fr, dr, plan.default_horizon, plan.default_dt);
    const double rd = w.residual_disturbance_only.energy();
    const bool d_ok = std::abs(w.d_energy - 1.0) <= 1e-6;
    const bool slack_ok = w.detectability_slack >= -1e-3 * rd;
    const double f_target = 0.9 * 4.0 * kPrintedRatio * kPrintedRatio;
    const bool f_ok = w.f_energy >= f_target;

    const auto t_ayr = tf({-1.0, -3.0}, {-2.0, -4.0, {-1.0, 2.0}, {-1.0, -2.0}}, 5.0);
    const auto t_ayp = tf({0.5}, {-1.0, -2.0, {-1.0, 2.0}, {-1.0, -2.0}}, -2.0);
    const auto ap = plan_witness(oog(t_ayr, t_ayp), t_ayr, t_ayp);
    const auto a = build_stealthy_attack(t_ayr, t_ayp, ap.default_horizon, ap.default_dt);
    const bool yr_ok = std::abs(a.yr_energy - 1.0) <= 1e-6;
    const double frac = a.achieved_yp_energy / a.oog;
    const bool yp_ok = frac >= 0.95 && frac <= 1.02;
    return {d_ok && slack_ok && f_ok && yr_ok && yp_ok,
            fmt("fault: ||d||^2=%.9f slack/||r_d||^2=%.2e ||f||^2=%.1f (need >= %.1f); attack: ||y_r||^2=%.9f "
                "||y_p||^2/oog=%.4f",
                w.d_energy, w.detectability_slack / rd, w.f_energy, f_target, a.yr_energy, frac)};
}

Outcome allpass_factorization() {
    Rng rng(8080);
    std::uniform_real_distribution<double> wd(-100.0, 100.0);
    double worst_b = 0.0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<Complex> zs{random_rhp_point(rng)};
        if (zs[0].imag() != 0.0 && i % 2 == 0) {
            zs.push_back(std::conj(zs[0]));
        }
        worst_b = std::max(worst_b, std::abs(std::abs(BlaschkeProduct(zs)(Complex{0.0, wd(rng)})) - 1.0));
    }

    double worst_rec = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto p1 = random_stable_roots(rng, 1 + static_cast<int>(rng() % 4));
        auto p2 = random_stable_roots(rng, 1 + static_cast<int>(rng() % 4));
        if (i % 2 == 0) {
            p1 = mirror_into_rhp(p1);
        }
        const auto t1 = TransferFunction::from_factors(random_gain(rng), random_stable_roots(rng, 1), p1);
        const auto t2 = TransferFunction::from_factors(random_gain(rng), {}, p2);
        const auto cp = coprime_factorize(t1, t2, i % 3 == 0 ? FactorSide::left : FactorSide::right);
        for (Complex s : {Complex{0.0, 0.3}, Complex{1.0, 2.0}, Complex{-0.05, 5.0}}) {
            const Complex m = cp.m(s);
            worst_rec = std::max(worst_rec, std::abs(cp.n_first(s) / m - t1(s)) / std::max(1.0, std::abs(t1(s))));
            worst_rec = std::max(worst_rec, std::abs(cp.n_second(s) / m - t2(s)) / std::max(1.0, std::abs(t2(s))));
        }
    }

    double worst_split = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto g = random_stable_proper(rng);
        const auto split = allpass_split(g);
        for (int k = 0; k <= 80; ++k) {
            const double w = std::pow(10.0, -4.0 + 0.1 * k);
            const double want = std::abs(g(Complex{0.0, w}));
            worst_split = std::max(worst_split,
                                   std::abs(std::abs(split.min_phase(Complex{0.0, w})) - want) / std::max(1.0, want));
        }
    }
    return {worst_b <= 1e-12 && worst_rec <= 1e-8 && worst_split <= 1e-9,
            fmt("max ||B(jw)|-1| = %.2e, coprime reconstruction %.2e, split magnitude %.2e", worst_b, worst_rec,
                worst_split)};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"AC1", "example norms at tau=20", 1.0, norm_reproduction},
        {"AC2", "classical bracket", 30.0, bracket},
        {"AC3", "Hinf vs dense-grid oracle", 60.0, hinf_oracle},
        {"AC4", "Poisson identity", 30.0, poisson_identity},
        {"AC5", "NMP limitation bound dominance", 60.0, nmp_dominance},
        {"AC6", "tau sweep qualitative shape", 60.0, tau_sweep},
        {"AC7", "witness realization", 120.0, witnesses},
        {"AC8", "all-pass and factorization invariants", 10.0, allpass_factorization},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.time_limit_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s %s  %s: %s [%.2f s / %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(),
                    secs, c.time_limit_s, in_time ? "" : " TOO SLOW");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
