#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "factorization.hpp"
#include "gains.hpp"
#include "transfer.hpp"

namespace nmpgain {

enum class LimitWitness {
    cross_evaluation_S_at_P_zero,
    cross_evaluation_P_at_S_zero,
    trivial_one,
    infinite_non_proper,
};

inline std::string_view to_string(LimitWitness w) {
    switch (w) {
    case LimitWitness::cross_evaluation_S_at_P_zero:
        return "cross_evaluation_S_at_P_zero";
    case LimitWitness::cross_evaluation_P_at_S_zero:
        return "cross_evaluation_P_at_S_zero";
    case LimitWitness::trivial_one:
        return "trivial_one";
    case LimitWitness::infinite_non_proper:
        return "infinite_non_proper";
    }
    return "unknown";
}

// Lower bound on ||S||_Hinf implied by the right-half-plane zeros of S and
// of P = 1 - S. bound applies the conventional floor of 1 in every case;
// proven_bound keeps only what the Poisson argument gives, which is 1 when
// only P has such zeros and 0 when P has none.
struct LimitBound {
    double bound = 1.0;
    double proven_bound = 0.0;
    LimitWitness witness_kind = LimitWitness::trivial_one;
    std::optional<Complex> witness_zero;
    std::vector<Complex> s_nmp;
    std::vector<Complex> p_nmp;
};

// P = 1 - S = (den - num) / den.
inline TransferFunction complementary(const TransferFunction& s) { return make_tf(s.den() - s.num(), s.den()); }

namespace detail {

inline std::vector<Complex> nmp_zeros_checked(const TransferFunction& t, double axis_tol, std::string_view label) {
    if (t.is_zero() || t.num().degree() < 1) {
        return {};
    }
    auto cls = classify_zeros(t, axis_tol);
    if (!cls.boundary_zeros.empty()) {
        throw DegenerateError("degenerate: imaginary-axis zero of " + std::string(label) + " at " +
                              format_root(cls.boundary_zeros.front()));
    }
    return cls.nmp_zeros;
}

inline double inverse_modulus(const BlaschkeProduct& b, Complex s) {
    const double m = std::abs(b(s));
    return m == 0.0 ? kInf : 1.0 / m;
}

} // namespace detail

// max( max_k |B_S(beta_k)|^-1, max_h |B_P(alpha_h)|^-1 - 1, 1 ) where alpha
// ranges over the RHP zeros of S and beta over those of P = 1 - S. Non-proper
// S gives +inf.
inline LimitBound nmp_limit_bound(const TransferFunction& s, double axis_tol = kAxisTol) {
    LimitBound out;
    if (!is_proper(s)) {
        out.bound = kInf;
        out.proven_bound = kInf;
        out.witness_kind = LimitWitness::infinite_non_proper;
        return out;
    }
    detail::require_stable(s, axis_tol, "NMP limitation bound");
    const TransferFunction p = complementary(s);
    out.s_nmp = detail::nmp_zeros_checked(s, axis_tol, "S");
    out.p_nmp = detail::nmp_zeros_checked(p, axis_tol, "P = 1 - S");

    const BlaschkeProduct bs{out.s_nmp};
    const BlaschkeProduct bp{out.p_nmp};
    out.proven_bound = bp.empty() ? 0.0 : 1.0;
    if (bs.empty() || bp.empty()) {
        return out;
    }
    for (const auto& beta : out.p_nmp) {
        const double v = detail::inverse_modulus(bs, beta);
        if (v > out.bound) {
            out.bound = v;
            out.witness_kind = LimitWitness::cross_evaluation_S_at_P_zero;
            out.witness_zero = beta;
        }
    }
    for (const auto& alpha : out.s_nmp) {
        const double v = detail::inverse_modulus(bp, alpha) - 1.0;
        if (v > out.bound) {
            out.bound = v;
            out.witness_kind = LimitWitness::cross_evaluation_P_at_S_zero;
            out.witness_zero = alpha;
        }
    }
    out.proven_bound = out.bound;
    return out;
}

namespace detail {

// Adaptive Simpson on [a, b] with the usual 15x Richardson criterion.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double eps,
                        int depth, bool& converged) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        converged = false;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, converged) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, converged);
}

} // namespace detail

// (1/pi) * integral of log|f(jw)| * s0.re / (s0.re^2 + (s0.im - w)^2) dw over
// the real line, evaluated after w = s0.im + s0.re tan(theta) with adaptive
// Simpson on theta in [-pi/2, pi/2]. For stable minimum-phase f this equals
// log|f(s0)|.
//
// A strictly proper f of relative degree k is integrated as
// f(s) (s + c)^k, which is biproper, and corrected by -k log|s0 + c|.
inline double poisson_integral(const TransferFunction& f, Complex s0, double rel_tol = 1e-10,
                               double axis_tol = kAxisTol) {
    if (!(s0.real() > 0.0)) {
        throw DomainError("Poisson integral needs Re(s0) > 0");
    }
    if (f.is_zero()) {
        throw DomainError("Poisson integral of the zero function diverges");
    }
    if (!is_proper(f)) {
        throw DomainError("Poisson integral needs a proper function (bounded in the right half plane)");
    }
    detail::require_stable(f, axis_tol, "Poisson integral");
    for (const auto& z : zeros(f)) {
        if (std::abs(z.real()) <= axis_tol) {
            throw DegenerateError("degenerate: imaginary-axis zero at " + format_root(z));
        }
        if (z.real() > 0.0) {
            throw DomainError("Poisson integral needs a minimum-phase function; split off the zero at " +
                              format_root(z) + " first");
        }
    }

    const int k = f.relative_degree();
    double c = 1.0;
    double correction = 0.0;
    TransferFunction h = f;
    if (k > 0) {
        const auto ps = poles(f);
        double lo = kInf;
        double hi = 0.0;
        for (const auto& p : ps) {
            lo = std::min(lo, std::abs(p));
            hi = std::max(hi, std::abs(p));
        }
        c = std::sqrt(lo * hi);
        Polynomial shift = Polynomial::constant(1.0);
        for (int i = 0; i < k; ++i) {
            shift *= Polynomial{c, 1.0};
        }
        h = make_tf(f.num() * shift, f.den());
        correction = -static_cast<double>(k) * std::log(std::abs(s0 + c));
    }

    const double sigma = s0.real();
    const double omega0 = s0.imag();
    const double log_inf = std::log(std::abs(h.high_frequency_gain()));
    const auto integrand = [&](double theta) {
        const double ct = std::cos(theta);
        if (std::abs(ct) < 1e-9) {
            return log_inf;
        }
        const double w = omega0 + sigma * std::tan(theta);
        return std::log(std::abs(h(Complex{0.0, w})));
    };

    constexpr int panels = 128;
    constexpr int max_depth = 60;
    const double half_pi = 0.5 * std::numbers::pi;
    const double width = 2.0 * half_pi / panels;
    bool converged = true;
    double total = 0.0;
    double coarse = 0.0;
    std::vector<double> fx(2 * panels + 1);
    for (int i = 0; i <= 2 * panels; ++i) {
        fx[static_cast<std::size_t>(i)] = integrand(-half_pi + 0.5 * width * i);
    }
    for (int i = 0; i < panels; ++i) {
        const auto j = static_cast<std::size_t>(2 * i);
        coarse += width / 6.0 * (fx[j] + 4.0 * fx[j + 1] + fx[j + 2]);
    }
    const double eps = rel_tol * std::max(1.0, std::abs(coarse)) / panels;
    for (int i = 0; i < panels; ++i) {
        const auto j = static_cast<std::size_t>(2 * i);
        const double a = -half_pi + width * i;
        const double b = a + width;
        const double whole = width / 6.0 * (fx[j] + 4.0 * fx[j + 1] + fx[j + 2]);
        total += detail::adaptive_simpson(integrand, a, b, fx[j], fx[j + 1], fx[j + 2], whole, eps, max_depth,
                                          converged);
    }
    const double value = total / std::numbers::pi + correction;
    if (!std::isfinite(value) || !converged) {
        throw DomainError("Poisson integral did not converge");
    }
    return value;
}

// Quadrature cross-check at one cross-evaluation zero: the closed form
// log|B^-1(zero)| against the Poisson integral of the matching minimum-phase
// factor at that zero.
struct PoissonCheck {
    Complex zero;
    bool zero_of_p = true; // true: zero of P, evaluated on S; false: zero of S, evaluated on P
    double closed_form_log = 0.0;
    double quadrature_log = 0.0;
};

struct LimitVerification {
    LimitBound limit;
    double hinf = 0.0;
    double slack = 0.0;
    bool dominance_ok = false;         // floored bound
    bool proven_dominance_ok = false;  // Poisson-only bound
    std::vector<PoissonCheck> checks;
    bool quadrature_agrees = true;
};

inline LimitVerification verify_nmp_limit(const TransferFunction& s, double axis_tol = kAxisTol) {
    constexpr double dominance_tol = 1e-9;
    constexpr double agreement_tol = 1e-7;
    LimitVerification out;
    out.limit = nmp_limit_bound(s, axis_tol);
    out.hinf = hinf_norm(s, axis_tol).value;
    out.proven_dominance_ok = out.limit.proven_bound <= out.hinf + dominance_tol;
    out.slack = out.hinf - out.limit.bound;
    out.dominance_ok = out.limit.bound <= out.hinf + dominance_tol;

    if (out.limit.s_nmp.empty() || out.limit.p_nmp.empty()) {
        return out;
    }
    const BlaschkeProduct bs{out.limit.s_nmp};
    const BlaschkeProduct bp{out.limit.p_nmp};
    const auto s_split = allpass_split(s, axis_tol);
    const auto p_split = allpass_split(complementary(s), axis_tol);
    for (const auto& beta : out.limit.p_nmp) {
        PoissonCheck c{beta, true, std::log(detail::inverse_modulus(bs, beta)),
                       poisson_integral(s_split.min_phase, beta)};
        out.quadrature_agrees = out.quadrature_agrees && std::abs(c.closed_form_log - c.quadrature_log) <= agreement_tol;
        out.checks.push_back(c);
    }
    for (const auto& alpha : out.limit.s_nmp) {
        PoissonCheck c{alpha, false, std::log(detail::inverse_modulus(bp, alpha)),
                       poisson_integral(p_split.min_phase, alpha)};
        out.quadrature_agrees = out.quadrature_agrees && std::abs(c.closed_form_log - c.quadrature_log) <= agreement_tol;
        out.checks.push_back(c);
    }
    return out;
}

} // namespace nmpgain
