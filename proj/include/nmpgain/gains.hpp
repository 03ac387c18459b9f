#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "factorization.hpp"
#include "polynomial.hpp"
#include "transfer.hpp"

namespace nmpgain {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Value of a frequency-domain extremum and where it is attained. A peak at
// omega = +inf means the supremum is the high-frequency limit.
struct NormResult {
    double value = 0.0;
    double peak_omega = 0.0;
};

namespace detail {

// |p(j w)|^2 as a polynomial in x = w^2, built from the even polynomial
// p(s) p(-s) with s^2 = -x.
inline Polynomial squared_magnitude_in_x(const Polynomial& p) {
    const Polynomial even = p * p.mirrored();
    std::vector<double> out((even.coeffs().size() + 1) / 2, 0.0);
    for (std::size_t k = 0; 2 * k < even.coeffs().size(); ++k) {
        out[k] = (k % 2 == 0 ? 1.0 : -1.0) * even[2 * k];
    }
    return Polynomial(std::move(out));
}

// Candidate frequencies for extrema of |g(jw)| on (0, inf): square roots of
// the real nonnegative roots of d/dx (A/B), i.e. of A'B - AB'.
inline std::vector<double> stationary_frequencies(const TransferFunction& g) {
    const Polynomial a = squared_magnitude_in_x(g.num());
    const Polynomial b = squared_magnitude_in_x(g.den());
    const Polynomial stat = a.derivative() * b - a * b.derivative();
    std::vector<double> out;
    if (stat.degree() < 1) {
        return out;
    }
    for (const auto& x : roots(stat)) {
        const double scale = std::max(1.0, std::abs(x));
        if (std::abs(x.imag()) > 1e-6 * scale || x.real() < -1e-9 * scale) {
            continue;
        }
        out.push_back(std::sqrt(std::max(0.0, x.real())));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline void require_stable(const TransferFunction& g, double axis_tol, std::string_view what) {
    for (const auto& p : poles(g)) {
        if (p.real() >= -axis_tol) {
            throw DomainError(std::string(what) + " undefined: pole at " + format_root(p) +
                              " is not strictly in the left half plane");
        }
    }
}

template <typename Better>
NormResult extremum(const TransferFunction& g, Better better) {
    NormResult best{std::abs(g(Complex{0.0, 0.0})), 0.0};
    for (double w : stationary_frequencies(g)) {
        const double v = std::abs(g(Complex{0.0, w}));
        if (better(v, best.value)) {
            best = {v, w};
        }
    }
    const double hf = std::abs(g.high_frequency_gain());
    if (better(hf, best.value)) {
        best = {hf, kInf};
    }
    return best;
}

} // namespace detail

// sup over w >= 0 of |g(jw)|, computed exactly from the stationary points of
// |g(jw)|^2 (no frequency grid). Non-proper g gives +inf.
inline NormResult hinf_norm(const TransferFunction& g, double axis_tol = kAxisTol) {
    if (g.is_zero()) {
        return {0.0, 0.0};
    }
    if (!is_proper(g)) {
        return {kInf, kInf};
    }
    detail::require_stable(g, axis_tol, "H-infinity norm");
    return detail::extremum(g, [](double v, double best) { return v > best; });
}

// inf over w >= 0 of |g(jw)|. Strictly proper functions and functions with an
// imaginary-axis zero give 0.
inline double h_minus_index(const TransferFunction& g, double axis_tol = kAxisTol) {
    if (!is_proper(g)) {
        throw DomainError("H-minus index needs a proper transfer function");
    }
    detail::require_stable(g, axis_tol, "H-minus index");
    if (g.is_zero() || g.relative_degree() > 0) {
        return 0.0;
    }
    if (!classify_zeros(g, axis_tol).boundary_zeros.empty()) {
        return 0.0;
    }
    return detail::extremum(g, [](double v, double best) { return v < best; }).value;
}

enum class Orientation { oog, iig };

enum class InfiniteReason { non_proper, unshared_nmp_zero_in_divisor };

inline std::string_view to_string(Orientation o) { return o == Orientation::oog ? "oog" : "iig"; }

inline std::string_view to_string(InfiniteReason r) {
    return r == InfiniteReason::non_proper ? "non_proper" : "unshared_nmp_zero_in_divisor";
}

// Gain metrics for one transfer-function pair.
//
// hinf_ratio is ||n_second / n_first||_Hinf of the coprime numerators
// (N_p/N_r for the output-to-output gain, N_d/N_f for the input-to-input
// gain); oog = hinf_ratio^2 and iig_lower = 4 hinf_ratio^2. The classical
// bracket is stored squared: classical_lo <= hinf_ratio^2 <= classical_hi.
struct GainReport {
    Orientation orientation = Orientation::oog;
    TransferFunction ratio;
    double hinf_ratio = 0.0;
    double peak_omega = 0.0;
    double oog = 0.0;
    double iig_lower = 0.0;
    std::optional<double> classical_lo;
    std::optional<double> classical_hi;
    std::optional<InfiniteReason> infinite_reason;

    [[nodiscard]] bool finite() const noexcept { return !infinite_reason.has_value(); }
};

struct ClassicalBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// Squared bracket ||second||^2 / ||first||^2 <= ||second / first||^2 <=
// ||second||^2 / ||first||_-^2 for stable proper first (the fault or
// residual side) and second.
inline ClassicalBounds classical_bounds(const TransferFunction& first, const TransferFunction& second,
                                        double axis_tol = kAxisTol) {
    if (!is_proper(first) || !is_proper(second)) {
        throw DomainError("classical bounds need proper transfer functions");
    }
    const double n1 = hinf_norm(first, axis_tol).value;
    if (n1 == 0.0) {
        throw DomainError("classical bounds with an identically zero divisor");
    }
    const double n2 = hinf_norm(second, axis_tol).value;
    const double idx = h_minus_index(first, axis_tol);
    const double lo = (n2 * n2) / (n1 * n1);
    const double hi = idx == 0.0 ? (n2 == 0.0 ? 0.0 : kInf) : (n2 * n2) / (idx * idx);
    return {lo, hi};
}

namespace detail {

inline GainReport gain_report(const TransferFunction& first, const TransferFunction& second, Orientation orientation,
                              double axis_tol) {
    const auto side = orientation == Orientation::oog ? FactorSide::right : FactorSide::left;
    const CoprimePair pair = coprime_factorize(first, second, side, axis_tol);

    GainReport rep;
    rep.orientation = orientation;
    rep.ratio = numerator_ratio(pair);

    // Roots of the divisor numerator that survive cancellation show up as
    // poles of the ratio.
    for (const auto& p : poles(rep.ratio)) {
        if (std::abs(p.real()) <= axis_tol) {
            throw DegenerateError("degenerate: imaginary-axis zero at " + format_root(p) + " in the divisor numerator");
        }
        if (p.real() > axis_tol) {
            rep.infinite_reason = InfiniteReason::unshared_nmp_zero_in_divisor;
        }
    }
    if (!rep.infinite_reason && !is_proper(rep.ratio)) {
        rep.infinite_reason = InfiniteReason::non_proper;
    }

    if (rep.infinite_reason) {
        rep.hinf_ratio = rep.peak_omega = rep.oog = rep.iig_lower = kInf;
    } else {
        const auto norm = hinf_norm(rep.ratio, axis_tol);
        rep.hinf_ratio = norm.value;
        rep.peak_omega = norm.peak_omega;
        rep.oog = norm.value * norm.value;
        rep.iig_lower = 4.0 * rep.oog;
    }

    if (is_stable(first, axis_tol) && is_stable(second, axis_tol) && !first.is_zero()) {
        const auto cb = classical_bounds(first, second, axis_tol);
        rep.classical_lo = cb.lo;
        rep.classical_hi = cb.hi;
    }
    return rep;
}

} // namespace detail

// Output-to-output gain: oog = ||N_p / N_r||^2 (a lower bound on the
// worst-case performance energy under unit residual energy, tight for
// periodic trajectories). Infinite when N_r has a right-half-plane zero not
// shared by N_p, or when the ratio is not proper.
inline GainReport oog(const TransferFunction& t_ayr, const TransferFunction& t_ayp, double axis_tol = kAxisTol) {
    return detail::gain_report(t_ayr, t_ayp, Orientation::oog, axis_tol);
}

// Input-to-input gain lower bound 4 ||N_d / N_f||^2, with the disturbance
// scaling fixed at 2.
inline GainReport iig_lower(const TransferFunction& t_fr, const TransferFunction& t_dr, double axis_tol = kAxisTol) {
    return detail::gain_report(t_fr, t_dr, Orientation::iig, axis_tol);
}

} // namespace nmpgain
