#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "polynomial.hpp"

namespace nmpgain {

// Zeros with |Re| at or below this are treated as lying on the imaginary axis.
inline constexpr double kAxisTol = 1e-7;
// Roots of numerator and denominator closer than this (relative to
// max(1, |root|)) cancel.
inline constexpr double kCancelTol = 1e-8;

inline std::string format_root(Complex r) {
    std::ostringstream os;
    os.precision(12);
    os << r.real();
    if (r.imag() != 0.0) {
        os << (r.imag() < 0.0 ? "-" : "+") << std::abs(r.imag()) << "j";
    }
    return os.str();
}

namespace detail {

inline std::vector<Complex> roots_or_empty(const Polynomial& p) {
    if (p.degree() < 1) {
        return {};
    }
    return roots(p);
}

inline std::size_t conj_partner(std::span<const Complex> v, std::size_t i) {
    const Complex target = std::conj(v[i]);
    if (i + 1 < v.size() && v[i + 1] == target) {
        return i + 1;
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j != i && v[j] == target) {
            return j;
        }
    }
    return v.size();
}

inline constexpr std::size_t kNoMatch = std::numeric_limits<std::size_t>::max();

// Nearest-neighbour matching of root multiset a against b within
// tol * max(1, |a_i|). Real roots match real roots; a complex root matches a
// complex root with the same sign of imaginary part, and its conjugate is
// matched to the partner's conjugate so that both remainders stay real.
// Expects the layout produced by roots(): exact zeros for real imaginary
// parts and exactly conjugate pairs.
inline std::vector<std::size_t> match_roots(std::span<const Complex> a, std::span<const Complex> b, double tol) {
    std::vector<std::size_t> match(a.size(), kNoMatch);
    std::vector<bool> used(b.size(), false);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (match[i] != kNoMatch || a[i].imag() < 0.0) {
            continue;
        }
        const bool real = a[i].imag() == 0.0;
        std::size_t best = kNoMatch;
        double best_dist = tol * root_scale(a[i]);
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j] || (b[j].imag() == 0.0) != real || b[j].imag() < 0.0) {
                continue;
            }
            const double dist = std::abs(a[i] - b[j]);
            if (dist <= best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        if (best == kNoMatch) {
            continue;
        }
        if (real) {
            match[i] = best;
            used[best] = true;
            continue;
        }
        const std::size_t ia = conj_partner(a, i);
        const std::size_t ib = conj_partner(b, best);
        if (ia == a.size() || ib == b.size() || used[ib]) {
            continue;
        }
        match[i] = best;
        match[ia] = ib;
        used[best] = true;
        used[ib] = true;
    }
    return match;
}

inline bool same_root_multiset(std::span<const Complex> a, std::span<const Complex> b, double tol) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t m : match_roots(a, b, tol)) {
        if (m == kNoMatch) {
            return false;
        }
    }
    return true;
}

// Removes pairs of roots shared between zeros and poles. Returns the number
// of cancelled pairs.
inline std::size_t cancel_common(std::vector<Complex>& zeros, std::vector<Complex>& poles, double tol) {
    const auto match = match_roots(zeros, poles, tol);
    std::vector<bool> drop_pole(poles.size(), false);
    std::vector<Complex> kept_zeros;
    std::size_t cancelled = 0;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        if (match[i] == kNoMatch) {
            kept_zeros.push_back(zeros[i]);
        } else {
            drop_pole[match[i]] = true;
            ++cancelled;
        }
    }
    std::vector<Complex> kept_poles;
    for (std::size_t j = 0; j < poles.size(); ++j) {
        if (!drop_pole[j]) {
            kept_poles.push_back(poles[j]);
        }
    }
    zeros = std::move(kept_zeros);
    poles = std::move(kept_poles);
    return cancelled;
}

} // namespace detail

// Ratio of two real polynomials. The canonical form has a monic denominator
// and no common numerator/denominator roots (within kCancelTol); the zero
// function is 0/1.
class TransferFunction {
public:
    TransferFunction() : num_{0.0}, den_{1.0} {}

    TransferFunction(Polynomial num, Polynomial den, double cancel_tol = kCancelTol) {
        if (den.is_zero()) {
            throw DomainError("zero denominator");
        }
        if (num.is_zero()) {
            num_ = Polynomial{0.0};
            den_ = Polynomial{1.0};
            return;
        }
        const double lead = den.leading();
        num *= 1.0 / lead;
        den *= 1.0 / lead;
        if (num.degree() >= 1 && den.degree() >= 1) {
            auto zs = roots(num);
            auto ps = roots(den);
            if (detail::cancel_common(zs, ps, cancel_tol) > 0) {
                *this = from_factors(num.leading(), zs, ps);
                return;
            }
        }
        num_ = std::move(num);
        den_ = std::move(den);
    }

    static TransferFunction constant(double c) { return {Polynomial::constant(c), Polynomial{1.0}}; }

    // gain * prod(s - z) / prod(s - p), no cancellation attempted.
    static TransferFunction from_factors(double gain, std::span<const Complex> zeros, std::span<const Complex> poles) {
        TransferFunction t;
        if (gain == 0.0) {
            return t;
        }
        t.num_ = Polynomial::from_roots(zeros, gain);
        t.den_ = Polynomial::from_roots(poles, 1.0);
        return t;
    }

    [[nodiscard]] const Polynomial& num() const noexcept { return num_; }
    [[nodiscard]] const Polynomial& den() const noexcept { return den_; }
    [[nodiscard]] bool is_zero() const noexcept { return num_.is_zero(); }

    // deg(den) - deg(num); negative for non-proper functions.
    [[nodiscard]] int relative_degree() const noexcept {
        return is_zero() ? std::numeric_limits<int>::max() : den_.degree() - num_.degree();
    }

    // Value at s; no pole check.
    [[nodiscard]] Complex operator()(Complex s) const { return num_(s) / den_(s); }

    // Limit as |s| -> infinity: 0 for strictly proper, the leading ratio for
    // biproper, +inf in magnitude for non-proper functions.
    [[nodiscard]] double high_frequency_gain() const noexcept {
        const int rd = relative_degree();
        if (rd > 0) {
            return 0.0;
        }
        if (rd == 0) {
            return num_.leading() / den_.leading();
        }
        return std::numeric_limits<double>::infinity();
    }

    friend bool operator==(const TransferFunction&, const TransferFunction&) = default;

private:
    Polynomial num_;
    Polynomial den_;
};

inline TransferFunction make_tf(Polynomial num, Polynomial den, double cancel_tol = kCancelTol) {
    return {std::move(num), std::move(den), cancel_tol};
}

inline std::vector<Complex> zeros(const TransferFunction& t) {
    if (t.is_zero()) {
        throw DomainError("zeros of the zero transfer function are undefined");
    }
    return detail::roots_or_empty(t.num());
}

inline std::vector<Complex> poles(const TransferFunction& t) { return detail::roots_or_empty(t.den()); }

struct ZeroClassification {
    std::vector<Complex> minimum_phase_zeros;
    std::vector<Complex> nmp_zeros;
    std::vector<Complex> boundary_zeros;
};

inline ZeroClassification classify_roots(std::span<const Complex> rts, double axis_tol) {
    ZeroClassification out;
    for (const auto& z : rts) {
        if (z.real() > axis_tol) {
            out.nmp_zeros.push_back(z);
        } else if (z.real() < -axis_tol) {
            out.minimum_phase_zeros.push_back(z);
        } else {
            out.boundary_zeros.push_back(z);
        }
    }
    return out;
}

inline ZeroClassification classify_zeros(const TransferFunction& t, double axis_tol = kAxisTol) {
    const auto zs = zeros(t);
    return classify_roots(zs, axis_tol);
}

inline bool is_proper(const TransferFunction& t) noexcept { return t.relative_degree() >= 0; }

inline bool is_stable(const TransferFunction& t, double axis_tol = kAxisTol) {
    for (const auto& p : poles(t)) {
        if (p.real() >= -axis_tol) {
            return false;
        }
    }
    return true;
}

inline Complex freq_response(const TransferFunction& t, double omega) {
    const Complex s{0.0, omega};
    const Complex d = t.den()(s);
    double scale = 0.0;
    double power = 1.0;
    for (double c : t.den().coeffs()) {
        scale += std::abs(c) * power;
        power *= std::max(1.0, std::abs(omega));
    }
    if (std::abs(d) <= 1e-10 * scale) {
        std::ostringstream os;
        os.precision(12);
        os << "imaginary-axis pole at omega=" << omega;
        throw DegenerateError(os.str());
    }
    return t.num()(s) / d;
}

// t1 / t2 with common roots cancelled. When both share the same denominator
// (root multisets equal within cancel_tol), the result is the plain
// numerator ratio num1 / num2.
inline TransferFunction ratio(const TransferFunction& t1, const TransferFunction& t2, double cancel_tol = kCancelTol) {
    if (t2.is_zero()) {
        throw DomainError("ratio with an identically zero divisor");
    }
    if (t1.is_zero()) {
        return {};
    }
    const auto p1 = poles(t1);
    const auto p2 = poles(t2);
    if (t1.den() == t2.den() || detail::same_root_multiset(p1, p2, cancel_tol)) {
        return make_tf(t1.num(), t2.num(), cancel_tol);
    }
    auto zs = detail::roots_or_empty(t1.num());
    zs.insert(zs.end(), p2.begin(), p2.end());
    auto ps = p1;
    const auto z2 = detail::roots_or_empty(t2.num());
    ps.insert(ps.end(), z2.begin(), z2.end());
    detail::cancel_common(zs, ps, cancel_tol);
    return TransferFunction::from_factors(t1.num().leading() / t2.num().leading(), zs, ps);
}

} // namespace nmpgain
