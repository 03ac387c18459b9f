#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "error.hpp"
#include "polynomial.hpp"
#include "transfer.hpp"

namespace nmpgain {

// Which factorization was requested. For SISO systems the right form
// T = N M^-1 and the left form T = M^-1 N coincide; the tag is metadata.
enum class FactorSide { right, left };

// Stable proper factors sharing one denominator factor m:
// first = n_first / m, second = n_second / m.
struct CoprimePair {
    TransferFunction n_first;
    TransferFunction n_second;
    TransferFunction m;
    FactorSide side = FactorSide::right;
};

// Brings t1 and t2 to a common denominator d (root-multiset LCM) and divides
// everything by the Hurwitz polynomial q obtained from d by mirroring its
// unstable roots into the left half plane.
inline CoprimePair coprime_factorize(const TransferFunction& t1, const TransferFunction& t2, FactorSide side,
                                     double axis_tol = kAxisTol, double cancel_tol = kCancelTol) {
    if (!is_proper(t1) || !is_proper(t2)) {
        throw DomainError("coprime factorization needs proper transfer functions");
    }
    const auto p1 = poles(t1);
    const auto p2 = poles(t2);
    const auto match = detail::match_roots(p2, p1, cancel_tol);

    std::vector<bool> p1_shared(p1.size(), false);
    std::vector<Complex> only_in_2;
    for (std::size_t i = 0; i < p2.size(); ++i) {
        if (match[i] == detail::kNoMatch) {
            only_in_2.push_back(p2[i]);
        } else {
            p1_shared[match[i]] = true;
        }
    }
    std::vector<Complex> only_in_1;
    for (std::size_t j = 0; j < p1.size(); ++j) {
        if (!p1_shared[j]) {
            only_in_1.push_back(p1[j]);
        }
    }

    std::vector<Complex> common = p1;
    common.insert(common.end(), only_in_2.begin(), only_in_2.end());
    std::vector<Complex> mirrored;
    mirrored.reserve(common.size());
    for (const auto& r : common) {
        if (std::abs(r.real()) <= axis_tol) {
            throw DegenerateError("degenerate: boundary pole at " + format_root(r));
        }
        mirrored.push_back(r.real() > 0.0 ? -std::conj(r) : r);
    }

    const Polynomial d_common = Polynomial::from_roots(common);
    const Polynomial q = Polynomial::from_roots(mirrored);
    const Polynomial num1 = t1.num() * Polynomial::from_roots(only_in_2);
    const Polynomial num2 = t2.num() * Polynomial::from_roots(only_in_1);

    return {make_tf(num1, q, cancel_tol), make_tf(num2, q, cancel_tol), make_tf(d_common, q, cancel_tol), side};
}

// n_second / n_first: N_p / N_r for the output pair, N_d / N_f for the input
// pair. The shared stable denominator cancels.
inline TransferFunction numerator_ratio(const CoprimePair& pair, double cancel_tol = kCancelTol) {
    if (pair.n_first.is_zero()) {
        throw DomainError("numerator ratio with an identically zero divisor");
    }
    return ratio(pair.n_second, pair.n_first, cancel_tol);
}

// prod (s - z_i) / (s + conj(z_i)) over open right-half-plane zeros. Empty
// means the constant 1.
class BlaschkeProduct {
public:
    BlaschkeProduct() = default;

    explicit BlaschkeProduct(std::vector<Complex> nmp_zeros) : zeros_(std::move(nmp_zeros)) {
        for (const auto& z : zeros_) {
            if (!(z.real() > 0.0)) {
                throw DomainError("Blaschke zero " + format_root(z) + " is not in the open right half plane");
            }
        }
    }

    [[nodiscard]] const std::vector<Complex>& zeros() const noexcept { return zeros_; }
    [[nodiscard]] bool empty() const noexcept { return zeros_.empty(); }

    [[nodiscard]] Complex operator()(Complex s) const {
        Complex acc{1.0, 0.0};
        for (const auto& z : zeros_) {
            const Complex den = s + std::conj(z);
            if (std::abs(den) <= 1e-14 * detail::root_scale(z)) {
                throw DomainError("Blaschke product evaluated at its pole " + format_root(-std::conj(z)));
            }
            acc *= (s - z) / den;
        }
        return acc;
    }

    [[nodiscard]] TransferFunction as_transfer() const {
        std::vector<Complex> ps;
        ps.reserve(zeros_.size());
        for (const auto& z : zeros_) {
            ps.push_back(-std::conj(z));
        }
        return TransferFunction::from_factors(1.0, zeros_, ps);
    }

private:
    std::vector<Complex> zeros_;
};

inline Complex blaschke_eval(const BlaschkeProduct& b, Complex s) { return b(s); }

struct AllpassSplit {
    TransferFunction min_phase;
    BlaschkeProduct blaschke;
};

// g = min_phase * blaschke, with every right-half-plane zero of g mirrored
// into the left half plane in min_phase.
inline AllpassSplit allpass_split(const TransferFunction& g, double axis_tol = kAxisTol) {
    if (!is_proper(g)) {
        throw DomainError("all-pass split needs a proper transfer function");
    }
    if (g.is_zero()) {
        return {g, BlaschkeProduct{}};
    }
    const auto cls = classify_zeros(g, axis_tol);
    if (!cls.boundary_zeros.empty()) {
        throw DegenerateError("degenerate: imaginary-axis zero at " + format_root(cls.boundary_zeros.front()));
    }
    if (cls.nmp_zeros.empty()) {
        return {g, BlaschkeProduct{}};
    }
    std::vector<Complex> zs = cls.minimum_phase_zeros;
    for (const auto& z : cls.nmp_zeros) {
        zs.push_back(-std::conj(z));
    }
    return {make_tf(Polynomial::from_roots(zs, g.num().leading()), g.den()), BlaschkeProduct{cls.nmp_zeros}};
}

} // namespace nmpgain
