#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace nmpgain {

using Complex = std::complex<double>;

// Leading coefficients of a sum or difference are dropped when they are
// below this fraction of the operands they came from. Subtracting two monic polynomials of equal degree must lose a
// degree, otherwise every P = 1 - S construction would pick up a spurious
// root near infinity.
inline constexpr double kTrimThreshold = 1e-12;

// Real-coefficient polynomial stored in ascending order: coeffs()[k]
// multiplies s^k. The zero polynomial is the single coefficient 0.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) {
        if (coeffs_.empty()) {
            coeffs_.push_back(0.0);
        }
        trim(0.0);
    }

    Polynomial(std::initializer_list<double> ascending)
        : Polynomial(std::vector<double>(ascending)) {}

    static Polynomial constant(double c) { return Polynomial(std::vector<double>{c}); }

    // Real polynomial with the given roots and leading coefficient. Non-real
    // roots must come in conjugate pairs (matched within 1e-10).
    static Polynomial from_roots(std::span<const Complex> roots, double leading = 1.0);

    static Polynomial from_roots(std::initializer_list<Complex> roots, double leading = 1.0) {
        return from_roots(std::span<const Complex>(roots.begin(), roots.size()), leading);
    }

    [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const noexcept {
        return k < coeffs_.size() ? coeffs_[k] : 0.0;
    }

    // Degree of a nonzero polynomial; the zero polynomial reports 0.
    [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    [[nodiscard]] double leading() const noexcept { return coeffs_.back(); }

    [[nodiscard]] double max_abs_coeff() const noexcept {
        double m = 0.0;
        for (double c : coeffs_) {
            m = std::max(m, std::abs(c));
        }
        return m;
    }

    [[nodiscard]] Complex operator()(Complex s) const noexcept {
        Complex acc = coeffs_.back();
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            acc = acc * s + coeffs_[k];
        }
        return acc;
    }

    [[nodiscard]] double operator()(double x) const noexcept {
        double acc = coeffs_.back();
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            acc = acc * x + coeffs_[k];
        }
        return acc;
    }

    [[nodiscard]] Polynomial derivative() const {
        if (coeffs_.size() == 1) {
            return {};
        }
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) {
            d[k - 1] = static_cast<double>(k) * coeffs_[k];
        }
        return Polynomial(std::move(d));
    }

    // p(-s)
    [[nodiscard]] Polynomial mirrored() const {
        auto c = coeffs_;
        for (std::size_t k = 1; k < c.size(); k += 2) {
            c[k] = -c[k];
        }
        return Polynomial(std::move(c));
    }

    Polynomial& operator+=(const Polynomial& rhs) { return accumulate(rhs, 1.0); }

    Polynomial& operator-=(const Polynomial& rhs) { return accumulate(rhs, -1.0); }

    Polynomial& operator*=(double c) {
        for (double& v : coeffs_) {
            v *= c;
        }
        trim(0.0);
        return *this;
    }

    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
    friend Polynomial operator*(Polynomial p, double c) { return p *= c; }
    friend Polynomial operator*(double c, Polynomial p) { return p *= c; }
    friend Polynomial operator-(Polynomial p) { return p *= -1.0; }

    friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
        std::vector<double> out(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.coeffs_.size(); ++i) {
            for (std::size_t j = 0; j < q.coeffs_.size(); ++j) {
                out[i + j] += p.coeffs_[i] * q.coeffs_[j];
            }
        }
        return Polynomial(std::move(out));
    }

    Polynomial& operator*=(const Polynomial& rhs) { return *this = *this * rhs; }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim(double threshold) {
        while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= threshold) {
            coeffs_.pop_back();
        }
        if (coeffs_.size() == 1 && std::abs(coeffs_[0]) <= threshold) {
            coeffs_[0] = 0.0;
        }
    }

    // this + sign * rhs. Leading coefficients that cancel to rounding level
    // of their own operands are dropped; small but genuine ones are kept.
    Polynomial& accumulate(const Polynomial& rhs, double sign) {
        const std::size_t n = std::max(coeffs_.size(), rhs.coeffs_.size());
        std::vector<double> operand(n, 0.0);
        coeffs_.resize(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double b = k < rhs.coeffs_.size() ? sign * rhs.coeffs_[k] : 0.0;
            operand[k] = std::max(std::abs(coeffs_[k]), std::abs(b));
            coeffs_[k] += b;
        }
        while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= kTrimThreshold * operand[coeffs_.size() - 1]) {
            coeffs_.pop_back();
        }
        if (coeffs_.size() == 1 && std::abs(coeffs_[0]) <= kTrimThreshold * operand[0]) {
            coeffs_[0] = 0.0;
        }
        return *this;
    }

    std::vector<double> coeffs_;
};

inline Polynomial scale(const Polynomial& p, double c) { return p * c; }

inline Complex eval(const Polynomial& p, Complex s) { return p(s); }

namespace detail {

inline double root_scale(Complex r) { return std::max(1.0, std::abs(r)); }

// Parlett-Reinsch balancing with radix 2 (exact in floating point).
inline void balance(Eigen::MatrixXd& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            }
            if (c == 0.0 || r == 0.0) {
                continue;
            }
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

// Eigenvalues of the monic companion matrix of p (degree >= 1, p(0) != 0).
inline std::vector<Complex> companion_eigenvalues(const std::vector<double>& c) {
    const auto n = static_cast<Eigen::Index>(c.size() - 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        m(i, i - 1) = 1.0;
    }
    const double lead = c.back();
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, n - 1) = -c[static_cast<std::size_t>(i)] / lead;
    }
    balance(m);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw Error("companion eigenvalue iteration did not converge");
    }
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        out.push_back(solver.eigenvalues()[i]);
    }
    return out;
}

// Replaces each cluster of nearly coincident eigenvalues by its mean. The
// mean of a perturbed multiple root is far better conditioned than any of
// its members.
struct Cluster {
    Complex value;
    std::size_t count;
};

// Single-linkage groups of points closer than rel_tol (relative to scale).
inline std::vector<std::vector<Complex>> link_groups(const std::vector<Complex>& raw, double rel_tol) {
    const std::size_t n = raw.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(raw[i] - raw[j]) <= rel_tol * root_scale(raw[i])) {
                parent[find(i)] = find(j);
            }
        }
    }
    std::vector<std::vector<Complex>> groups;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] == n) {
            slot[r] = groups.size();
            groups.emplace_back();
        }
        groups[slot[r]].push_back(raw[i]);
    }
    return groups;
}

inline Cluster mean_of(const std::vector<Complex>& g) {
    Complex sum{0.0, 0.0};
    for (const auto& r : g) {
        sum += r;
    }
    return {sum / static_cast<double>(g.size()), g.size()};
}

inline std::vector<Cluster> merge_clusters(const std::vector<Complex>& raw, double rel_tol) {
    std::vector<Cluster> out;
    for (const auto& g : link_groups(raw, rel_tol)) {
        out.push_back(mean_of(g));
    }
    return out;
}

// A root of multiplicity m comes back from the eigensolver spread over a
// radius of roughly eps^(1/m). A group is kept when its radius fits that
// model and its mean is a root to rounding level; otherwise it is split
// again with the tolerance for the next lower multiplicity, ending at
// tight_tol.
inline double multiplicity_radius(std::size_t m) {
    return std::min(1e-2, 10.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / static_cast<double>(m)));
}

inline bool is_rounding_level_root(const std::vector<double>& c, Complex r) {
    Complex acc{0.0, 0.0};
    double mag = 0.0;
    const double ar = std::abs(r);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * r + *it;
        mag = mag * ar + std::abs(*it);
    }
    return std::abs(acc) <= 1e3 * std::numeric_limits<double>::epsilon() * mag;
}

inline void split_groups(const std::vector<Complex>& g, std::size_t m, double tight_tol, const std::vector<double>& c,
                         std::vector<Cluster>& out) {
    if (m < 2) {
        for (const auto& cl : merge_clusters(g, tight_tol)) {
            out.push_back(cl);
        }
        return;
    }
    for (const auto& sub : link_groups(g, std::max(tight_tol, 2.0 * multiplicity_radius(m)))) {
        const Cluster cl = mean_of(sub);
        double radius = 0.0;
        for (const auto& r : sub) {
            radius = std::max(radius, std::abs(r - cl.value));
        }
        const bool tight = radius <= tight_tol * root_scale(cl.value);
        const bool fits = radius <= multiplicity_radius(cl.count) * root_scale(cl.value) &&
                          is_rounding_level_root(c, cl.value);
        if (cl.count == 1 || tight || fits) {
            out.push_back(cl);
        } else {
            split_groups(sub, std::min(m, cl.count) - 1, tight_tol, c, out);
        }
    }
}

inline std::vector<Cluster> group_roots(const std::vector<Complex>& raw, double tight_tol,
                                        const std::vector<double>& c) {
    std::vector<Cluster> out;
    split_groups(raw, raw.size(), tight_tol, c, out);
    return out;
}

inline Complex newton_polish(const Polynomial& p, const Polynomial& dp, Complex r) {
    const Complex pr = p(r);
    const Complex dpr = dp(r);
    if (dpr == Complex{0.0, 0.0}) {
        return r;
    }
    const Complex candidate = r - pr / dpr;
    return std::abs(p(candidate)) < std::abs(pr) ? candidate : r;
}

} // namespace detail

// All deg(p) complex roots with multiplicity. Real roots carry an exactly
// zero imaginary part; conjugate pairs are adjacent (positive imaginary part
// first) and exactly conjugate. Sorted by ascending real part.
inline std::vector<Complex> roots(const Polynomial& p) {
    if (p.degree() < 1) {
        throw DomainError("no roots of a constant");
    }
    constexpr double cluster_tol = 1e-6;
    constexpr double real_tol = 1e-9;

    std::vector<double> c = p.coeffs();
    std::size_t zero_roots = 0;
    while (c.size() > 1 && c.front() == 0.0) {
        c.erase(c.begin());
        ++zero_roots;
    }

    std::vector<Complex> reals(zero_roots, Complex{0.0, 0.0});
    std::vector<Complex> uppers;
    if (c.size() > 1) {
        const Polynomial reduced{std::vector<double>(c)};
        const Polynomial dreduced = reduced.derivative();
        for (const auto& cl : detail::group_roots(detail::companion_eigenvalues(c), cluster_tol, c)) {
            Complex r = cl.value;
            const bool is_real = std::abs(r.imag()) <= real_tol * detail::root_scale(r);
            if (!is_real && r.imag() < 0.0) {
                continue;
            }
            if (is_real) {
                r = {r.real(), 0.0};
            }
            for (std::size_t k = 0; k < cl.count; ++k) {
                if (cl.count == 1) {
                    r = detail::newton_polish(reduced, dreduced, r);
                    if (is_real) {
                        r = {r.real(), 0.0};
                    }
                }
                (is_real ? reals : uppers).push_back(r);
            }
        }
    }
    if (reals.size() + 2 * uppers.size() != static_cast<std::size_t>(p.degree())) {
        throw Error("root finder lost conjugate symmetry");
    }

    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(p.degree()));
    for (const auto& r : reals) {
        out.push_back(r);
    }
    for (const auto& u : uppers) {
        out.push_back(u);
        out.push_back(std::conj(u));
    }
    std::stable_sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) {
            return a.real() < b.real();
        }
        return std::abs(a.imag()) < std::abs(b.imag());
    });
    // stable_sort keeps each (upper, lower) pair in order unless another root
    // shares the real part exactly; restore adjacency in that case.
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if (out[i].imag() > 0.0 && out[i + 1] != std::conj(out[i])) {
            auto it = std::find(out.begin() + static_cast<std::ptrdiff_t>(i) + 1, out.end(), std::conj(out[i]));
            if (it != out.end()) {
                std::rotate(out.begin() + static_cast<std::ptrdiff_t>(i) + 1, it, it + 1);
            }
        }
    }
    return out;
}

inline Polynomial Polynomial::from_roots(std::span<const Complex> rts, double leading) {
    constexpr double pair_tol = 1e-10;
    Polynomial acc = Polynomial::constant(leading);
    std::vector<bool> used(rts.size(), false);
    for (std::size_t i = 0; i < rts.size(); ++i) {
        if (used[i]) {
            continue;
        }
        used[i] = true;
        const Complex r = rts[i];
        if (std::abs(r.imag()) <= pair_tol * detail::root_scale(r)) {
            acc = acc * Polynomial{-r.real(), 1.0};
            continue;
        }
        std::size_t partner = rts.size();
        double best = pair_tol * detail::root_scale(r);
        for (std::size_t j = i + 1; j < rts.size(); ++j) {
            if (used[j]) {
                continue;
            }
            const double dist = std::abs(rts[j] - std::conj(r));
            if (dist <= best) {
                best = dist;
                partner = j;
            }
        }
        if (partner == rts.size()) {
            throw DomainError("complex root without a conjugate partner");
        }
        used[partner] = true;
        const Complex avg = 0.5 * (r + std::conj(rts[partner]));
        acc = acc * Polynomial{std::norm(avg), -2.0 * avg.real(), 1.0};
    }
    return acc;
}

} // namespace nmpgain
