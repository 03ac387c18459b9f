#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "polynomial.hpp"
#include "transfer.hpp"

namespace nmpgain {

using Rng = std::mt19937_64;

// Ranges for randomly generated test systems. Magnitudes are log-uniform.
struct RandomRootOptions {
    double min_magnitude = 0.1;
    double max_magnitude = 10.0;
    double min_damping = 0.1; // |Re| / |r| for complex pairs
    double complex_probability = 0.4;
};

inline double log_uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// count left-half-plane roots (real roots and conjugate pairs mixed).
inline std::vector<Complex> random_stable_roots(Rng& rng, int count, const RandomRootOptions& opt = {}) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Complex> out;
    while (static_cast<int>(out.size()) < count) {
        const double mag = log_uniform(rng, opt.min_magnitude, opt.max_magnitude);
        if (count - static_cast<int>(out.size()) >= 2 && u01(rng) < opt.complex_probability) {
            const double zeta = opt.min_damping + (1.0 - opt.min_damping) * u01(rng);
            const double re = -zeta * mag;
            const double im = mag * std::sqrt(std::max(0.0, 1.0 - zeta * zeta));
            out.emplace_back(re, im);
            out.emplace_back(re, -im);
        } else {
            out.emplace_back(-mag, 0.0);
        }
    }
    return out;
}

inline std::vector<Complex> mirror_into_rhp(std::vector<Complex> rts) {
    for (auto& r : rts) {
        r = -std::conj(r);
    }
    return rts;
}

inline double random_gain(Rng& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double g = log_uniform(rng, 0.1, 10.0);
    return u01(rng) < 0.5 ? -g : g;
}

// Stable proper function of denominator degree 1..max_degree; numerator roots
// are stable or mirrored into the right half plane at random.
inline TransferFunction random_stable_proper(Rng& rng, int max_degree = 6, const RandomRootOptions& opt = {}) {
    std::uniform_int_distribution<int> deg_den(1, max_degree);
    const int nd = deg_den(rng);
    std::uniform_int_distribution<int> deg_num(0, nd);
    const int nn = deg_num(rng);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto zs = random_stable_roots(rng, nn, opt);
    if (u01(rng) < 0.5) {
        zs = mirror_into_rhp(std::move(zs));
    }
    const auto ps = random_stable_roots(rng, nd, opt);
    return TransferFunction::from_factors(random_gain(rng), zs, ps);
}

// Stable, minimum-phase, biproper function of degree 1..max_degree.
inline TransferFunction random_min_phase_biproper(Rng& rng, int max_degree = 6, const RandomRootOptions& opt = {}) {
    std::uniform_int_distribution<int> deg(1, max_degree);
    const int n = deg(rng);
    const auto zs = random_stable_roots(rng, n, opt);
    const auto ps = random_stable_roots(rng, n, opt);
    return TransferFunction::from_factors(random_gain(rng), zs, ps);
}

// Point with Re in [0.1, 10] and Im in [-10, 10].
inline Complex random_rhp_point(Rng& rng) {
    std::uniform_real_distribution<double> im(-10.0, 10.0);
    return {log_uniform(rng, 0.1, 10.0), im(rng)};
}

} // namespace nmpgain
