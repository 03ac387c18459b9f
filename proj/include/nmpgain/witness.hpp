#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "factorization.hpp"
#include "gains.hpp"
#include "transfer.hpp"

namespace nmpgain {

// Detection threshold on residual energy.
inline constexpr double kDetectionThreshold = 1.0;

// Single-input single-output realization x' = a x + b u, y = c x + d u.
struct StateSpaceSystem {
    Eigen::MatrixXd a_matrix;
    Eigen::VectorXd b_matrix;
    Eigen::RowVectorXd c_matrix;
    double d_scalar = 0.0;

    [[nodiscard]] Eigen::Index order() const noexcept { return a_matrix.rows(); }
};

// Uniformly sampled signal starting at t = 0.
struct Signal {
    double dt = 1.0;
    std::vector<double> samples;

    [[nodiscard]] double horizon() const noexcept {
        return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1);
    }

    [[nodiscard]] double time(std::size_t i) const noexcept { return dt * static_cast<double>(i); }

    // Squared L2 norm by the trapezoidal rule.
    [[nodiscard]] double energy() const noexcept {
        if (samples.size() < 2) {
            return 0.0;
        }
        double acc = 0.0;
        for (double v : samples) {
            acc += v * v;
        }
        acc -= 0.5 * (samples.front() * samples.front() + samples.back() * samples.back());
        return acc * dt;
    }

    Signal& operator*=(double k) {
        for (double& v : samples) {
            v *= k;
        }
        return *this;
    }

    friend Signal operator*(double k, Signal s) { return s *= k; }
};

inline bool same_grid(const Signal& a, const Signal& b) {
    return a.samples.size() == b.samples.size() && std::abs(a.dt - b.dt) <= 1e-12 * std::max(a.dt, b.dt);
}

inline Signal operator+(const Signal& a, const Signal& b) {
    if (!same_grid(a, b)) {
        throw DomainError("signals on different grids");
    }
    Signal out = a;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] += b.samples[i];
    }
    return out;
}

// Controllable canonical form. Denominators are monic in canonical transfer
// functions, so the feedthrough is the leading numerator coefficient when
// biproper.
inline StateSpaceSystem realize(const TransferFunction& t) {
    if (!is_proper(t)) {
        throw DomainError("cannot realize a non-proper transfer function");
    }
    const int n = t.den().degree();
    StateSpaceSystem sys;
    sys.a_matrix = Eigen::MatrixXd::Zero(n, n);
    sys.b_matrix = Eigen::VectorXd::Zero(n);
    sys.c_matrix = Eigen::RowVectorXd::Zero(n);
    sys.d_scalar = t.is_zero() ? 0.0 : (t.relative_degree() == 0 ? t.num().leading() : 0.0);
    if (n == 0) {
        sys.d_scalar = t.num()[0] / t.den()[0];
        return sys;
    }
    const Polynomial strict = t.num() - sys.d_scalar * t.den();
    for (int i = 0; i + 1 < n; ++i) {
        sys.a_matrix(i, i + 1) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        sys.a_matrix(n - 1, i) = -t.den()[static_cast<std::size_t>(i)];
        sys.c_matrix(i) = strict[static_cast<std::size_t>(i)];
    }
    sys.b_matrix(n - 1) = 1.0;
    return sys;
}

// Fixed-step classical RK4 from x(0) = 0, with the input linearly
// interpolated inside each step. Output on the input grid.
inline Signal simulate(const StateSpaceSystem& sys, const Signal& input) {
    if (!(input.dt > 0.0)) {
        throw DomainError("simulation step must be positive");
    }
    Signal out{input.dt, std::vector<double>(input.samples.size(), 0.0)};
    const Eigen::Index n = sys.order();
    if (n == 0) {
        for (std::size_t i = 0; i < input.samples.size(); ++i) {
            out.samples[i] = sys.d_scalar * input.samples[i];
        }
        return out;
    }
    const double h = input.dt;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    auto rhs = [&](const Eigen::VectorXd& state, double u) -> Eigen::VectorXd {
        return sys.a_matrix * state + sys.b_matrix * u;
    };
    for (std::size_t i = 0; i < input.samples.size(); ++i) {
        const double u0 = input.samples[i];
        out.samples[i] = sys.c_matrix.dot(x) + sys.d_scalar * u0;
        if (i + 1 == input.samples.size()) {
            break;
        }
        const double u1 = input.samples[i + 1];
        const double um = 0.5 * (u0 + u1);
        const Eigen::VectorXd k1 = rhs(x, u0);
        const Eigen::VectorXd k2 = rhs(x + 0.5 * h * k1, um);
        const Eigen::VectorXd k3 = rhs(x + 0.5 * h * k2, um);
        const Eigen::VectorXd k4 = rhs(x + h * k3, u1);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

// Carrier frequency, time scales and default discretization for a witness.
struct WitnessPlan {
    double omega = 0.0;           // carrier frequency in rad/s; 0 means a constant carrier
    double reference_time = 1.0;  // one carrier period, or the dominant time constant
    double min_horizon = 50.0;    // 50 reference times
    double default_horizon = 100.0;
    double default_dt = 1.0 / 64.0;
};

inline WitnessPlan plan_witness(const GainReport& report, const TransferFunction& first,
                                const TransferFunction& second) {
    if (!report.finite()) {
        throw DomainError(std::string("infinite gain (") + std::string(to_string(*report.infinite_reason)) +
                          "): no finite witness exists");
    }
    double slowest = kInf;
    double fastest = 0.0;
    for (const auto* t : {&first, &second}) {
        for (const auto& p : poles(*t)) {
            slowest = std::min(slowest, std::abs(p.real()));
            fastest = std::max(fastest, std::abs(p));
        }
    }
    const double time_constant = std::isfinite(slowest) && slowest > 0.0 ? 1.0 / slowest : 1.0;

    WitnessPlan plan;
    if (report.peak_omega == 0.0 || !std::isfinite(report.peak_omega)) {
        plan.omega = std::isfinite(report.peak_omega) ? 0.0 : 100.0 * std::max(fastest, 1.0);
        plan.reference_time = time_constant;
    } else {
        plan.omega = report.peak_omega;
        plan.reference_time = 2.0 * std::numbers::pi / plan.omega;
    }
    plan.min_horizon = 50.0 * plan.reference_time;
    plan.default_horizon = 100.0 * plan.reference_time;
    double dt = plan.omega > 0.0 ? 2.0 * std::numbers::pi / plan.omega / 64.0 : time_constant / 64.0;
    if (fastest > 0.0) {
        dt = std::min(dt, 0.5 / fastest);
    }
    plan.default_dt = dt;
    return plan;
}

namespace detail {

inline void check_horizon(const WitnessPlan& plan, double horizon, double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("dt must be positive");
    }
    if (!(horizon >= plan.min_horizon * (1.0 - 1e-9))) {
        throw DomainError("horizon shorter than 50 reference periods");
    }
    if (horizon / dt > 5e7) {
        throw DomainError("horizon / dt exceeds 5e7 samples");
    }
}

// w(t) sin(omega t) with a cosine taper over the first and last 10% of the
// horizon (w = 1 in between); a constant carrier when omega = 0.
inline Signal tapered_carrier(double omega, double horizon, double dt) {
    const auto n = static_cast<std::size_t>(std::llround(horizon / dt)) + 1;
    const double taper = 0.1 * horizon;
    Signal s{dt, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s.time(i);
        double w = 1.0;
        if (t < taper) {
            w = 0.5 * (1.0 - std::cos(std::numbers::pi * t / taper));
        } else if (t > horizon - taper) {
            w = 0.5 * (1.0 - std::cos(std::numbers::pi * std::max(0.0, horizon - t) / taper));
        }
        s.samples[i] = w * (omega > 0.0 ? std::sin(omega * t) : 1.0);
    }
    return s;
}

inline void require_stable_for_simulation(const TransferFunction& t, const char* name) {
    if (!is_stable(t)) {
        throw DomainError(std::string(name) + " is not stable; time-domain witness would diverge");
    }
}

} // namespace detail

struct StealthyAttack {
    Signal attack;
    Signal residual_output;     // y_r
    Signal performance_output;  // y_p
    double achieved_yp_energy = 0.0;
    double yr_energy = 0.0;
    double oog = 0.0;
    double omega = 0.0;
};

// Windowed sinusoid at the OOG peak frequency, scaled so the residual energy
// equals the detection threshold.
inline StealthyAttack build_stealthy_attack(const TransferFunction& t_ayr, const TransferFunction& t_ayp,
                                            double horizon, double dt) {
    const GainReport rep = oog(t_ayr, t_ayp);
    const WitnessPlan plan = plan_witness(rep, t_ayr, t_ayp);
    detail::check_horizon(plan, horizon, dt);
    detail::require_stable_for_simulation(t_ayr, "T_ayr");
    detail::require_stable_for_simulation(t_ayp, "T_ayp");

    const auto sys_r = realize(t_ayr);
    const auto sys_p = realize(t_ayp);
    Signal a = detail::tapered_carrier(plan.omega, horizon, dt);
    const double unit = simulate(sys_r, a).energy();
    if (!(unit > 0.0)) {
        throw DomainError("attack carrier produces no residual output");
    }
    a *= std::sqrt(kDetectionThreshold / unit);

    StealthyAttack out;
    out.residual_output = simulate(sys_r, a);
    out.performance_output = simulate(sys_p, a);
    out.attack = std::move(a);
    out.yr_energy = out.residual_output.energy();
    out.achieved_yp_energy = out.performance_output.energy();
    out.oog = rep.oog;
    out.omega = plan.omega;
    return out;
}

struct UndetectableFault {
    Signal fault;
    Signal disturbance;
    Signal residual;                   // T_dr[d] + T_fr[f]
    Signal residual_disturbance_only;  // T_dr[d]
    double f_energy = 0.0;
    double d_energy = 0.0;
    double detectability_slack = 0.0;  // ||T_dr[d]||^2 - ||r||^2
    double iig_lower = 0.0;
    double omega = 0.0;
};

namespace detail {

// Fault masked by a disturbance: d = -c N_f[v] with ||d|| = 1, the scaled
// disturbance d~ = -xi d, and f = xi c N_d[v], where v is the tapered carrier.
// Then T_fr[f] = M^-1 N_f N_d[xi c v] = T_dr[d~] holds exactly, so the
// residual is (1 - xi) T_dr[d].
inline UndetectableFault build_masked_fault(const TransferFunction& t_fr, const TransferFunction& t_dr,
                                            double horizon, double dt, double xi) {
    const GainReport rep = iig_lower(t_fr, t_dr);
    const WitnessPlan plan = plan_witness(rep, t_fr, t_dr);
    check_horizon(plan, horizon, dt);
    require_stable_for_simulation(t_fr, "T_fr");
    require_stable_for_simulation(t_dr, "T_dr");

    const CoprimePair pair = coprime_factorize(t_fr, t_dr, FactorSide::left);
    const Signal carrier = tapered_carrier(plan.omega, horizon, dt);
    const Signal base_d = simulate(realize(pair.n_first), carrier);
    const Signal base_f = simulate(realize(pair.n_second), carrier);
    const double unit = base_d.energy();
    if (!(unit > 0.0)) {
        throw DomainError("fault carrier produces no disturbance");
    }
    const double c = 1.0 / std::sqrt(unit);

    UndetectableFault out;
    out.disturbance = (-c) * base_d;
    out.fault = (xi * c) * base_f;
    out.residual_disturbance_only = simulate(realize(t_dr), out.disturbance);
    out.residual = out.residual_disturbance_only + simulate(realize(t_fr), out.fault);
    out.f_energy = out.fault.energy();
    out.d_energy = out.disturbance.energy();
    out.detectability_slack = out.residual_disturbance_only.energy() - out.residual.energy();
    out.iig_lower = rep.iig_lower;
    out.omega = plan.omega;
    return out;
}

} // namespace detail

inline UndetectableFault build_undetectable_fault(const TransferFunction& t_fr, const TransferFunction& t_dr,
                                                  double horizon, double dt) {
    return detail::build_masked_fault(t_fr, t_dr, horizon, dt, 2.0);
}

inline bool verify_undetectability(const Signal& r_with_fault, const Signal& r_disturbance_only) {
    if (!same_grid(r_with_fault, r_disturbance_only)) {
        throw DomainError("residual signals on different grids");
    }
    return r_with_fault.energy() <= r_disturbance_only.energy() * (1.0 + 1e-3);
}

// Two-column CSV "t,value" with 12 significant digits.
inline void write_csv(std::ostream& os, const Signal& s, const char* value_name = "value") {
    os << "t," << value_name << '\n';
    char buf[64];
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", s.time(i), s.samples[i]);
        os << buf;
    }
}

} // namespace nmpgain
