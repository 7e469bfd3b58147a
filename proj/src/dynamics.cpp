#include "bimodal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace bimodal {

namespace {

constexpr cplx kI{0.0, 1.0};

struct Derivative {
    cplx a1, a2, u;
};

Derivative three_wave_rhs(const ThreeWaveParams& p, double t, cplx a1, cplx a2, cplx u) {
    const cplx phase = std::polar(1.0, p.delta * t);
    const cplx phase_c = std::conj(phase);
    const cplx beta_c = std::conj(p.beta);
    return {
        -p.kappa1 * (a1 - p.pump) - kI * p.delta1 * a1 - kI * beta_c * std::conj(u) * a2 * phase_c,
        -p.kappa2 * a2 - kI * p.delta2 * a2 - kI * p.beta * u * a1 * phase,
        -p.gamma * u - kI * beta_c * std::conj(a1) * a2 * phase_c,
    };
}

double max_rate(const ThreeWaveParams& p, const ThreeWaveState& s) {
    const double amp = std::max({std::abs(s.a1), std::abs(s.a2), std::abs(s.u), std::abs(p.pump)});
    return std::max({p.kappa1, p.kappa2, p.gamma, std::abs(p.delta1), std::abs(p.delta2), std::abs(p.delta),
                     std::abs(p.beta) * amp});
}

}  // namespace

std::vector<ThreeWaveState> evolve_three_wave(const ThreeWaveParams& params, const ThreeWaveState& init,
                                              double t_end, double dt, std::size_t record_every) {
    const ThreeWaveParams p = validate(params);
    if (!init.finite()) throw ValidationError("initial three-wave state must be finite");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
    if (!(t_end >= init.t)) throw ValidationError("t_end must not precede the initial time");
    if (record_every == 0) throw ValidationError("record_every must be at least 1");
    if (dt * max_rate(p, init) >= 0.1) {
        throw ValidationError("time step too large: dt * max(rate) must stay below 0.1");
    }

    const auto steps = static_cast<std::size_t>(std::llround((t_end - init.t) / dt));
    std::vector<ThreeWaveState> out;
    out.reserve(steps / record_every + 2);
    out.push_back(init);

    cplx a1 = init.a1;
    cplx a2 = init.a2;
    cplx u = init.u;
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = init.t + static_cast<double>(n) * dt;
        const double h = dt;
        const auto k1 = three_wave_rhs(p, t, a1, a2, u);
        const auto k2 = three_wave_rhs(p, t + 0.5 * h, a1 + 0.5 * h * k1.a1, a2 + 0.5 * h * k1.a2, u + 0.5 * h * k1.u);
        const auto k3 = three_wave_rhs(p, t + 0.5 * h, a1 + 0.5 * h * k2.a1, a2 + 0.5 * h * k2.a2, u + 0.5 * h * k2.u);
        const auto k4 = three_wave_rhs(p, t + h, a1 + h * k3.a1, a2 + h * k3.a2, u + h * k3.u);
        a1 += h / 6.0 * (k1.a1 + 2.0 * k2.a1 + 2.0 * k3.a1 + k4.a1);
        a2 += h / 6.0 * (k1.a2 + 2.0 * k2.a2 + 2.0 * k3.a2 + k4.a2);
        u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);

        const ThreeWaveState s{a1, a2, u, init.t + static_cast<double>(n + 1) * dt};
        if (!s.finite()) {
            throw NumericalError("three-wave state became non-finite at t = " + std::to_string(s.t));
        }
        if ((n + 1) % record_every == 0 || n + 1 == steps) out.push_back(s);
    }
    return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<ThreeWaveState>& trajectory) {
    const auto old_precision = out.precision(17);
    out << "t,Re(a1),Im(a1),Re(a2),Im(a2),Re(u),Im(u)\n";
    for (const auto& s : trajectory) {
        out << s.t << ',' << s.a1.real() << ',' << s.a1.imag() << ',' << s.a2.real() << ',' << s.a2.imag() << ','
            << s.u.real() << ',' << s.u.imag() << '\n';
    }
    out.precision(old_precision);
}

DriftMatrix drift_matrix(const SystemParams& params) {
    const SystemParams p = validate(params);
    DriftMatrix d;
    d.m << -kI * p.delta - p.kappa2, -kI * p.g1, -kI * p.g2,
           -kI * std::conj(p.g1), -kI * p.omega - p.gamma1, 0.0,
           -kI * std::conj(p.g2), 0.0, kI * p.omega - p.gamma2;
    return d;
}

std::array<cplx, 3> drift_eigenvalues(const SystemParams& params) {
    const auto d = drift_matrix(params);
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(d.m, false);
    if (solver.info() != Eigen::Success) throw NumericalError("drift eigen-decomposition failed");
    std::array<cplx, 3> ev{solver.eigenvalues()(0), solver.eigenvalues()(1), solver.eigenvalues()(2)};
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
    return ev;
}

double slowest_decay_rate(const SystemParams& params) {
    const auto ev = drift_eigenvalues(params);
    const double scale = params.kappa2 + params.gamma1 + params.gamma2;
    double slowest = 0.0;
    for (const auto& l : ev) {
        const double rate = -l.real();
        if (rate > 1e-12 * scale && (slowest == 0.0 || rate < slowest)) slowest = rate;
    }
    return slowest;
}

ReducedDrift adiabatic_reduce(const SystemParams& params) {
    const SystemParams p = validate(params);
    const cplx cavity = p.kappa2 + kI * p.delta;
    const double denom = p.kappa2 * p.kappa2 + p.delta * p.delta;
    const double g1sq = std::norm(p.g1);
    const double g2sq = std::norm(p.g2);

    ReducedDrift r;
    r.mode_coupling = -std::conj(p.g1) * p.g2 / cavity;
    r.m << -kI * p.omega - p.gamma1 - g1sq / cavity, r.mode_coupling,
           -std::conj(p.g2) * p.g1 / cavity, kI * p.omega - p.gamma2 - g2sq / cavity;
    r.effective_width = {p.gamma1 + g1sq * p.kappa2 / denom, p.gamma2 + g2sq * p.kappa2 / denom};
    r.frequency_shift = {-p.delta * g1sq / denom, -p.delta * g2sq / denom};
    r.adiabatic_regime = p.kappa2 > 10.0 * std::max(p.gamma1, p.gamma2);
    if (!r.adiabatic_regime) {
        r.warning = "adiabatic elimination assumes kappa2 > 10 max(gamma1, gamma2)";
    }
    return r;
}

Eigen2 eigen_2x2(const Eigen::Matrix2cd& m) {
    const cplx a = m(0, 0);
    const cplx b = m(0, 1);
    const cplx c = m(1, 0);
    const cplx d = m(1, 1);
    const double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    const double tol = 1e-12 * scale;

    const cplx half_trace = 0.5 * (a + d);
    const cplx s = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    // Add the root with the sign that avoids cancellation; the other follows from the determinant.
    const cplx big = (std::real(std::conj(half_trace) * s) >= 0.0) ? half_trace + s : half_trace - s;
    const cplx det = a * d - b * c;
    const cplx small = (std::abs(big) > 0.0) ? det / big : cplx(0.0, 0.0);

    Eigen2 out;
    out.values = {big, small};
    if (out.values[1].real() > out.values[0].real()) std::swap(out.values[0], out.values[1]);
    out.degenerate = std::abs(out.values[0] - out.values[1]) <= tol || scale == 0.0;

    for (std::size_t k = 0; k < 2; ++k) {
        const cplx l = out.values[k];
        Eigen::Vector2cd u(b, l - a);
        Eigen::Vector2cd w(l - d, c);
        Eigen::Vector2cd v = (u.norm() >= w.norm()) ? u : w;
        if (v.norm() <= tol || v.norm() == 0.0) {
            // m is (numerically) l * I: every vector is an eigenvector.
            v = (k == 0) ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
            out.degenerate = true;
        }
        out.vectors[k] = v / v.norm();
    }
    return out;
}

std::string to_string(ModeLabel label) {
    switch (label) {
        case ModeLabel::plus: return "plus";
        case ModeLabel::minus: return "minus";
        case ModeLabel::b1: return "b1";
        case ModeLabel::b2: return "b2";
        case ModeLabel::none: break;
    }
    return "none";
}

std::string to_string(Labeling labeling) {
    switch (labeling) {
        case Labeling::collective: return "collective";
        case Labeling::bare: return "bare";
        case Labeling::degenerate: return "degenerate";
        case Labeling::ambiguous: break;
    }
    return "ambiguous";
}

std::optional<cplx> CollectiveModes::rate(ModeLabel label) const {
    for (const auto& m : modes) {
        if (m.label == label && label != ModeLabel::none) return m.rate;
    }
    return std::nullopt;
}

CollectiveModes collective_rates(const SystemParams& params) {
    const auto reduced = adiabatic_reduce(params);
    const auto eig = eigen_2x2(reduced.m);

    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const Eigen::Vector2cd sym(inv_sqrt2, inv_sqrt2);
    const Eigen::Vector2cd anti(inv_sqrt2, -inv_sqrt2);
    constexpr double tie = 1e-9;

    CollectiveModes out;
    for (std::size_t k = 0; k < 2; ++k) {
        auto& mode = out.modes[k];
        mode.eigenvalue = eig.values[k];
        mode.rate = -eig.values[k];
        mode.vector = eig.vectors[k];
        mode.overlap_plus = std::norm(sym.dot(mode.vector));
        mode.overlap_minus = std::norm(anti.dot(mode.vector));
    }
    if (eig.degenerate) {
        out.labeling = Labeling::degenerate;
        return out;
    }

    auto& m0 = out.modes[0];
    auto& m1 = out.modes[1];
    const bool plus_first = m0.overlap_plus > 0.5 + tie && m1.overlap_minus > 0.5 + tie;
    const bool minus_first = m0.overlap_minus > 0.5 + tie && m1.overlap_plus > 0.5 + tie;
    if (plus_first || minus_first) {
        out.labeling = Labeling::collective;
        m0.label = plus_first ? ModeLabel::plus : ModeLabel::minus;
        m1.label = plus_first ? ModeLabel::minus : ModeLabel::plus;
        return out;
    }

    const auto weight = [](const Eigen::Vector2cd& v, int i) { return std::norm(v(i)); };
    const bool b1_first = weight(m0.vector, 0) > 0.5 + tie && weight(m1.vector, 1) > 0.5 + tie;
    const bool b2_first = weight(m0.vector, 1) > 0.5 + tie && weight(m1.vector, 0) > 0.5 + tie;
    if (b1_first || b2_first) {
        out.labeling = Labeling::bare;
        m0.label = b1_first ? ModeLabel::b1 : ModeLabel::b2;
        m1.label = b1_first ? ModeLabel::b2 : ModeLabel::b1;
        return out;
    }
    out.labeling = Labeling::ambiguous;
    return out;
}

}  // namespace bimodal
