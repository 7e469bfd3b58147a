#include "bimodal/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bimodal/dynamics.hpp"

namespace bimodal {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_mode(int mode) {
    if (mode != 1 && mode != 2) throw ValidationError("mode must be 1 or 2");
}

void require_grid(const std::vector<double>& omegas) {
    if (omegas.empty()) throw ValidationError("frequency grid is empty");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!std::isfinite(omegas[i])) throw ValidationError("frequency grid contains non-finite values");
        if (i > 0 && !(omegas[i] > omegas[i - 1])) {
            throw ValidationError("frequency grid must be strictly increasing");
        }
    }
}

// Phonon response denominators B1 = i Omega - i w + Gamma1, B2 = -i Omega - i w + Gamma2.
struct Denominators {
    cplx cavity;
    cplx b1;
    cplx b2;
};

Denominators denominators(const SystemParams& p, double w) {
    return {kI * p.delta - kI * w + p.kappa2, kI * p.omega - kI * w + p.gamma1, -kI * p.omega - kI * w + p.gamma2};
}

[[noreturn]] void pole(double w) {
    throw NumericalError("spectrum is singular at omega = " + std::to_string(w) +
                         " (undamped phonon resonance)");
}

// Quadrature breakpoints: phonon resonances and the poles of the full
// response, each with a few multiples of its width, clipped to (lo, hi).
std::vector<double> breakpoints(const SystemParams& p, double lo, double hi) {
    std::vector<double> pts{lo, hi, p.omega, -p.omega};
    for (const cplx& l : drift_eigenvalues(p)) {
        // pole of the response at w = i*lambda
        const double centre = -l.imag();
        const double width = std::max(std::abs(l.real()), 1e-6 * p.kappa2);
        pts.push_back(centre);
        for (double m : {1.0, 4.0, 16.0, 64.0}) {
            pts.push_back(centre - m * width);
            pts.push_back(centre + m * width);
        }
    }
    std::vector<double> kept;
    for (double x : pts) {
        if (x >= lo && x <= hi) kept.push_back(x);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<double> out;
    const double min_gap = 1e-12 * std::max(1.0, hi - lo);
    for (double x : kept) {
        if (out.empty() || x - out.back() > min_gap) out.push_back(x);
    }
    if (out.back() < hi) out.back() = hi;
    return out;
}

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr unsigned kMaxDepth = 15;
constexpr double kQuadTol = 1e-11;

template <typename F>
double integrate_piecewise(F&& f, const std::vector<double>& pts, double& error) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double err = 0.0;
        total += Quadrature::integrate(f, pts[i], pts[i + 1], kMaxDepth, kQuadTol, &err);
        error += err;
    }
    return total;
}

void check_convergence(const OccupancyResult& r) {
    if (!std::isfinite(r.value) || !std::isfinite(r.error_estimate) ||
        r.error_estimate > 1e-8 * std::abs(r.value) + 1e-300) {
        throw NumericalError("occupancy quadrature did not converge (value " + std::to_string(r.value) +
                             ", error estimate " + std::to_string(r.error_estimate) + ")");
    }
}

void require_damped(const SystemParams& p, int mode) {
    const double g = mode == 1 ? p.gamma1 : p.gamma2;
    if (!(g > 0.0)) throw ValidationError("occupancy requires a positive phonon half-width gamma" + std::to_string(mode));
}

}  // namespace

std::string to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::phonon1: return "phonon1";
        case SpectrumKind::phonon2: return "phonon2";
        case SpectrumKind::antistokes: break;
    }
    return "antistokes";
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw ValidationError("uniform grid needs n >= 2 and hi > lo");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return w;
}

std::vector<double> default_grid(double kappa2) {
    return uniform_grid(-1.5 * kappa2, 1.5 * kappa2, 4001);
}

cplx d_of_omega(const SystemParams& params, double omega) {
    const SystemParams p = validate(params);
    const auto den = denominators(p, omega);
    cplx d = den.cavity;
    for (const auto& [g, b] : {std::pair{p.g1, den.b1}, std::pair{p.g2, den.b2}}) {
        const double gsq = std::norm(g);
        if (gsq == 0.0) continue;
        if (b == cplx(0.0, 0.0)) pole(omega);
        d += gsq / b;
    }
    return d;
}

double phonon_density(const SystemParams& params, int mode, double omega) {
    require_mode(mode);
    const SystemParams p = validate(params);
    const auto den = denominators(p, omega);
    // Own and partner response for the selected mode.
    const cplx own = mode == 1 ? den.b1 : den.b2;
    const cplx other = mode == 1 ? den.b2 : den.b1;
    const double own_rate = mode == 1 ? p.gamma1 * p.nbar1 : p.gamma2 * p.nbar2;
    const double other_rate = mode == 1 ? p.gamma2 * p.nbar2 : p.gamma1 * p.nbar1;
    const double other_gsq = std::norm(mode == 1 ? p.g2 : p.g1);
    if (own == cplx(0.0, 0.0)) pole(omega);

    const cplx d = d_of_omega(p, omega);  // throws on a coupled undamped pole
    cplx direct_amp = den.cavity;
    double mixed = 0.0;
    if (other_gsq > 0.0) {
        direct_amp += other_gsq / other;
        mixed = 2.0 * other_rate * std::norm(p.g1 * p.g2) / std::norm(other);
    }
    const double direct = 2.0 * own_rate * std::norm(direct_amp);
    return (direct + mixed) / (std::norm(d) * std::norm(own));
}

double antistokes_density(const SystemParams& params, double omega) {
    const SystemParams p = validate(params);
    const auto den = denominators(p, omega);
    const double g1sq = std::norm(p.g1);
    const double g2sq = std::norm(p.g2);
    if ((g1sq > 0.0 && den.b1 == cplx(0.0, 0.0)) || (g2sq > 0.0 && den.b2 == cplx(0.0, 0.0))) pole(omega);
    const double n1 = g1sq > 0.0 ? 2.0 * p.gamma1 * p.nbar1 * g1sq / std::norm(den.b1) : 0.0;
    const double n2 = g2sq > 0.0 ? 2.0 * p.gamma2 * p.nbar2 * g2sq / std::norm(den.b2) : 0.0;
    return (n1 + n2) / std::norm(d_of_omega(p, omega));
}

SpectrumCurve phonon_spectrum(const SystemParams& params, int mode, const std::vector<double>& omegas,
                              bool normalized) {
    require_mode(mode);
    const SystemParams p = validate(params);
    require_grid(omegas);
    const double span = std::abs(p.omega) + 20.0 * std::max(p.gamma1, p.gamma2);
    if (omegas.front() > -span || omegas.back() < span) {
        throw ValidationError("frequency grid must cover [-|omega| - 20 gamma, |omega| + 20 gamma]");
    }
    const double gamma = mode == 1 ? p.gamma1 : p.gamma2;
    const double nbar = mode == 1 ? p.nbar1 : p.nbar2;
    if (normalized && !(gamma > 0.0 && nbar > 0.0)) {
        throw ValidationError("normalized spectrum requires positive gamma and nbar for the selected mode");
    }

    SpectrumCurve curve{omegas, std::vector<double>(omegas.size()),
                        mode == 1 ? SpectrumKind::phonon1 : SpectrumKind::phonon2, normalized};
    const double scale = normalized ? gamma / (2.0 * nbar) : 1.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) curve.values[i] = scale * phonon_density(p, mode, omegas[i]);
    return curve;
}

SpectrumCurve antistokes_spectrum(const SystemParams& params, const std::vector<double>& omegas) {
    const SystemParams p = validate(params);
    require_grid(omegas);
    SpectrumCurve curve{omegas, std::vector<double>(omegas.size()), SpectrumKind::antistokes, false};
    for (std::size_t i = 0; i < omegas.size(); ++i) curve.values[i] = antistokes_density(p, omegas[i]);
    return curve;
}

OracleSpectra spectrum_oracle(const SystemParams& params, const std::vector<double>& omegas) {
    const SystemParams p = validate(params);
    require_grid(omegas);
    const Eigen::Matrix3cd m = drift_matrix(p).m;
    const std::array<double, 3> density{0.0, 2.0 * p.gamma1 * p.nbar1, 2.0 * p.gamma2 * p.nbar2};

    OracleSpectra out;
    out.phonon1 = {omegas, std::vector<double>(omegas.size()), SpectrumKind::phonon1, false};
    out.phonon2 = {omegas, std::vector<double>(omegas.size()), SpectrumKind::phonon2, false};
    out.antistokes = {omegas, std::vector<double>(omegas.size()), SpectrumKind::antistokes, false};

    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const Eigen::Matrix3cd k = cplx(0.0, -omegas[i]) * Eigen::Matrix3cd::Identity() - m;
        Eigen::FullPivLU<Eigen::Matrix3cd> lu(k);
        if (!lu.isInvertible()) {
            throw NumericalError("frequency-domain system is singular at omega = " + std::to_string(omegas[i]));
        }
        const Eigen::Matrix3cd response = lu.inverse();
        std::array<double, 3> s{0.0, 0.0, 0.0};
        for (int row = 0; row < 3; ++row) {
            for (int ch = 0; ch < 3; ++ch) s[static_cast<std::size_t>(row)] += density[static_cast<std::size_t>(ch)] * std::norm(response(row, ch));
        }
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
            throw NumericalError("frequency-domain solve produced non-finite values");
        }
        out.antistokes.values[i] = s[0];
        out.phonon1.values[i] = s[1];
        out.phonon2.values[i] = s[2];
    }
    return out;
}

OccupancyResult occupancy(const SystemParams& params, int mode) {
    require_mode(mode);
    const SystemParams p = validate(params);
    require_damped(p, mode);

    const double window = std::abs(p.omega) + 50.0 * p.kappa2;
    auto f = [&](double w) { return phonon_density(p, mode, w); };

    OccupancyResult r;
    r.core_window = window;
    double err = 0.0;
    double total = integrate_piecewise(f, breakpoints(p, -window, window), err);
    const double inf = std::numeric_limits<double>::infinity();
    double tail_err = 0.0;
    total += Quadrature::integrate(f, -inf, -window, kMaxDepth, kQuadTol, &tail_err);
    err += tail_err;
    total += Quadrature::integrate(f, window, inf, kMaxDepth, kQuadTol, &tail_err);
    err += tail_err;

    r.value = total / kTwoPi;
    r.error_estimate = err / kTwoPi;
    check_convergence(r);
    return r;
}

OccupancyResult occupancy_window(const SystemParams& params, int mode, double lo, double hi) {
    require_mode(mode);
    const SystemParams p = validate(params);
    require_damped(p, mode);
    if (!(hi > lo)) throw ValidationError("integration window must have hi > lo");
    auto f = [&](double w) { return phonon_density(p, mode, w); };
    OccupancyResult r;
    r.core_window = 0.5 * (hi - lo);
    double err = 0.0;
    r.value = integrate_piecewise(f, breakpoints(p, lo, hi), err) / kTwoPi;
    r.error_estimate = err / kTwoPi;
    check_convergence(r);
    return r;
}

double occupancy_trapezoid(const SystemParams& params, int mode, double lo, double hi, std::size_t points) {
    require_mode(mode);
    const SystemParams p = validate(params);
    if (points < 2 || !(hi > lo)) throw ValidationError("trapezoid needs at least two points and hi > lo");
    const double h = (hi - lo) / static_cast<double>(points - 1);
    double sum = 0.5 * (phonon_density(p, mode, lo) + phonon_density(p, mode, hi));
    for (std::size_t i = 1; i + 1 < points; ++i) {
        sum += phonon_density(p, mode, lo + h * static_cast<double>(i));
    }
    return sum * h / kTwoPi;
}

double cooling_ratio(const SystemParams& params, int mode) {
    require_mode(mode);
    const SystemParams p = validate(params);
    const double nbar = mode == 1 ? p.nbar1 : p.nbar2;
    if (!(nbar > 0.0)) throw ValidationError("cooling ratio requires a positive thermal occupancy nbar" + std::to_string(mode));
    return occupancy(p, mode).value / nbar;
}

double adiabatic_cooling_ratio(const SystemParams& params, int mode) {
    require_mode(mode);
    const SystemParams p = validate(params);
    require_damped(p, mode);
    const double resonance = mode == 1 ? p.omega : -p.omega;
    const double gamma = mode == 1 ? p.gamma1 : p.gamma2;
    const double gsq = std::norm(mode == 1 ? p.g1 : p.g2);
    const double detune = p.delta - resonance;
    const double eff = gamma + gsq * p.kappa2 / (p.kappa2 * p.kappa2 + detune * detune);
    return gamma / eff;
}

void write_spectrum_csv(std::ostream& out, const SpectrumCurve& curve, double kappa2,
                        const std::vector<std::string>& header_lines) {
    for (const auto& line : header_lines) out << "# " << line << '\n';
    std::string column;
    switch (curve.kind) {
        case SpectrumKind::phonon1: column = curve.normalized ? "S_b1_normalized" : "S_b1_per_kappa2"; break;
        case SpectrumKind::phonon2: column = curve.normalized ? "S_b2_normalized" : "S_b2_per_kappa2"; break;
        case SpectrumKind::antistokes: column = "S_a_per_kappa2"; break;
    }
    out << "omega_over_kappa2," << column << '\n';
    const auto old_precision = out.precision(17);
    // Unnormalized densities carry units of 1/(rad/s); report them per 1/kappa2.
    const double value_scale = curve.normalized ? 1.0 : kappa2;
    for (std::size_t i = 0; i < curve.omegas.size(); ++i) {
        out << curve.omegas[i] / kappa2 << ',' << curve.values[i] * value_scale << '\n';
    }
    out.precision(old_precision);
}

}  // namespace bimodal
