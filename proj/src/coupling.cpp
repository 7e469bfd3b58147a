#include "bimodal/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>

namespace bimodal {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t stride(const Grid3& grid, int axis) {
    switch (axis) {
        case 0: return grid.extent(1) * grid.extent(2);
        case 1: return grid.extent(2);
        default: return 1;
    }
}

// Calls fn(base) for the first index of every grid line running along axis.
template <typename Fn>
void for_each_line(const Grid3& grid, int axis, Fn&& fn) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    for (std::size_t p = 0; p < grid.extent(a1); ++p) {
        for (std::size_t q = 0; q < grid.extent(a2); ++q) {
            std::array<std::size_t, 3> idx{};
            idx[static_cast<std::size_t>(a1)] = p;
            idx[static_cast<std::size_t>(a2)] = q;
            fn(grid.index(idx[0], idx[1], idx[2]));
        }
    }
}

void fd_line(const std::vector<double>& x, bool periodic, double period,
             const cplx* f, std::size_t step, cplx* out) {
    const std::size_t n = x.size();
    auto at = [&](std::size_t i) { return f[i * step]; };
    if (n == 1) {
        out[0] = 0.0;
        return;
    }
    if (periodic) {
        const double h = period / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = (i + 1) % n;
            const std::size_t im = (i + n - 1) % n;
            out[i * step] = (at(ip) - at(im)) / (2.0 * h);
        }
        return;
    }
    if (n == 2) {
        const cplx d = (at(1) - at(0)) / (x[1] - x[0]);
        out[0] = d;
        out[step] = d;
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        out[i * step] = (hm * hm * at(i + 1) - hp * hp * at(i - 1) + (hp * hp - hm * hm) * at(i)) /
                        (hm * hp * (hm + hp));
    }
    {
        const double h1 = x[1] - x[0];
        const double h2 = x[2] - x[1];
        out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * at(0) + (h1 + h2) / (h1 * h2) * at(1) -
                 h1 / (h2 * (h1 + h2)) * at(2);
    }
    {
        const double h1 = x[n - 1] - x[n - 2];
        const double h2 = x[n - 2] - x[n - 3];
        out[(n - 1) * step] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * at(n - 1) -
                              (h1 + h2) / (h1 * h2) * at(n - 2) + h1 / (h2 * (h1 + h2)) * at(n - 3);
    }
}

// Direct DFT derivative; n is at most a few hundred on any axis we grid.
void spectral_line(std::size_t n, double period, const std::vector<cplx>& twiddle,
                   const cplx* f, std::size_t step, cplx* out, std::vector<cplx>& coeff) {
    coeff.assign(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += f[j * step] * twiddle[(m * j) % n];
        coeff[m] = acc;
    }
    for (std::size_t m = 0; m < n; ++m) {
        double wave;
        if (2 * m < n) {
            wave = static_cast<double>(m);
        } else if (2 * m == n) {
            wave = 0.0;  // Nyquist mode has no well-defined derivative
        } else {
            wave = static_cast<double>(m) - static_cast<double>(n);
        }
        coeff[m] *= cplx(0.0, 2.0 * kPi * wave / period);
    }
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) acc += coeff[m] * std::conj(twiddle[(m * j) % n]);
        out[j * step] = acc / static_cast<double>(n);
    }
}

// d/dx_axis of component `comp` of the field.
std::vector<cplx> partial(const ModeField& field, int comp, int axis, DerivativeScheme scheme) {
    const Grid3& grid = field.grid;
    const std::size_t n = grid.extent(axis);
    const std::size_t step = stride(grid, axis);
    std::vector<cplx> src(grid.size());
    for (std::size_t p = 0; p < src.size(); ++p) src[p] = field.values[p][static_cast<std::size_t>(comp)];
    std::vector<cplx> out(grid.size());

    const bool spectral = scheme == DerivativeScheme::spectral && grid.periodic(axis) && n > 1;
    const double period = grid.periodic(axis) ? grid.period(axis) : 0.0;
    std::vector<cplx> twiddle;
    std::vector<cplx> coeff;
    if (spectral) {
        twiddle.resize(n);
        for (std::size_t p = 0; p < n; ++p) {
            twiddle[p] = std::polar(1.0, -2.0 * kPi * static_cast<double>(p) / static_cast<double>(n));
        }
    }
    for_each_line(grid, axis, [&](std::size_t base) {
        if (spectral) {
            spectral_line(n, period, twiddle, src.data() + base, step, out.data() + base, coeff);
        } else {
            fd_line(grid.axis(axis), grid.periodic(axis), period, src.data() + base, step, out.data() + base);
        }
    });
    return out;
}

void require_same_grid(const ModeField& a, const ModeField& b) {
    if (!(a.grid == b.grid)) throw ValidationError("mode fields are not sampled on a common grid");
}

void require_shape(const ModeField& f) {
    if (f.values.size() != f.grid.size()) {
        throw ValidationError("mode field value count does not match its grid");
    }
}

double coupling_prefactor(const OpticalPair& optics) {
    if (!(optics.omega_c1 > 0.0) || !(optics.omega_c2 > 0.0)) {
        throw ValidationError("optical mode frequencies must be positive");
    }
    if (!(optics.eps1 > 0.0) || !(optics.eps2 > 0.0)) {
        throw ValidationError("permittivities must be positive");
    }
    return std::sqrt(optics.omega_c2 * optics.omega_c1 / (optics.eps2 * optics.eps1));
}

double norm2(const Vec3c& v) {
    return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

template <typename Fn>
ModeField sample(const Grid3& grid, bool longitudinal, Fn&& fn) {
    ModeField field{grid, std::vector<Vec3c>(grid.size()), longitudinal};
    for (std::size_t i = 0; i < grid.extent(0); ++i)
        for (std::size_t j = 0; j < grid.extent(1); ++j)
            for (std::size_t k = 0; k < grid.extent(2); ++k)
                field.values[grid.index(i, j, k)] = fn(grid.point(i, j, k));
    return field;
}

}  // namespace

Grid3::Grid3(std::array<std::vector<double>, 3> axes, std::array<bool, 3> periodic)
    : axes_(std::move(axes)), periodic_(periodic) {
    for (int a = 0; a < 3; ++a) {
        const auto& x = axes_[static_cast<std::size_t>(a)];
        if (x.empty()) throw ValidationError("grid axis " + std::to_string(a) + " is empty");
        for (std::size_t i = 1; i < x.size(); ++i) {
            if (!(x[i] > x[i - 1])) {
                throw ValidationError("grid axis " + std::to_string(a) + " is not strictly increasing");
            }
        }
        if (periodic_[static_cast<std::size_t>(a)]) {
            if (x.size() < 2) throw ValidationError("periodic axis needs at least two points");
            const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
            for (std::size_t i = 1; i < x.size(); ++i) {
                if (std::abs((x[i] - x[i - 1]) - h) > 1e-9 * h) {
                    throw ValidationError("periodic axis " + std::to_string(a) + " is not uniform");
                }
            }
        }
    }
}

std::vector<double> Grid3::periodic_axis(double origin, double length, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = origin + length * static_cast<double>(i) / static_cast<double>(n);
    return x;
}

std::vector<double> Grid3::closed_axis(double lo, double hi, std::size_t n) {
    if (n == 1) return {lo};
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return x;
}

double Grid3::period(int a) const {
    if (!periodic(a)) throw ValidationError("axis " + std::to_string(a) + " is not periodic");
    const auto& x = axis(a);
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    return h * static_cast<double>(x.size());
}

std::vector<double> Grid3::weights(int a) const {
    const auto& x = axis(a);
    const std::size_t n = x.size();
    if (n == 1) return {1.0};
    if (periodic(a)) return std::vector<double>(n, period(a) / static_cast<double>(n));
    std::vector<double> w(n);
    w[0] = 0.5 * (x[1] - x[0]);
    w[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (x[i + 1] - x[i - 1]);
    return w;
}

double Grid3::volume() const {
    double v = 1.0;
    for (int a = 0; a < 3; ++a) {
        const auto w = weights(a);
        double s = 0.0;
        for (double wi : w) s += wi;
        v *= s;
    }
    return v;
}

void validate(const ModeField& field, double curl_tolerance) {
    require_shape(field);
    for (const auto& v : field.values) {
        for (const auto& c : v) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                throw ValidationError("mode field contains non-finite values");
            }
        }
    }
    if (!field.longitudinal) return;

    const auto div = divergence(field);
    const auto rot = curl(field);
    std::vector<cplx> div_sq(div.size());
    std::vector<cplx> curl_sq(rot.size());
    for (std::size_t p = 0; p < div.size(); ++p) {
        div_sq[p] = std::norm(div[p]);
        curl_sq[p] = norm2(rot[p]);
    }
    const double div_norm = std::sqrt(std::abs(integrate(field.grid, div_sq)));
    const double curl_norm = std::sqrt(std::abs(integrate(field.grid, curl_sq)));
    if (curl_norm > curl_tolerance * div_norm) {
        throw ValidationError("field flagged longitudinal has non-negligible curl");
    }
}

ModeField plane_wave(const Grid3& grid, const Vec3& k, const Vec3c& polarization, cplx amplitude) {
    return sample(grid, false, [&](const Vec3& r) {
        const cplx phase = amplitude * std::polar(1.0, k[0] * r[0] + k[1] * r[1] + k[2] * r[2]);
        return Vec3c{polarization[0] * phase, polarization[1] * phase, polarization[2] * phase};
    });
}

ModeField longitudinal_plane_wave(const Grid3& grid, const Vec3& q, cplx amplitude) {
    const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
    if (!(qn > 0.0)) throw ValidationError("longitudinal plane wave needs a nonzero wavevector");
    const Vec3c dir{q[0] / qn, q[1] / qn, q[2] / qn};
    ModeField f = plane_wave(grid, q, dir, amplitude);
    f.longitudinal = true;
    return f;
}

ModeField box_sine_mode(const Grid3& grid, const Vec3& lo, const Vec3& hi,
                        const std::array<int, 3>& mode_numbers, const Vec3c& polarization) {
    return sample(grid, false, [&](const Vec3& r) {
        double s = 1.0;
        for (std::size_t a = 0; a < 3; ++a) {
            if (mode_numbers[a] == 0) continue;
            s *= std::sin(mode_numbers[a] * kPi * (r[a] - lo[a]) / (hi[a] - lo[a]));
        }
        return Vec3c{polarization[0] * s, polarization[1] * s, polarization[2] * s};
    });
}

ModeField gaussian_beam(const Grid3& grid, double waist, double kz, const Vec3c& polarization) {
    if (!(waist > 0.0)) throw ValidationError("waist must be positive");
    return sample(grid, false, [&](const Vec3& r) {
        const cplx e = std::exp(-(r[0] * r[0] + r[1] * r[1]) / (waist * waist)) * std::polar(1.0, kz * r[2]);
        return Vec3c{polarization[0] * e, polarization[1] * e, polarization[2] * e};
    });
}

std::vector<cplx> divergence(const ModeField& field, DerivativeScheme scheme) {
    require_shape(field);
    std::vector<cplx> div = partial(field, 0, 0, scheme);
    for (int a = 1; a < 3; ++a) {
        const auto d = partial(field, a, a, scheme);
        for (std::size_t p = 0; p < div.size(); ++p) div[p] += d[p];
    }
    return div;
}

std::vector<Vec3c> curl(const ModeField& field, DerivativeScheme scheme) {
    require_shape(field);
    const auto dy_z = partial(field, 2, 1, scheme);
    const auto dz_y = partial(field, 1, 2, scheme);
    const auto dz_x = partial(field, 0, 2, scheme);
    const auto dx_z = partial(field, 2, 0, scheme);
    const auto dx_y = partial(field, 1, 0, scheme);
    const auto dy_x = partial(field, 0, 1, scheme);
    std::vector<Vec3c> out(field.grid.size());
    for (std::size_t p = 0; p < out.size(); ++p) {
        out[p] = {dy_z[p] - dz_y[p], dz_x[p] - dx_z[p], dx_y[p] - dy_x[p]};
    }
    return out;
}

cplx integrate(const Grid3& grid, const std::vector<cplx>& samples) {
    if (samples.size() != grid.size()) throw ValidationError("sample count does not match grid");
    const auto wx = grid.weights(0);
    const auto wy = grid.weights(1);
    const auto wz = grid.weights(2);
    cplx total = 0.0;
    for (std::size_t i = 0; i < wx.size(); ++i) {
        cplx plane = 0.0;
        for (std::size_t j = 0; j < wy.size(); ++j) {
            cplx line = 0.0;
            const std::size_t base = grid.index(i, j, 0);
            for (std::size_t k = 0; k < wz.size(); ++k) line += wz[k] * samples[base + k];
            plane += wy[j] * line;
        }
        total += wx[i] * plane;
    }
    return total;
}

cplx beta_acoustic(const ModeField& phi2, const ModeField& phi1, const ModeField& psi,
                   double gamma_e, const OpticalPair& optics, DerivativeScheme scheme) {
    require_shape(phi2);
    require_shape(phi1);
    require_shape(psi);
    require_same_grid(phi2, phi1);
    require_same_grid(phi2, psi);
    for (int a = 0; a < 3; ++a) {
        if (psi.grid.extent(a) < 4) {
            throw ValidationError("grid too coarse: fewer than 4 points along axis " + std::to_string(a));
        }
    }
    const double pref = 0.5 * gamma_e * coupling_prefactor(optics);

    const auto div = divergence(psi, scheme);
    std::vector<cplx> integrand(div.size());
    for (std::size_t p = 0; p < div.size(); ++p) {
        const auto& f2 = phi2.values[p];
        const auto& f1 = phi1.values[p];
        const cplx dot = std::conj(f2[0]) * f1[0] + std::conj(f2[1]) * f1[1] + std::conj(f2[2]) * f1[2];
        integrand[p] = dot * div[p];
    }
    return pref * integrate(psi.grid, integrand);
}

RamanTensor RamanTensor::brillouin(double gamma_e, const Vec3& q) {
    RamanTensor r;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            r(i, i, k) = cplx(0.0, gamma_e * q[static_cast<std::size_t>(k)] / (4.0 * kPi));
    return r;
}

cplx beta_raman(const RamanTensor& tensor, const ModeField& phi2, const ModeField& phi1,
                const ModeField& psi, const OpticalPair& optics) {
    require_shape(phi2);
    require_shape(phi1);
    require_shape(psi);
    require_same_grid(phi2, phi1);
    require_same_grid(phi2, psi);
    const double pref = 2.0 * kPi * coupling_prefactor(optics);

    std::vector<cplx> integrand(psi.values.size());
    for (std::size_t p = 0; p < integrand.size(); ++p) {
        const auto& f2 = phi2.values[p];
        const auto& f1 = phi1.values[p];
        const auto& q = psi.values[p];
        cplx acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            const cplx c2 = std::conj(f2[static_cast<std::size_t>(i)]);
            for (int j = 0; j < 3; ++j) {
                const cplx c21 = c2 * f1[static_cast<std::size_t>(j)];
                for (int k = 0; k < 3; ++k) acc += tensor(i, j, k) * c21 * q[static_cast<std::size_t>(k)];
            }
        }
        integrand[p] = acc;
    }
    return pref * integrate(psi.grid, integrand);
}

cplx bulk_raman_scalar(const RamanTensor& tensor, const Vec3c& e2, const Vec3c& e1, const Vec3c& eq) {
    for (const Vec3c* v : {&e2, &e1, &eq}) {
        if (std::abs(std::sqrt(norm2(*v)) - 1.0) > 1e-9) {
            throw ValidationError("polarization vectors must have unit norm");
        }
    }
    cplx acc = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                acc += tensor(i, j, k) * std::conj(e2[static_cast<std::size_t>(i)]) *
                       e1[static_cast<std::size_t>(j)] * eq[static_cast<std::size_t>(k)];
    return acc;
}

ModeField normalize_mode(const ModeField& psi, double rho0, double omega_m, double hbar) {
    require_shape(psi);
    if (!(rho0 > 0.0) || !(omega_m > 0.0) || !(hbar > 0.0)) {
        throw ValidationError("rho0, omega_m and hbar must be positive");
    }
    std::vector<cplx> dens(psi.values.size());
    for (std::size_t p = 0; p < dens.size(); ++p) dens[p] = norm2(psi.values[p]);
    const double current = integrate(psi.grid, dens).real();
    if (!(current > 0.0)) throw ValidationError("cannot normalize a zero-norm mode field");

    const double target = hbar / (2.0 * rho0 * omega_m);
    const double scale = std::sqrt(target / current);
    ModeField out = psi;
    for (auto& v : out.values)
        for (auto& c : v) c *= scale;
    return out;
}

double dispersion(const DispersionRelation& relation, double q) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw ValidationError("wavenumber must be nonnegative");
    return std::visit(
        [q](const auto& rel) -> double {
            using T = std::decay_t<decltype(rel)>;
            if constexpr (std::is_same_v<T, BrillouinLinear>) {
                if (!(rel.sound_speed > 0.0)) throw ValidationError("sound speed must be positive");
                return rel.sound_speed * q;
            } else {
                if (!(rel.omega0 >= 0.0)) throw ValidationError("omega0 must be nonnegative");
                const double sign = std::is_same_v<T, BulkOptical> ? -1.0 : 1.0;
                const double w2 = rel.omega0 * rel.omega0 + sign * rel.alpha * q * q;
                if (!(w2 > 0.0) && !(w2 == 0.0 && std::is_same_v<T, ConfinedFiber>)) {
                    throw ValidationError("dispersion relation gives an imaginary frequency at this wavenumber");
                }
                return std::sqrt(w2);
            }
        },
        relation);
}

bool bimodal_window(double omega1, double omega2, double kappa2) {
    if (!(omega1 > 0.0) || !(omega2 > 0.0) || !(kappa2 > 0.0)) {
        throw ValidationError("frequencies and kappa2 must be positive");
    }
    return std::abs(omega1 - omega2) < 2.0 * kappa2;
}

}  // namespace bimodal
