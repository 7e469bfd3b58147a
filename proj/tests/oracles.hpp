#pragma once

// Reference computations written independently of the library: plain
// Gaussian elimination, drift built straight from the equations of motion,
// stationary covariances from the Lyapunov equation and polynomial roots by
// Durand-Kerner iteration.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "bimodal/core.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Matrix = std::vector<std::vector<cplx>>;

inline Matrix zeros(std::size_t n) { return Matrix(n, std::vector<cplx>(n, 0.0)); }

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<cplx> solve(Matrix a, std::vector<cplx> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) == 0.0) throw std::runtime_error("singular system");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// d/dt (a2, b1, b2) = M (a2, b1, b2) + noise, written out term by term.
inline Matrix drift(const bimodal::SystemParams& p) {
    const cplx i(0.0, 1.0);
    Matrix m = zeros(3);
    m[0][0] = -i * p.delta - p.kappa2;
    m[0][1] = -i * p.g1;
    m[0][2] = -i * p.g2;
    m[1][0] = -i * std::conj(p.g1);
    m[1][1] = -i * p.omega - p.gamma1;
    m[2][0] = -i * std::conj(p.g2);
    m[2][2] = i * p.omega - p.gamma2;
    return m;
}

inline std::array<double, 3> noise_density(const bimodal::SystemParams& p) {
    return {0.0, 2.0 * p.gamma1 * p.nbar1, 2.0 * p.gamma2 * p.nbar2};
}

// S_c(w) for c = a2, b1, b2: x(w) = (-i w - M)^{-1} f(w), summed over the
// independent noise channels.
inline std::array<double, 3> spectra(const bimodal::SystemParams& p, double w) {
    Matrix a = drift(p);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) a[r][c] = -a[r][c];
    for (std::size_t r = 0; r < 3; ++r) a[r][r] += cplx(0.0, -w);
    const auto dens = noise_density(p);
    std::array<double, 3> s{};
    for (std::size_t j = 0; j < 3; ++j) {
        if (dens[j] == 0.0) continue;
        std::vector<cplx> e(3, 0.0);
        e[j] = 1.0;
        const auto x = solve(a, e);
        for (std::size_t c = 0; c < 3; ++c) s[c] += dens[j] * std::norm(x[c]);
    }
    return s;
}

// Stationary covariance C = <x x^dag> from M C + C M^dag + D = 0 (column-major vec).
inline Matrix stationary_covariance(const bimodal::SystemParams& p) {
    const Matrix m = drift(p);
    const auto dens = noise_density(p);
    Matrix big = zeros(9);
    std::vector<cplx> rhs(9, 0.0);
    auto idx = [](std::size_t r, std::size_t c) { return c * 3 + r; };
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            const std::size_t row = idx(r, c);
            // (M C)_{rc} = sum_k M_rk C_kc ; (C M^dag)_{rc} = sum_k C_rk conj(M_ck)
            for (std::size_t k = 0; k < 3; ++k) {
                big[row][idx(k, c)] += m[r][k];
                big[row][idx(r, k)] += std::conj(m[c][k]);
            }
            if (r == c) rhs[row] = -dens[r];
        }
    }
    const auto x = solve(big, rhs);
    Matrix cov = zeros(3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) cov[r][c] = x[idx(r, c)];
    return cov;
}

inline std::array<double, 3> stationary_occupancy(const bimodal::SystemParams& p) {
    const auto c = stationary_covariance(p);
    return {c[0][0].real(), c[1][1].real(), c[2][2].real()};
}

// Roots of the monic polynomial with coefficients c[0] + c[1] z + ... + z^n.
inline std::vector<cplx> roots(const std::vector<cplx>& c) {
    const std::size_t n = c.size();
    auto eval = [&](cplx z) {
        cplx v = 1.0;
        for (std::size_t k = n; k-- > 0;) v = v * z + c[k];
        return v;
    };
    double radius = 1.0;
    for (const auto& ck : c) radius = std::max(radius, 1.0 + std::abs(ck));
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(radius * 0.9, 0.4 + 2.0 * M_PI * double(k) / double(n));
    for (int iter = 0; iter < 2000; ++iter) {
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cplx den = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) den *= z[k] - z[j];
            const cplx step = eval(z[k]) / den;
            z[k] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-16 * radius) break;
    }
    return z;
}

// Eigenvalues of a 3x3 matrix from its characteristic polynomial.
inline std::vector<cplx> eigenvalues3(const Matrix& m) {
    const cplx tr = m[0][0] + m[1][1] + m[2][2];
    const cplx minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] +
                        m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const cplx det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // lambda^3 - tr lambda^2 + minors lambda - det
    return roots({-det, minors, -tr});
}

// Random validated parameters in units of kappa2.
inline bimodal::SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bimodal::SystemParams p;
    p.kappa2 = 1.0;
    p.gamma1 = std::pow(10.0, -3.0 + 2.0 * u(rng));
    p.gamma2 = std::pow(10.0, -3.0 + 2.0 * u(rng));
    p.omega = 0.5 * u(rng);
    p.delta = -0.5 + u(rng);
    p.g1 = std::polar(0.6 * u(rng), 2.0 * M_PI * u(rng));
    p.g2 = std::polar(0.6 * u(rng), 2.0 * M_PI * u(rng));
    p.nbar1 = std::pow(10.0, 3.0 * u(rng));
    p.nbar2 = std::pow(10.0, 3.0 * u(rng));
    return p;
}

inline bimodal::SystemParams reference_point(double g2) {
    bimodal::SystemParams p;
    p.kappa2 = 1.0;
    p.gamma1 = 0.01;
    p.gamma2 = 0.01;
    p.omega = 0.1;
    p.delta = 0.0;
    p.g1 = 0.3;
    p.g2 = g2;
    p.nbar1 = 1.0;
    p.nbar2 = 1.0;
    return p;
}

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace oracle
