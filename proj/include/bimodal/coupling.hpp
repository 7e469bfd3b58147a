#pragma once

// Three-wave coupling constants from sampled spatial mode functions, and the
// phonon dispersion catalog.
//
// Fields live on a rectilinear grid. Integrals use the trapezoid rule (the
// uniform sum on periodic axes). Derivatives use second-order finite
// differences (centred inside, one-sided at open boundaries); a spectral
// derivative is available on periodic axes.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "bimodal/core.hpp"

namespace bimodal {

using Vec3 = std::array<double, 3>;
using Vec3c = std::array<cplx, 3>;

// Axis 0 is x (slowest varying in storage), axis 2 is z (fastest).
class Grid3 {
public:
    Grid3() = default;
    Grid3(std::array<std::vector<double>, 3> axes, std::array<bool, 3> periodic = {false, false, false});

    // n points with spacing length/n starting at origin, wrapping at origin+length.
    static std::vector<double> periodic_axis(double origin, double length, std::size_t n);
    // n points covering [lo, hi] inclusive.
    static std::vector<double> closed_axis(double lo, double hi, std::size_t n);

    const std::vector<double>& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    bool periodic(int a) const { return periodic_[static_cast<std::size_t>(a)]; }
    std::size_t extent(int a) const { return axes_[static_cast<std::size_t>(a)].size(); }
    std::size_t size() const { return extent(0) * extent(1) * extent(2); }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * extent(1) + j) * extent(2) + k;
    }
    Vec3 point(std::size_t i, std::size_t j, std::size_t k) const {
        return {axes_[0][i], axes_[1][j], axes_[2][k]};
    }
    // Period of a periodic axis (n * spacing); throws for open axes.
    double period(int a) const;
    // Trapezoid weights along one axis.
    std::vector<double> weights(int a) const;
    double volume() const;

    friend bool operator==(const Grid3&, const Grid3&) = default;

private:
    std::array<std::vector<double>, 3> axes_;
    std::array<bool, 3> periodic_{false, false, false};
};

struct ModeField {
    Grid3 grid;
    std::vector<Vec3c> values;
    // Declares curl(psi) = 0; checked by validate().
    bool longitudinal = false;
};

// Checks grid/values consistency and, for longitudinal fields, that the
// curl is negligible relative to the gradient scale.
void validate(const ModeField& field, double curl_tolerance = 1e-2);

// Analytic mode families sampled onto a grid.
ModeField plane_wave(const Grid3& grid, const Vec3& k, const Vec3c& polarization, cplx amplitude = 1.0);
// psi = amplitude * q_hat * exp(i q.r), flagged longitudinal.
ModeField longitudinal_plane_wave(const Grid3& grid, const Vec3& q, cplx amplitude = 1.0);
// prod_a sin(n_a * pi * (x_a - lo_a) / (hi_a - lo_a)) along a fixed polarization.
ModeField box_sine_mode(const Grid3& grid, const Vec3& lo, const Vec3& hi,
                        const std::array<int, 3>& mode_numbers, const Vec3c& polarization);
// Gaussian transverse profile exp(-(x^2+y^2)/w0^2) propagating along z with wavenumber kz.
ModeField gaussian_beam(const Grid3& grid, double waist, double kz, const Vec3c& polarization);

enum class DerivativeScheme {
    finite_difference,  // second order
    spectral,           // exact for band-limited data on periodic axes; open axes use finite differences
};

std::vector<cplx> divergence(const ModeField& field, DerivativeScheme scheme = DerivativeScheme::finite_difference);
std::vector<Vec3c> curl(const ModeField& field, DerivativeScheme scheme = DerivativeScheme::finite_difference);

// Trapezoid integral of a scalar sampled on the grid.
cplx integrate(const Grid3& grid, const std::vector<cplx>& samples);

// Optical mode parameters entering the sqrt(w_c2 w_c1 / (eps2 eps1)) prefactor.
struct OpticalPair {
    double omega_c1 = 0.0;
    double omega_c2 = 0.0;
    double eps1 = 1.0;
    double eps2 = 1.0;
};

// Electrostrictive coupling:
//   beta = (gamma_e/2) sqrt(w_c2 w_c1/(eps2 eps1)) Int (phi2^* . phi1)(div psi) d^3r
cplx beta_acoustic(const ModeField& phi2, const ModeField& phi1, const ModeField& psi,
                   double gamma_e, const OpticalPair& optics,
                   DerivativeScheme scheme = DerivativeScheme::finite_difference);

// Generalized Raman tensor R_ijk. Complex entries: the long-wavelength
// acoustic tensor is purely imaginary.
struct RamanTensor {
    std::array<cplx, 27> components{};

    cplx& operator()(int i, int j, int k) { return components[static_cast<std::size_t>(9 * i + 3 * j + k)]; }
    cplx operator()(int i, int j, int k) const { return components[static_cast<std::size_t>(9 * i + 3 * j + k)]; }

    // 4 pi R_ijk = i gamma_e delta_ij q_k
    static RamanTensor brillouin(double gamma_e, const Vec3& q);
};

// beta^(Q) = 2 pi sqrt(w_c2 w_c1/(eps2 eps1)) sum_ijk R_ijk Int phi2_i^* phi1_j psi_k d^3r
cplx beta_raman(const RamanTensor& tensor, const ModeField& phi2, const ModeField& phi1,
                const ModeField& psi, const OpticalPair& optics);

// R^(Q) = sum_ijk R_ijk e2_i^* e1_j eQ_k for unit polarization vectors.
cplx bulk_raman_scalar(const RamanTensor& tensor, const Vec3c& e2, const Vec3c& e1, const Vec3c& eq);

// Scales psi so that rho0 * omega_m^2 * Int |psi|^2 d^3r = hbar * omega_m / 2.
ModeField normalize_mode(const ModeField& psi, double rho0, double omega_m, double hbar);

struct BrillouinLinear {
    double sound_speed;  // Omega = v_s q
};
struct BulkOptical {
    double omega0;  // Omega^2 = omega0^2 - alpha q^2
    double alpha;
};
struct ConfinedFiber {
    double omega0;  // Omega^2 = omega0^2 + alpha q^2
    double alpha;
};
using DispersionRelation = std::variant<BrillouinLinear, BulkOptical, ConfinedFiber>;

double dispersion(const DispersionRelation& relation, double q);

// True iff both modes can sit inside one cavity line: |Omega1 - Omega2| < 2 kappa2.
bool bimodal_window(double omega1, double omega2, double kappa2);

// Columnar text format: a header line "nx ny nz", then one row per grid point
// "x y z Re(vx) Im(vx) Re(vy) Im(vy) Re(vz) Im(vz)". Rows may come in any
// order; '#' lines are comments.
ModeField read_mode_field(std::istream& in, std::array<bool, 3> periodic = {false, false, false});
ModeField read_mode_field(const std::string& path, std::array<bool, 3> periodic = {false, false, false});
void write_mode_field(std::ostream& out, const ModeField& field);

}  // namespace bimodal
