#pragma once

// Deterministic amplitude dynamics: the pump / anti-Stokes / phonon
// three-wave equations, the linear drift of the two-phonon Langevin system,
// its adiabatic reduction and the collective (sum/difference) phonon modes.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bimodal/core.hpp"

namespace bimodal {

// Integrates
//   da2/dt = -kappa2 a2 - i Delta2 a2 - i beta u a1 e^{i delta t}
//   da1/dt = -kappa1 (a1 - pump) - i Delta1 a1 - i beta^* u^* a2 e^{-i delta t}
//   du/dt  = -Gamma u - i beta^* a1^* a2 e^{-i delta t}
// with classical fixed-step RK4. Returns the initial state followed by every
// `record_every`-th step; the final state is always included.
std::vector<ThreeWaveState> evolve_three_wave(const ThreeWaveParams& params, const ThreeWaveState& init,
                                              double t_end, double dt, std::size_t record_every = 1);

// CSV: t,Re(a1),Im(a1),Re(a2),Im(a2),Re(u),Im(u)
void write_trajectory_csv(std::ostream& out, const std::vector<ThreeWaveState>& trajectory);

// Linear drift of (a2, b1, b2):
//   [[-i delta - kappa2, -i G1,            -i G2          ],
//    [-i G1^*,           -i Omega - Gamma1, 0             ],
//    [-i G2^*,           0,                 i Omega - Gamma2]]
struct DriftMatrix {
    Eigen::Matrix3cd m;
    static constexpr std::array<const char*, 3> labels{"a2", "b1", "b2"};
};

DriftMatrix drift_matrix(const SystemParams& params);

// Eigenvalues of the drift, sorted by decreasing real part.
std::array<cplx, 3> drift_eigenvalues(const SystemParams& params);

// Smallest strictly positive decay rate -Re(lambda) among the drift
// eigenvalues; zero if none decays.
double slowest_decay_rate(const SystemParams& params);

// Phonon-only drift after adiabatic elimination of the cavity:
//   diag(-i Omega - Gamma1, i Omega - Gamma2) - [[|G1|^2, G1^* G2], [G2^* G1, |G2|^2]] / (kappa2 + i delta)
struct ReducedDrift {
    Eigen::Matrix2cd m;
    std::array<double, 2> effective_width{};     // Gamma_i + |G_i|^2 kappa2 / (kappa2^2 + delta^2)
    std::array<double, 2> frequency_shift{};     // -delta |G_i|^2 / (kappa2^2 + delta^2)
    cplx mode_coupling{0.0, 0.0};                // off-diagonal element acting on b2 in db1/dt
    bool adiabatic_regime = true;                // kappa2 > 10 max(Gamma_i)
    std::string warning;
};

ReducedDrift adiabatic_reduce(const SystemParams& params);

// Closed-form eigen-decomposition of a 2x2 complex matrix. Eigenvectors are
// unit norm; `degenerate` is set when the eigenvalues coincide.
struct Eigen2 {
    std::array<cplx, 2> values;
    std::array<Eigen::Vector2cd, 2> vectors;
    bool degenerate = false;
};

Eigen2 eigen_2x2(const Eigen::Matrix2cd& m);

enum class ModeLabel { plus, minus, b1, b2, none };

std::string to_string(ModeLabel label);

enum class Labeling {
    collective,  // eigenvectors align with (b1 +- b2)/sqrt2
    bare,        // eigenvectors align with b1, b2
    degenerate,  // coinciding eigenvalues: no preferred basis
    ambiguous,   // neither basis dominates
};

std::string to_string(Labeling labeling);

struct CollectiveMode {
    ModeLabel label = ModeLabel::none;
    cplx eigenvalue{0.0, 0.0};
    cplx rate{0.0, 0.0};  // -eigenvalue: real part is the decay rate
    Eigen::Vector2cd vector;
    double overlap_plus = 0.0;   // |<(b1+b2)/sqrt2, v>|^2
    double overlap_minus = 0.0;  // |<(b1-b2)/sqrt2, v>|^2
};

struct CollectiveModes {
    Labeling labeling = Labeling::ambiguous;
    std::array<CollectiveMode, 2> modes;

    std::optional<cplx> rate(ModeLabel label) const;
};

CollectiveModes collective_rates(const SystemParams& params);

}  // namespace bimodal
