#include "bimodal/langevin.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "bimodal/dynamics.hpp"
#include "bimodal/parallel.hpp"

namespace bimodal {

namespace {

using Vec3cd = Eigen::Vector3cd;

// Independent substream per trajectory, derived from (seed, index) only.
std::mt19937_64 substream(std::uint64_t seed, std::size_t index) {
    const auto idx = static_cast<std::uint64_t>(index);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32), 0x6c62272eU};
    return std::mt19937_64(seq);
}

// Draws one exact update increment: S z with z_k complex, Re and Im ~ N(0, 1/2).
class NoiseSource {
public:
    NoiseSource(const Eigen::Matrix3cd& factor, std::uint64_t seed, std::size_t index)
        : factor_(factor), rng_(substream(seed, index)), normal_(0.0, std::numbers::sqrt2 / 2.0) {}

    Vec3cd draw() {
        Vec3cd z;
        for (int k = 0; k < 3; ++k) {
            const double re = normal_(rng_);
            const double im = normal_(rng_);
            z(k) = cplx(re, im);
        }
        return factor_ * z;
    }

private:
    Eigen::Matrix3cd factor_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

std::size_t step_count(double duration, double dt) {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

ModeEstimate summarize(const std::vector<double>& samples) {
    const auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= n;
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    const double var = samples.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

void check_simulation_inputs(const SystemParams& p, double dt, double burn_in) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
    if (!(burn_in >= 0.0) || !std::isfinite(burn_in)) throw ValidationError("burn_in must be nonnegative");
    const double needed = minimum_burn_in(p);
    if (burn_in < needed * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "burn_in " << burn_in << " is shorter than 10 / slowest decay rate = " << needed;
        throw ValidationError(msg.str());
    }
}

}  // namespace

ExactDiscretization discretize(const SystemParams& params, double dt) {
    const SystemParams p = validate(params);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
    const Eigen::Matrix3cd m = drift_matrix(p).m;
    Eigen::Matrix3cd diffusion = Eigen::Matrix3cd::Zero();
    diffusion(1, 1) = 2.0 * p.gamma1 * p.nbar1;
    diffusion(2, 2) = 2.0 * p.gamma2 * p.nbar2;

    // Van Loan: exp([[-M, D], [0, M^dag]] dt) = [[., F12], [0, F22]];
    // exp(M dt) = F22^dag and the covariance is exp(M dt) F12.
    Eigen::Matrix<cplx, 6, 6> block = Eigen::Matrix<cplx, 6, 6>::Zero();
    block.topLeftCorner<3, 3>() = -m * dt;
    block.topRightCorner<3, 3>() = diffusion * dt;
    block.bottomRightCorner<3, 3>() = m.adjoint() * dt;
    const Eigen::Matrix<cplx, 6, 6> expo = block.exp();

    ExactDiscretization out;
    out.dt = dt;
    out.transition = expo.bottomRightCorner<3, 3>().adjoint();
    Eigen::Matrix3cd cov = out.transition * expo.topRightCorner<3, 3>();
    cov = 0.5 * (cov + cov.adjoint()).eval();
    out.covariance = cov;
    if (!out.transition.allFinite() || !cov.allFinite()) {
        throw NumericalError("matrix exponential produced non-finite entries; reduce dt");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericalError("covariance eigen-decomposition failed");
    const Eigen::Vector3d lambda = eig.eigenvalues();
    const double top = std::max(lambda.maxCoeff(), 0.0);
    if (lambda.minCoeff() < -1e-10 * top - 1e-300) {
        std::ostringstream msg;
        msg << "discretized noise covariance is not positive semidefinite (eigenvalues " << lambda(0) << ", "
            << lambda(1) << ", " << lambda(2) << ")";
        throw NumericalError(msg.str());
    }
    const Eigen::Vector3d root = lambda.cwiseMax(0.0).cwiseSqrt();
    out.noise_factor = eig.eigenvectors() * root.cast<cplx>().asDiagonal();
    return out;
}

double minimum_burn_in(const SystemParams& params) {
    const double slowest = slowest_decay_rate(params);
    return slowest > 0.0 ? 10.0 / slowest : 0.0;
}

EnsembleStats simulate_ensemble(const SystemParams& params, std::size_t n_traj, double t_end, double dt,
                                double burn_in, std::uint64_t seed, const SimulationOptions& options) {
    const SystemParams p = validate(params);
    if (n_traj < 2) throw ValidationError("n_traj must be at least 2");
    check_simulation_inputs(p, dt, burn_in);
    const std::size_t total = step_count(t_end, dt);
    const std::size_t burn = step_count(burn_in, dt);
    if (total < burn + 2) throw ValidationError("t_end must exceed burn_in by at least two steps");
    if (options.dump_stride == 0) throw ValidationError("dump_stride must be at least 1");

    const ExactDiscretization disc = discretize(p, dt);
    const std::size_t recorded = total - burn;
    const std::size_t half = recorded / 2;

    if (options.dump_directory) std::filesystem::create_directories(*options.dump_directory);

    // per trajectory: full, first half, second half x 3 channels
    std::vector<std::array<double, 9>> averages(n_traj);
    parallel_for(
        n_traj,
        [&](std::size_t traj) {
            NoiseSource noise(disc.noise_factor, seed, traj);
            std::ofstream dump;
            if (options.dump_directory) {
                std::ostringstream name;
                name << "trajectory_" << std::setw(6) << std::setfill('0') << traj << ".csv";
                dump.open(std::filesystem::path(*options.dump_directory) / name.str());
                dump << std::setprecision(17) << "t,Re(a2),Im(a2),Re(b1),Im(b1),Re(b2),Im(b2)\n";
            }
            Vec3cd x = Vec3cd::Zero();
            std::array<double, 9> acc{};
            for (std::size_t n = 1; n <= total; ++n) {
                x = disc.transition * x + noise.draw();
                if (dump.is_open() && n % options.dump_stride == 0) {
                    dump << static_cast<double>(n) * dt;
                    for (int c = 0; c < 3; ++c) dump << ',' << x(c).real() << ',' << x(c).imag();
                    dump << '\n';
                }
                if (n <= burn) continue;
                const std::size_t offset = (n - burn <= half) ? 3 : 6;
                for (std::size_t c = 0; c < 3; ++c) {
                    const double e = std::norm(x(static_cast<Eigen::Index>(c)));
                    acc[c] += e;
                    acc[offset + c] += e;
                }
            }
            if (!x.allFinite()) throw NumericalError("trajectory became non-finite");
            for (std::size_t c = 0; c < 3; ++c) {
                acc[c] /= static_cast<double>(recorded);
                acc[3 + c] /= static_cast<double>(half);
                acc[6 + c] /= static_cast<double>(recorded - half);
            }
            averages[traj] = acc;
        },
        options.workers);

    EnsembleStats stats;
    stats.n_traj = n_traj;
    stats.t_end = t_end;
    stats.dt = dt;
    stats.burn_in = burn_in;
    stats.seed = seed;
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> full(n_traj);
        std::vector<double> first(n_traj);
        std::vector<double> second(n_traj);
        for (std::size_t t = 0; t < n_traj; ++t) {
            full[t] = averages[t][c];
            first[t] = averages[t][3 + c];
            second[t] = averages[t][6 + c];
        }
        stats.occupancy[c] = summarize(full);
        stats.first_half[c] = summarize(first);
        stats.second_half[c] = summarize(second);
    }
    return stats;
}

PeriodogramResult periodogram(const SystemParams& params, const PeriodogramConfig& config,
                              const std::vector<double>& omegas) {
    const SystemParams p = validate(params);
    if (config.n_traj < 1) throw ValidationError("n_traj must be at least 1");
    if (omegas.empty()) throw ValidationError("frequency grid is empty");
    const double slowest = slowest_decay_rate(p);
    if (slowest > 0.0 && config.record_length < 50.0 / slowest) {
        std::ostringstream msg;
        msg << "record too short: need at least 50 / slowest decay rate = " << 50.0 / slowest;
        throw ValidationError(msg.str());
    }
    const double dt = config.dt;
    const double burn_in = config.burn_in > 0.0 ? config.burn_in : minimum_burn_in(p);
    check_simulation_inputs(p, dt, burn_in);
    const double seg_len = config.segment_length > 0.0 ? config.segment_length : config.record_length / 8.0;
    const std::size_t seg = step_count(seg_len, dt);
    const std::size_t rec = step_count(config.record_length, dt);
    const std::size_t burn = step_count(burn_in, dt);
    if (seg < 4 || seg > rec) throw ValidationError("segment length must be between 4 samples and the record length");
    const std::size_t hop = seg / 2;
    const std::size_t per_traj = (rec - seg) / hop + 1;

    std::vector<double> window(seg);
    double window_energy = 0.0;
    for (std::size_t n = 0; n < seg; ++n) {
        window[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(seg)));
        window_energy += window[n] * window[n];
    }
    std::vector<cplx> rotation(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k) rotation[k] = std::polar(1.0, omegas[k] * dt);

    const ExactDiscretization disc = discretize(p, dt);
    const std::size_t m = omegas.size();

    struct Partial {
        std::array<std::vector<double>, 3> sum, sum_sq;
        std::array<double, 3> energy{};
        std::size_t samples = 0;
    };
    std::vector<Partial> partials(config.n_traj);

    parallel_for(
        config.n_traj,
        [&](std::size_t traj) {
            NoiseSource noise(disc.noise_factor, config.seed, traj);
            Vec3cd x = Vec3cd::Zero();
            for (std::size_t n = 0; n < burn; ++n) x = disc.transition * x + noise.draw();
            std::array<std::vector<cplx>, 3> record;
            for (auto& r : record) r.resize(rec);
            for (std::size_t n = 0; n < rec; ++n) {
                x = disc.transition * x + noise.draw();
                for (std::size_t c = 0; c < 3; ++c) record[c][n] = x(static_cast<Eigen::Index>(c));
            }
            if (!x.allFinite()) throw NumericalError("trajectory became non-finite");

            Partial& part = partials[traj];
            for (std::size_t c = 0; c < 3; ++c) {
                part.sum[c].assign(m, 0.0);
                part.sum_sq[c].assign(m, 0.0);
            }
            std::vector<cplx> tapered(seg);
            for (std::size_t s = 0; s < per_traj; ++s) {
                const std::size_t start = s * hop;
                for (std::size_t c = 0; c < 3; ++c) {
                    for (std::size_t n = 0; n < seg; ++n) {
                        tapered[n] = window[n] * record[c][start + n];
                        part.energy[c] += std::norm(record[c][start + n]);
                    }
                    for (std::size_t k = 0; k < m; ++k) {
                        // Horner evaluation of sum_n tapered[n] z^n, |z| = 1.
                        cplx acc = 0.0;
                        const cplx z = rotation[k];
                        for (std::size_t n = seg; n-- > 0;) acc = acc * z + tapered[n];
                        const double value = dt * std::norm(acc) / window_energy;
                        part.sum[c][k] += value;
                        part.sum_sq[c][k] += value * value;
                    }
                }
                part.samples += seg;
            }
        },
        config.workers);

    const std::size_t segments = per_traj * config.n_traj;
    PeriodogramResult out;
    out.segments = segments;
    const std::array<SpectrumKind, 3> kinds{SpectrumKind::antistokes, SpectrumKind::phonon1, SpectrumKind::phonon2};
    std::size_t samples = 0;
    for (const auto& part : partials) samples += part.samples;
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> sum(m, 0.0);
        std::vector<double> sum_sq(m, 0.0);
        double energy = 0.0;
        for (const auto& part : partials) {
            for (std::size_t k = 0; k < m; ++k) {
                sum[k] += part.sum[c][k];
                sum_sq[k] += part.sum_sq[c][k];
            }
            energy += part.energy[c];
        }
        out.curves[c] = {omegas, std::vector<double>(m), kinds[c], false};
        out.standard_error[c].resize(m);
        const auto k_seg = static_cast<double>(segments);
        for (std::size_t k = 0; k < m; ++k) {
            const double mean = sum[k] / k_seg;
            const double var = segments > 1 ? std::max(0.0, (sum_sq[k] - k_seg * mean * mean) / (k_seg - 1.0)) : 0.0;
            out.curves[c].values[k] = mean;
            out.standard_error[c][k] = std::sqrt(var / k_seg);
        }
        out.time_average[c] = energy / static_cast<double>(samples);
    }
    return out;
}

}  // namespace bimodal
