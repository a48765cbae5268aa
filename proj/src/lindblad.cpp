#include "modmirror/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modmirror/sweep.hpp"

namespace modmirror::lindblad {

namespace {

constexpr complexd I{0.0, 1.0};
constexpr std::size_t max_qubits = 8;

WaveguideArray oriented(const WaveguideArray& array, Port port) {
    if (port == Port::left)
        return array;
    WaveguideArray mirrored = array;
    std::reverse(mirrored.emitters.begin(), mirrored.emitters.end());
    return mirrored;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, std::size_t j, std::size_t n) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k)
        out = kron(out, k == j ? Eigen::MatrixXcd(op)
                               : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()));
    return out;
}

} // namespace

Generator::Generator(const WaveguideArray& array_in, const DriveConfig& drive,
                     const ModulationConfig& m, DephasingModel model) {
    validate({array_in, drive, m});
    if (array_in.size() > max_qubits)
        throw DimensionTooLarge("master equation limited to " + std::to_string(max_qubits) +
                                " qubits");
    array_ = oriented(array_in, drive.port);
    n_ = array_.size();
    omega_mod_ = m.omega_mod;
    const std::size_t d = dim();

    // Basis order (|0>, |1>) per qubit, qubit 0 leftmost in the product.
    Eigen::Matrix2cd sm2, num2;
    sm2 << 0, 1, 0, 0;
    num2 << 0, 0, 0, 1;

    sigma_.reserve(n_);
    number_.reserve(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        sigma_.push_back(embed(sm2, j, n_));
        number_.push_back(embed(num2, j, n_).diagonal().real());
        mod_amp_.push_back(array_.emitters[j].mod_amp);
        mod_phase_.push_back(array_.emitters[j].mod_phase);
    }

    const double gamma1 = array_.gamma1();
    h_static_ = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t j = 0; j < n_; ++j) {
        h_static_ += (array_.emitters[j].omega0 - drive.omega) *
                     number_[j].cast<complexd>().asDiagonal().toDenseMatrix();
        const complexd amp = 0.5 * drive.rabi * std::exp(I * array_.phi * static_cast<double>(j));
        h_static_ += amp * sigma_[j].adjoint();
        h_static_ += std::conj(amp) * sigma_[j];
        for (std::size_t k = j + 1; k < n_; ++k) {
            const double g =
                0.5 * gamma1 * std::sin(array_.phi * static_cast<double>(k - j));
            h_static_ += g * (sigma_[j].adjoint() * sigma_[k] + sigma_[k].adjoint() * sigma_[j]);
        }
    }

    q_ = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t k = 0; k < n_; ++k) {
            double kernel =
                0.5 * gamma1 *
                std::cos(array_.phi * (static_cast<double>(j) - static_cast<double>(k)));
            if (j == k && model == DephasingModel::sigma_diagonal)
                kernel = array_.emitters[j].gamma2;
            if (std::abs(kernel) < 1e-300)
                continue;
            q_ += kernel * sigma_[k].adjoint() * sigma_[j];
            jump_pairs_.emplace_back(j, k);
            jump_weights_.push_back(2.0 * kernel);
        }
    }

    dephasing_mask_ = Eigen::MatrixXd::Zero(d, d);
    if (model == DephasingModel::pure_dephasing) {
        for (std::size_t j = 0; j < n_; ++j) {
            const double gphi = array_.emitters[j].gamma_phi();
            if (gphi == 0.0)
                continue;
            const Eigen::VectorXd z = Eigen::VectorXd::Ones(d) - 2.0 * number_[j];
            dephasing_mask_ += 0.5 * gphi * (z * z.transpose() - Eigen::MatrixXd::Ones(d, d));
        }
    }
}

Eigen::MatrixXcd Generator::apply(const Eigen::MatrixXcd& rho, double t) const {
    const std::size_t d = dim();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
    for (std::size_t j = 0; j < n_; ++j)
        if (mod_amp_[j] != 0.0)
            diag += mod_amp_[j] * std::cos(omega_mod_ * t + mod_phase_[j]) * number_[j];

    Eigen::MatrixXcd out = -I * (h_static_ * rho - rho * h_static_);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
            out(a, b) -= I * (diag(a) - diag(b)) * rho(a, b);

    for (std::size_t p = 0; p < jump_pairs_.size(); ++p) {
        const auto [j, k] = jump_pairs_[p];
        out += jump_weights_[p] * (sigma_[j] * rho * sigma_[k].adjoint());
    }
    out -= q_ * rho + rho * q_;
    out += dephasing_mask_.cwiseProduct(rho.real()).cast<complexd>() +
           I * dephasing_mask_.cwiseProduct(rho.imag()).cast<complexd>();
    return out;
}

Generator build_generator(const WaveguideArray& array, const DriveConfig& drive,
                          const ModulationConfig& m, DephasingModel model) {
    return Generator(array, drive, m, model);
}

Eigen::MatrixXcd ground_state(std::size_t n_qubits) {
    const std::size_t d = static_cast<std::size_t>(1) << n_qubits;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    rho(0, 0) = 1.0;
    return rho;
}

void check_density(const Eigen::MatrixXcd& rho, const char* where) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const double trace_err = std::abs(rho.trace() - complexd(1.0, 0.0));
    if (herm > 1e-10 || trace_err > 1e-8)
        throw StepSizeTooLarge(std::string(where) + ": state drifted (hermiticity " +
                               std::to_string(herm) + ", trace error " +
                               std::to_string(trace_err) + ")");
    const Eigen::MatrixXcd sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw PositivityLost(std::string(where) + ": eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()));
}

namespace {

Eigen::MatrixXcd rk4_step(const Generator& gen, const Eigen::MatrixXcd& rho, double t, double dt) {
    const Eigen::MatrixXcd k1 = gen.apply(rho, t);
    const Eigen::MatrixXcd k2 = gen.apply(rho + 0.5 * dt * k1, t + 0.5 * dt);
    const Eigen::MatrixXcd k3 = gen.apply(rho + 0.5 * dt * k2, t + 0.5 * dt);
    const Eigen::MatrixXcd k4 = gen.apply(rho + dt * k3, t + dt);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double fastest_scale(const WaveguideArray& array, const DriveConfig& drive,
                     const ModulationConfig& m) {
    double f = std::max(m.omega_mod, drive.rabi);
    for (const auto& q : array.emitters)
        f = std::max({f, std::abs(drive.omega - q.omega0), q.mod_amp});
    return f;
}

void require_step(const WaveguideArray& array, const DriveConfig& drive,
                  const ModulationConfig& m, double dt) {
    const double fastest = fastest_scale(array, drive, m);
    if (!(dt > 0.0))
        throw InvalidParameter("dt", "must be > 0");
    if (fastest > 0.0 && dt > 0.05 * two_pi / fastest)
        throw StepSizeTooLarge(
            "dt must not exceed 0.05 * 2*pi / max(Omega, |omega - omega0|, rabi, A_m)");
}

} // namespace

DensityTrajectory evolve(const Eigen::MatrixXcd& rho0, const WaveguideArray& array,
                         const DriveConfig& drive, const ModulationConfig& m, double t_end,
                         double dt, const Options& opts) {
    const Generator gen(array, drive, m, opts.dephasing);
    require_step(array, drive, m, dt);
    if (rho0.rows() != static_cast<Eigen::Index>(gen.dim()) || rho0.rows() != rho0.cols())
        throw InvalidParameter("rho0", "dimension must be 2^N x 2^N");
    check_density(rho0, "evolve(rho0)");
    if (!(t_end > 0.0))
        throw InvalidParameter("t_end", "must be > 0");

    // One step-halving probe: a coarse-but-legal dt passes, an unstable one
    // does not.
    {
        const Eigen::MatrixXcd full = rk4_step(gen, rho0, 0.0, dt);
        const Eigen::MatrixXcd half =
            rk4_step(gen, rk4_step(gen, rho0, 0.0, 0.5 * dt), 0.5 * dt, 0.5 * dt);
        if ((full - half).cwiseAbs().maxCoeff() > 1e-4)
            throw StepSizeTooLarge("local step-halving error above 1e-4");
    }

    const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    const int stride = opts.strict_checks ? 1 : std::max(1, opts.check_stride);

    DensityTrajectory traj;
    traj.dt = dt;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    Eigen::MatrixXcd rho = rho0;
    for (std::size_t i = 0; i <= steps; ++i) {
        traj.times.push_back(static_cast<double>(i) * dt);
        traj.states.push_back(rho);
        if (i % static_cast<std::size_t>(stride) == 0 || i == steps)
            check_density(rho, "evolve");
        if (i < steps)
            rho = rk4_step(gen, rho, static_cast<double>(i) * dt, dt);
    }
    return traj;
}

double CoherentSidebands::inelastic_power_r() const {
    double s = 0.0;
    for (int n = -n_max; n <= n_max; ++n)
        if (n != 0)
            s += std::norm(r_at(n));
    return s;
}

double CoherentSidebands::inelastic_power_t() const {
    double s = 0.0;
    for (int n = -n_max; n <= n_max; ++n)
        if (n != 0)
            s += std::norm(t_at(n));
    return s;
}

namespace {

// One steady modulation period, sampled on a uniform grid with an integer
// number of steps per period.
struct SteadyPeriod {
    std::vector<Eigen::MatrixXcd> states; // samples + 1 entries, first ~= last
    double dt = 0.0;
    std::size_t samples = 0;
};

std::size_t samples_per_period(const WaveguideArray& array, const DriveConfig& drive,
                               const ModulationConfig& m) {
    const double period = two_pi / m.omega_mod;
    const double fastest = std::max(fastest_scale(array, drive, m), array.gamma1());
    std::size_t n = std::max<std::size_t>(
        128, static_cast<std::size_t>(std::ceil(128.0 * period * fastest / two_pi)));
    return ((n + 63) / 64) * 64;
}

SteadyPeriod steady_period(const Generator& gen, const WaveguideArray& array,
                           const DriveConfig& drive, const ModulationConfig& m,
                           const Options& opts) {
    const double period = two_pi / m.omega_mod;
    const std::size_t msamples = samples_per_period(array, drive, m);
    const double dt = period / static_cast<double>(msamples);
    const double gamma1 = array.gamma1();

    double gamma_slow = 0.25 * gamma1;
    const std::size_t burn =
        static_cast<std::size_t>(std::ceil(10.0 / (gamma1 * period)));
    const std::size_t cap =
        burn + 64 + static_cast<std::size_t>(std::ceil(80.0 / (gamma_slow * period)));

    SteadyPeriod out;
    out.dt = dt;
    out.samples = msamples;
    out.states.resize(msamples + 1);

    const int stride = opts.strict_checks ? 1 : std::max(1, opts.check_stride);
    Eigen::MatrixXcd rho = ground_state(gen.n_qubits());
    Eigen::MatrixXcd prev_end = rho;
    for (std::size_t cycle = 0; cycle < cap; ++cycle) {
        for (std::size_t i = 0; i < msamples; ++i) {
            out.states[i] = rho;
            if (i % static_cast<std::size_t>(stride) == 0)
                check_density(rho, "steady_period");
            rho = rk4_step(gen, rho, static_cast<double>(i) * dt, dt);
        }
        if (cycle >= burn && (rho - prev_end).cwiseAbs().maxCoeff() < 1e-11) {
            out.states[msamples] = rho;
            check_density(rho, "steady_period(end)");
            return out;
        }
        prev_end = rho;
    }
    throw NonStationary("periodic attractor not reached within " + std::to_string(cap) +
                        " modulation periods");
}

CoherentSidebands sidebands_from_period(const std::vector<Eigen::MatrixXcd>& states,
                                        std::size_t msamples, double dt,
                                        const Generator& gen, const DriveConfig& drive,
                                        const ModulationConfig& m, int n_max) {
    if (!(drive.rabi > 0.0))
        throw InvalidParameter("drive.rabi", "coherent sidebands need rabi > 0");
    const WaveguideArray& array = gen.oriented_array();
    const double gamma1 = array.gamma1();
    const std::size_t nq = gen.n_qubits();

    CoherentSidebands out;
    out.n_max = n_max;
    out.power = (drive.rabi / gamma1) * (drive.rabi / gamma1);
    out.r = Eigen::VectorXcd::Zero(2 * n_max + 1);
    out.t = Eigen::VectorXcd::Zero(2 * n_max + 1);

    // c_{j,n} by the rectangle rule over one exact period (spectrally accurate
    // for a periodic integrand).
    for (int n = -n_max; n <= n_max; ++n) {
        complexd back = 0.0, fwd = 0.0;
        for (std::size_t j = 0; j < nq; ++j) {
            complexd cjn = 0.0;
            for (std::size_t i = 0; i < msamples; ++i) {
                const double t = static_cast<double>(i) * dt;
                const complexd sjm = (gen.lowering(j) * states[i]).trace();
                cjn += std::exp(I * static_cast<double>(n) * m.omega_mod * t) * sjm;
            }
            cjn /= static_cast<double>(msamples);
            const complexd phase = std::exp(I * array.phi * static_cast<double>(j));
            back += phase * cjn;
            fwd += cjn / phase;
        }
        const complexd pref = -I * gamma1 / drive.rabi;
        out.r(n + n_max) = pref * back;
        out.t(n + n_max) = (n == 0 ? 1.0 : 0.0) + pref * fwd;
    }
    return out;
}

} // namespace

CoherentSidebands coherent_sidebands(const DensityTrajectory& traj, const WaveguideArray& array,
                                     const DriveConfig& drive, const ModulationConfig& m,
                                     int n_max) {
    if (n_max < 0)
        throw InvalidParameter("n_max", "must be >= 0");
    const Generator gen(array, drive, m);
    const double period = two_pi / m.omega_mod;
    const double steps_exact = period / traj.dt;
    const auto msamples = static_cast<std::size_t>(std::llround(steps_exact));
    if (msamples < 16 || std::abs(steps_exact - static_cast<double>(msamples)) > 1e-9 * steps_exact)
        throw InvalidParameter("trajectory.dt", "must divide the modulation period");
    if (traj.states.size() < msamples + 1)
        throw NonStationary("trajectory shorter than one modulation period");

    // Use the last complete period aligned to a period boundary, so the
    // extracted sideband phases refer to the t = 0 modulation origin.
    const std::size_t i_start =
        ((traj.states.size() - 1 - msamples) / msamples) * msamples;
    const double drift =
        (traj.states[i_start + msamples] - traj.states[i_start]).cwiseAbs().maxCoeff();
    if (drift > 1e-8)
        throw NonStationary("trajectory not periodic at the sampling tolerance (drift " +
                            std::to_string(drift) + ")");

    std::vector<Eigen::MatrixXcd> period_states(
        traj.states.begin() + static_cast<long>(i_start),
        traj.states.begin() + static_cast<long>(i_start + msamples + 1));
    return sidebands_from_period(period_states, msamples, traj.dt, gen, drive, m, n_max);
}

CoherentSidebands steady_sidebands(const WaveguideArray& array, const DriveConfig& drive,
                                   const ModulationConfig& m, int n_max, const Options& opts) {
    const Generator gen(array, drive, m, opts.dephasing);
    const SteadyPeriod sp = steady_period(gen, array, drive, m, opts);
    return sidebands_from_period(sp.states, sp.samples, sp.dt, gen, drive, m, n_max);
}

EmissionPsd emission_psd(const WaveguideArray& array, const DriveConfig& drive,
                         const ModulationConfig& m, const FrequencyGrid& grid, int workers,
                         const Options& opts) {
    if (array.size() > 4)
        throw DimensionTooLarge("two-time correlations limited to 4 qubits");
    const std::vector<double> detunings = grid.points();
    const Generator gen(array, drive, m, opts.dephasing);
    const WaveguideArray& arr = gen.oriented_array();
    const double gamma1 = arr.gamma1();

    EmissionPsd out;
    out.forward.frequencies = detunings;
    out.forward.psd.assign(detunings.size(), 0.0);
    out.backward = out.forward;
    if (drive.rabi == 0.0)
        return out; // undriven steady state is the ground state: dark

    const SteadyPeriod sp = steady_period(gen, array, drive, m, opts);
    const std::size_t msamples = sp.samples;
    const double dt = sp.dt;
    const std::size_t d = gen.dim();

    // Collective operators and their steady expectations around the period.
    Eigen::MatrixXcd b_fwd = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd b_bwd = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t j = 0; j < arr.size(); ++j) {
        const complexd phase = std::exp(I * arr.phi * static_cast<double>(j));
        b_fwd += gen.lowering(j) / phase;
        b_bwd += gen.lowering(j) * phase;
    }
    std::vector<complexd> mean_fwd(msamples), mean_bwd(msamples);
    for (std::size_t i = 0; i < msamples; ++i) {
        mean_fwd[i] = (b_fwd * sp.states[i]).trace();
        mean_bwd[i] = (b_bwd * sp.states[i]).trace();
    }

    const Eigen::MatrixXcd ops[2] = {b_fwd, b_bwd};
    const std::vector<complexd>* means[2] = {&mean_fwd, &mean_bwd};

    // Common tau window from a probe regression (both directions).
    const std::size_t cap_steps = static_cast<std::size_t>(
        std::ceil(std::min(200.0 / gamma1, 4000.0 * two_pi / m.omega_mod) / dt));
    std::size_t n_tau = cap_steps;
    {
        double c0 = 0.0;
        Eigen::MatrixXcd chi[2] = {b_fwd * sp.states[0], b_bwd * sp.states[0]};
        for (int dir = 0; dir < 2; ++dir)
            c0 = std::max(c0, std::abs((ops[dir].adjoint() * chi[dir]).trace() -
                                       std::conj((*means[dir])[0]) * (*means[dir])[0]));
        double recent = 0.0;
        for (std::size_t i = 1; i <= cap_steps; ++i) {
            for (int dir = 0; dir < 2; ++dir) {
                chi[dir] = rk4_step(gen, chi[dir], static_cast<double>(i - 1) * dt, dt);
                const complexd g = (ops[dir].adjoint() * chi[dir]).trace() -
                                   std::conj((*means[dir])[i % msamples]) * (*means[dir])[0];
                recent = std::max(recent, std::abs(g));
            }
            if (i % msamples == 0) {
                if (recent < 1e-6 * std::max(c0, 1e-300)) {
                    n_tau = i;
                    break;
                }
                recent = 0.0;
            }
        }
    }

    constexpr std::size_t n_phase = 64;
    const std::size_t stride = msamples / n_phase;
    std::vector<std::vector<complexd>> corr_k(2 * n_phase);
    for_each_index(2 * n_phase, workers, [&](std::size_t idx) {
        const int dir = static_cast<int>(idx % 2);
        const std::size_t k = idx / 2;
        const std::size_t i0 = k * stride;
        std::vector<complexd> g(n_tau + 1);
        Eigen::MatrixXcd chi = ops[dir] * sp.states[i0];
        const complexd mean0 = (*means[dir])[i0];
        for (std::size_t i = 0; i <= n_tau; ++i) {
            g[i] = (ops[dir].adjoint() * chi).trace() -
                   std::conj((*means[dir])[(i0 + i) % msamples]) * mean0;
            if (i < n_tau)
                chi = rk4_step(gen, chi, static_cast<double>(i0 + i) * dt, dt);
        }
        corr_k[idx] = std::move(g);
    });

    for (int dir = 0; dir < 2; ++dir) {
        std::vector<complexd> corr(n_tau + 1, 0.0);
        for (std::size_t k = 0; k < n_phase; ++k)
            for (std::size_t i = 0; i <= n_tau; ++i)
                corr[i] += corr_k[2 * k + static_cast<std::size_t>(dir)][i];
        for (auto& c : corr)
            c /= static_cast<double>(n_phase);

        SpectralDensity& sd = (dir == 0) ? out.forward : out.backward;
        for_each_index(detunings.size(), workers, [&](std::size_t gi) {
            const double delta = detunings[gi];
            complexd acc = 0.5 * corr[0];
            for (std::size_t i = 1; i < n_tau; ++i)
                acc += corr[i] * std::exp(complexd(0.0, -delta * static_cast<double>(i) * dt));
            acc += 0.5 * corr[n_tau] *
                   std::exp(complexd(0.0, -delta * static_cast<double>(n_tau) * dt));
            sd.psd[gi] = gamma1 * (acc * dt).real();
        });
    }

    // Coherent lines at n*Omega, binned onto the nearest grid point.
    const double span = std::max(std::abs(detunings.front()), std::abs(detunings.back()));
    const int n_lines = static_cast<int>(std::ceil(span / m.omega_mod)) + 2;
    const CoherentSidebands cs =
        sidebands_from_period(sp.states, msamples, dt, gen, drive, m, n_lines);
    const double flux_in = drive.rabi * drive.rabi / (2.0 * gamma1);
    const double bin = (detunings.back() - detunings.front()) /
                       static_cast<double>(detunings.size() - 1);
    for (int n = -n_lines; n <= n_lines; ++n) {
        const double line = n * m.omega_mod;
        if (line < detunings.front() - 0.5 * bin || line > detunings.back() + 0.5 * bin)
            continue;
        const auto gi = static_cast<std::size_t>(std::llround((line - detunings.front()) / bin));
        out.forward.psd[gi] += two_pi * flux_in * std::norm(cs.t_at(n)) / bin;
        out.backward.psd[gi] += two_pi * flux_in * std::norm(cs.r_at(n)) / bin;
    }
    return out;
}

} // namespace modmirror::lindblad
