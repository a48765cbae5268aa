#include "modmirror/bloch.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "modmirror/sweep.hpp"

namespace modmirror::bloch {

namespace {

using complexd = std::complex<double>;
using Eigen::Matrix2cd;

constexpr complexd I{0.0, 1.0};

struct Params {
    double delta0;   // omega0 - omega
    double rabi;
    double dw;       // modulation amplitude
    double alpha;
    double omega_mod;
    double omega;    // drive frequency (lab frame only)
    double gamma1, gamma2;
};

Params params_of(const EmitterParams& q, const DriveConfig& drive, const ModulationConfig& m) {
    validate({WaveguideArray{{q}, 0.0}, drive, m});
    return {q.omega0 - drive.omega, drive.rabi,    q.mod_amp, q.mod_phase,
            m.omega_mod,            drive.omega,   q.gamma1,  q.gamma2};
}

struct Vec3 {
    double x, y, z;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
};

Vec3 rhs(const Params& p, Frame frame, double t, const Vec3& s) {
    double wx, wy, wz;
    if (frame == Frame::rotating) {
        wx = p.rabi;
        wy = 0.0;
        wz = p.delta0 + p.dw * std::cos(p.omega_mod * t + p.alpha);
    } else {
        wx = p.rabi * std::cos(p.omega * t);
        wy = p.rabi * std::sin(p.omega * t);
        wz = p.delta0 + p.omega + p.dw * std::cos(p.omega_mod * t + p.alpha);
    }
    return {wy * s.z - wz * s.y - p.gamma2 * s.x,
            wz * s.x - wx * s.z - p.gamma2 * s.y,
            wx * s.y - wy * s.x - p.gamma1 * (s.z + 0.5)};
}

Vec3 rk4_step(const Params& p, Frame frame, double t, double dt, const Vec3& s) {
    const Vec3 k1 = rhs(p, frame, t, s);
    const Vec3 k2 = rhs(p, frame, t + 0.5 * dt, s + k1 * (0.5 * dt));
    const Vec3 k3 = rhs(p, frame, t + 0.5 * dt, s + k2 * (0.5 * dt));
    const Vec3 k4 = rhs(p, frame, t + dt, s + k3 * dt);
    return s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
}

} // namespace

double SpinState::norm() const { return std::sqrt(sx * sx + sy * sy + sz * sz); }

SpinTrajectory integrate_bloch(const EmitterParams& q, const DriveConfig& drive,
                               const ModulationConfig& m, double t_end, double dt,
                               Frame frame, SpinState s0) {
    const Params p = params_of(q, drive, m);
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw InvalidParameter("t_end/dt", "must be > 0");
    const double fastest = std::max({std::abs(p.delta0), p.rabi, p.omega_mod});
    if (fastest > 0.0 && dt > 0.05 * two_pi / fastest)
        throw StepSizeTooLarge("dt must not exceed 0.05 * 2*pi / max(|omega0-omega|, rabi, Omega)");

    const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    SpinTrajectory traj;
    traj.dt = dt;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    Vec3 s{s0.sx, s0.sy, s0.sz};
    for (std::size_t i = 0; i <= steps; ++i) {
        traj.times.push_back(static_cast<double>(i) * dt);
        traj.states.push_back({s.x, s.y, s.z});
        if (i < steps)
            s = rk4_step(p, frame, static_cast<double>(i) * dt, dt, s);
    }
    return traj;
}

SpinState to_rotating_frame(const SpinState& lab, double omega_drive, double t) {
    const double c = std::cos(omega_drive * t), s = std::sin(omega_drive * t);
    return {lab.sx * c + lab.sy * s, -lab.sx * s + lab.sy * c, lab.sz};
}

namespace {

// One steady modulation period of the rotating-frame orbit, sampled at
// samples_per_period + 1 points (first == last up to the attractor tolerance).
struct SteadyOrbit {
    std::vector<Vec3> states; // size M
    double dt = 0.0;
    std::size_t samples = 0;
};

SteadyOrbit find_steady_orbit(const Params& p, std::size_t min_samples) {
    const double period = two_pi / p.omega_mod;
    const double fastest =
        std::max({std::abs(p.delta0) + p.dw, p.rabi, p.omega_mod, p.gamma1, p.gamma2});
    std::size_t m = std::max<std::size_t>(
        min_samples, static_cast<std::size_t>(std::ceil(96.0 * period * fastest / two_pi)));
    m = ((m + 63) / 64) * 64;

    SteadyOrbit orbit;
    orbit.dt = period / static_cast<double>(m);
    orbit.samples = m;
    orbit.states.resize(m);

    const double slow = std::min(p.gamma1, p.gamma2);
    const std::size_t burn_periods =
        static_cast<std::size_t>(std::ceil(10.0 / (p.gamma1 * period)));
    const std::size_t max_periods =
        burn_periods + 64 + static_cast<std::size_t>(std::ceil(60.0 / (slow * period)));

    Vec3 s{0.0, 0.0, -0.5};
    Vec3 prev_end = s;
    // The generator is period-periodic, so time is folded into [0, period)
    // every cycle; this keeps the cosine argument free of drift.
    for (std::size_t cycle = 0; cycle < max_periods; ++cycle) {
        for (std::size_t i = 0; i < m; ++i) {
            orbit.states[i] = s;
            s = rk4_step(p, Frame::rotating, static_cast<double>(i) * orbit.dt, orbit.dt, s);
        }
        const double drift = std::max({std::abs(s.x - prev_end.x), std::abs(s.y - prev_end.y),
                                       std::abs(s.z - prev_end.z)});
        if (cycle >= burn_periods && drift < 1e-12)
            return orbit;
        prev_end = s;
    }
    throw NonStationary("no periodic steady orbit reached; increase damping or check drive");
}

Matrix2cd hamiltonian(const Params& p, double t) {
    // Basis order (|0>, |1>): sigma_z = diag(-1, +1).
    const double wz = p.delta0 + p.dw * std::cos(p.omega_mod * t + p.alpha);
    Matrix2cd h;
    h << -0.5 * wz, 0.5 * p.rabi, 0.5 * p.rabi, 0.5 * wz;
    return h;
}

Matrix2cd master_rhs(const Params& p, double t, const Matrix2cd& chi) {
    static const Matrix2cd sm = (Matrix2cd() << 0, 1, 0, 0).finished();
    static const Matrix2cd sp = (Matrix2cd() << 0, 0, 1, 0).finished();
    static const Matrix2cd sz = (Matrix2cd() << -1, 0, 0, 1).finished();
    const Matrix2cd h = hamiltonian(p, t);
    const double gphi = p.gamma2 - 0.5 * p.gamma1;
    Matrix2cd d = -I * (h * chi - chi * h);
    d += p.gamma1 * (sm * chi * sp - 0.5 * (sp * sm * chi + chi * sp * sm));
    d += 0.5 * gphi * (sz * chi * sz - chi);
    return d;
}

Matrix2cd rk4_master(const Params& p, double t, double dt, const Matrix2cd& chi) {
    const Matrix2cd k1 = master_rhs(p, t, chi);
    const Matrix2cd k2 = master_rhs(p, t + 0.5 * dt, chi + 0.5 * dt * k1);
    const Matrix2cd k3 = master_rhs(p, t + 0.5 * dt, chi + 0.5 * dt * k2);
    const Matrix2cd k4 = master_rhs(p, t + dt, chi + dt * k3);
    return chi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix2cd density_of(const Vec3& s) {
    Matrix2cd rho;
    rho << 0.5 - s.z, complexd(s.x, s.y), complexd(s.x, -s.y), 0.5 + s.z;
    return rho;
}

} // namespace

SpectralDensity emission_spectrum(const EmitterParams& q, const DriveConfig& drive,
                                  const ModulationConfig& m, const FrequencyGrid& grid,
                                  int workers) {
    const Params p = params_of(q, drive, m);
    const std::vector<double> detunings = grid.points();

    SpectralDensity out;
    out.frequencies = detunings;
    out.psd.assign(detunings.size(), 0.0);
    if (p.rabi == 0.0)
        return out; // steady state is the ground state: nothing radiates

    const SteadyOrbit orbit = find_steady_orbit(p, 256);
    const std::size_t m_samples = orbit.samples;
    const double dt = orbit.dt;

    std::vector<complexd> splus(m_samples);
    for (std::size_t i = 0; i < m_samples; ++i)
        splus[i] = complexd(orbit.states[i].x, orbit.states[i].y);

    static const Matrix2cd sm = (Matrix2cd() << 0, 1, 0, 0).finished();
    static const Matrix2cd sp = (Matrix2cd() << 0, 0, 1, 0).finished();

    // Probe regression from one phase to fix a common tau window: stop once
    // |C| has decayed by 1e-6 from tau = 0, capped at 200/Gamma1.
    const double period = two_pi / p.omega_mod;
    const std::size_t cap_steps =
        static_cast<std::size_t>(std::ceil(std::min(200.0 / p.gamma1, 4000.0 * period) / dt));
    std::size_t n_tau = cap_steps;
    {
        Matrix2cd chi = sm * density_of(orbit.states[0]);
        const double c0 = std::abs((sp * chi).trace() - splus[0] * std::conj(splus[0]));
        double recent_max = 0.0;
        for (std::size_t i = 1; i <= cap_steps; ++i) {
            chi = rk4_master(p, static_cast<double>(i - 1) * dt, dt, chi);
            const complexd g = (sp * chi).trace() -
                               splus[i % m_samples] * std::conj(splus[0]);
            recent_max = std::max(recent_max, std::abs(g));
            if (i % m_samples == 0) {
                if (recent_max < 1e-6 * c0) {
                    n_tau = i;
                    break;
                }
                recent_max = 0.0;
            }
        }
    }

    // Average the connected correlator over 64 start phases of the orbit.
    constexpr std::size_t n_phase = 64;
    const std::size_t stride = m_samples / n_phase;
    std::vector<std::vector<complexd>> g_k(n_phase);
    for_each_index(n_phase, workers, [&](std::size_t k) {
        const std::size_t i0 = k * stride;
        const double t0 = static_cast<double>(i0) * dt;
        std::vector<complexd> g(n_tau + 1);
        Matrix2cd chi = sm * density_of(orbit.states[i0]);
        const complexd sminus0 = std::conj(splus[i0]);
        for (std::size_t i = 0; i <= n_tau; ++i) {
            g[i] = (sp * chi).trace() - splus[(i0 + i) % m_samples] * sminus0;
            if (i < n_tau)
                chi = rk4_master(p, t0 + static_cast<double>(i) * dt, dt, chi);
        }
        g_k[k] = std::move(g);
    });

    std::vector<complexd> corr(n_tau + 1, 0.0);
    for (std::size_t k = 0; k < n_phase; ++k)
        for (std::size_t i = 0; i <= n_tau; ++i)
            corr[i] += g_k[k][i];
    for (auto& c : corr)
        c /= static_cast<double>(n_phase);

    // I(d) = Re trapz_tau e^{-i d tau} C(tau)
    for_each_index(detunings.size(), workers, [&](std::size_t gi) {
        const double d = detunings[gi];
        complexd acc = 0.5 * corr[0];
        for (std::size_t i = 1; i < n_tau; ++i)
            acc += corr[i] * std::exp(complexd(0.0, -d * static_cast<double>(i) * dt));
        acc += 0.5 * corr[n_tau] * std::exp(complexd(0.0, -d * static_cast<double>(n_tau) * dt));
        out.psd[gi] = (acc * dt).real();
    });
    return out;
}

MollowLines nested_mollow_lines(double rabi, double detuning, double dw,
                                const ModulationConfig& m) {
    if (!(m.omega_mod > 0.0))
        throw InvalidParameter("modulation.omega_mod", "must be > 0");
    if (!(rabi >= 0.0) || !(dw >= 0.0))
        throw InvalidParameter("rabi/dw", "must be >= 0");

    MollowLines lines;
    lines.rabi_prime = std::hypot(rabi, detuning);
    const double generalized = lines.rabi_prime;
    if (generalized == 0.0) {
        lines.rabi_second = m.omega_mod;
        lines.regime_warning = true;
    } else {
        lines.rabi_second =
            std::hypot(0.5 * rabi * dw / generalized, generalized - m.omega_mod);
        lines.regime_warning = dw > 0.5 * rabi;
    }
    for (int ip = -1; ip <= 1; ++ip)
        for (int iq = -1; iq <= 1; ++iq)
            lines.detunings[static_cast<std::size_t>(3 * (ip + 1) + (iq + 1))] =
                ip * lines.rabi_prime + iq * lines.rabi_second;
    return lines;
}

} // namespace modmirror::bloch
