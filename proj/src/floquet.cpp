#include "modmirror/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace modmirror::floquet {

namespace {

constexpr complexd I{0.0, 1.0};

WaveguideArray oriented(const WaveguideArray& array, Port port) {
    if (port == Port::left)
        return array;
    WaveguideArray mirrored = array;
    std::reverse(mirrored.emitters.begin(), mirrored.emitters.end());
    return mirrored;
}

Scene checked(const WaveguideArray& array, const DriveConfig& drive, const ModulationConfig& m) {
    return validate({array, drive, m});
}

} // namespace

double bessel_jn(int n, double x) {
    const double j = std::cyl_bessel_j(static_cast<double>(std::abs(n)), x);
    return (n < 0 && (n & 1)) ? -j : j;
}

int bessel_tail_cutoff(double x, double tol, int ceiling) {
    if (x < 0.0)
        throw InvalidParameter("mod_amp", "Bessel argument must be >= 0");
    double captured = bessel_jn(0, x) * bessel_jn(0, x);
    for (int n_cut = 0; n_cut <= ceiling; ++n_cut) {
        if (1.0 - captured < tol)
            return n_cut;
        const double j = bessel_jn(n_cut + 1, x);
        captured += 2.0 * j * j;
    }
    throw NonConvergence("Bessel tail bound not reached below n = " + std::to_string(ceiling));
}

complexd single_qubit_t0(const EmitterParams& q, const ModulationConfig& m, double omega,
                         int ceiling) {
    validate_array({{q}, 0.0});
    validate_modulation(m);
    const double x = q.mod_amp / m.omega_mod;
    const int n_cut = bessel_tail_cutoff(x, 1e-12, ceiling);
    complexd t0 = 1.0;
    for (int n = -n_cut; n <= n_cut; ++n) {
        const double jn = bessel_jn(n, x);
        t0 += I * (0.5 * q.gamma1) * jn * jn /
              complexd(q.omega0 + n * m.omega_mod - omega, -q.gamma2);
    }
    return t0;
}

complexd single_qubit_pn(const EmitterParams& q, const ModulationConfig& m, double omega, int n,
                         double rabi, int ceiling) {
    // Closed form for the conjugate-pair coupling, obtained from the
    // substitution p = e^{-i (A/Omega) sin(Omega t + alpha)} u and
    // Jacobi-Anger:
    //   p^(n) = e^{-i n alpha} (Omega_R/2)
    //           sum_k J_{n+k}(x) J_k(x) / (omega - k*Omega - omega0 + i*Gamma2).
    // It differs from the printed double-Bessel sum by (-1)^n; |p^(n)| and the
    // n = 0 coefficient agree.
    validate_array({{q}, 0.0});
    validate_modulation(m);
    const double x = q.mod_amp / m.omega_mod;
    const int n_cut = bessel_tail_cutoff(x, 1e-12, ceiling);
    const int span = n_cut + std::abs(n);
    complexd sum = 0.0;
    for (int k = -span; k <= span; ++k) {
        sum += bessel_jn(n + k, x) * bessel_jn(k, x) /
               complexd(omega - k * m.omega_mod - q.omega0, q.gamma2);
    }
    return std::exp(-I * static_cast<double>(n) * q.mod_phase) * 0.5 * rabi * sum;
}

double FloquetSolution::tail_ratio() const {
    const double peak = amplitudes.cwiseAbs().maxCoeff();
    if (peak == 0.0)
        return 0.0;
    double edge = 0.0;
    for (std::size_t j = 0; j < n_emitters; ++j)
        edge = std::max({edge, std::abs(p(j, n_max)), std::abs(p(j, -n_max))});
    return edge / peak;
}

double SidebandSpectrum::inelastic_power_r() const {
    double s = 0.0;
    for (int n = -n_max; n <= n_max; ++n)
        if (n != 0)
            s += std::norm(r_at(n));
    return s;
}

double SidebandSpectrum::inelastic_power_t() const {
    double s = 0.0;
    for (int n = -n_max; n <= n_max; ++n)
        if (n != 0)
            s += std::norm(t_at(n));
    return s;
}

FloquetSystem assemble_floquet_system(const WaveguideArray& array_in, const DriveConfig& drive,
                                      const ModulationConfig& m, int n_max) {
    const Scene scene = checked(array_in, drive, m);
    const WaveguideArray array = oriented(scene.array, drive.port);
    const std::size_t nq = array.size();

    bool modulated = false;
    for (const auto& q : array.emitters)
        modulated = modulated || q.mod_amp > 0.0;
    if (n_max < 0 || (modulated && n_max < 1))
        throw InvalidParameter("n_max", "need n_max >= 1 when any mod_amp > 0");

    FloquetSystem sys;
    sys.n_emitters = nq;
    sys.n_max = n_max;
    const std::size_t dim = nq * static_cast<std::size_t>(2 * n_max + 1);
    sys.lhs = Eigen::MatrixXcd::Zero(dim, dim);
    sys.rhs = Eigen::VectorXcd::Zero(dim);

    const double gamma1 = array.gamma1();
    for (int n = -n_max; n <= n_max; ++n) {
        for (std::size_t j = 0; j < nq; ++j) {
            const EmitterParams& q = array.emitters[j];
            const std::size_t row = sys.index(j, n);
            sys.lhs(row, row) += complexd(drive.omega + n * m.omega_mod - q.omega0, q.gamma_phi());
            for (std::size_t k = 0; k < nq; ++k) {
                const double djk = std::abs(static_cast<double>(j) - static_cast<double>(k));
                sys.lhs(row, sys.index(k, n)) += I * 0.5 * gamma1 * std::exp(I * array.phi * djk);
            }
            const complexd hop = 0.5 * q.mod_amp * std::exp(I * q.mod_phase);
            if (n > -n_max)
                sys.lhs(row, sys.index(j, n - 1)) -= std::conj(hop);
            if (n < n_max)
                sys.lhs(row, sys.index(j, n + 1)) -= hop;
            if (n == 0)
                sys.rhs(row) = 0.5 * drive.rabi * std::exp(I * array.phi * static_cast<double>(j));
        }
    }
    return sys;
}

FloquetSolution solve_sidebands(const WaveguideArray& array, const DriveConfig& drive,
                                const ModulationConfig& m, int n_max) {
    const FloquetSystem sys = assemble_floquet_system(array, drive, m, n_max);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.lhs);
    const Eigen::VectorXcd x = lu.solve(sys.rhs);

    const double rhs_norm = sys.rhs.norm();
    const double residual = (sys.lhs * x - sys.rhs).norm();
    if (!x.allFinite() || (rhs_norm > 0.0 && residual > 1e-10 * rhs_norm))
        throw SingularSystem("Floquet system ill-conditioned (residual " +
                             std::to_string(residual) + "); gamma2 = gamma1/2 with zero "
                             "detuning everywhere can make it defective");

    FloquetSolution sol;
    sol.n_emitters = sys.n_emitters;
    sol.n_max = n_max;
    sol.amplitudes.resize(sys.n_emitters, 2 * n_max + 1);
    for (std::size_t j = 0; j < sys.n_emitters; ++j)
        for (int n = -n_max; n <= n_max; ++n)
            sol.amplitudes(j, n + n_max) = x(sys.index(j, n));
    return sol;
}

SidebandSpectrum scattering_coefficients(const FloquetSolution& sol, const WaveguideArray& array_in,
                                         const DriveConfig& drive) {
    if (!(drive.rabi > 0.0))
        throw InvalidParameter("drive.rabi", "scattering coefficients need rabi > 0");
    validate_array(array_in);
    const WaveguideArray array = oriented(array_in, drive.port);
    if (sol.n_emitters != array.size())
        throw InvalidParameter("solution", "emitter count differs from the array");

    const complexd pref = -I * array.gamma1() / drive.rabi;
    SidebandSpectrum spec;
    spec.n_max = sol.n_max;
    spec.r = Eigen::VectorXcd::Zero(2 * sol.n_max + 1);
    spec.t = Eigen::VectorXcd::Zero(2 * sol.n_max + 1);
    for (int n = -sol.n_max; n <= sol.n_max; ++n) {
        complexd back = 0.0, fwd = 0.0;
        for (std::size_t j = 0; j < array.size(); ++j) {
            const complexd phase = std::exp(I * array.phi * static_cast<double>(j));
            back += phase * sol.p(j, n);
            fwd += sol.p(j, n) / phase;
        }
        spec.r(n + sol.n_max) = pref * back;
        spec.t(n + sol.n_max) = (n == 0 ? 1.0 : 0.0) + pref * fwd;
    }
    return spec;
}

namespace {

SidebandSpectrum scattering_at(const WaveguideArray& array, const DriveConfig& drive,
                               const ModulationConfig& m, int n_max) {
    return scattering_coefficients(solve_sidebands(array, drive, m, n_max), array, drive);
}

} // namespace

int choose_truncation(const WaveguideArray& array, const DriveConfig& drive_in,
                      const ModulationConfig& m, double tol, int ceiling) {
    if (!(tol > 0.0))
        throw InvalidParameter("tol", "must be > 0");
    checked(array, drive_in, m);

    // Linear response: the converged n_max does not depend on the drive
    // amplitude, so a zero rabi is substituted before the scan.
    DriveConfig drive = drive_in;
    if (drive.rabi == 0.0)
        drive.rabi = array.gamma1();

    double x_max = 0.0;
    for (const auto& q : array.emitters)
        x_max = std::max(x_max, q.mod_amp / m.omega_mod);
    if (x_max == 0.0)
        return 0;

    for (int n_max = std::max(1, static_cast<int>(std::ceil(x_max))); n_max <= ceiling; ++n_max) {
        const SidebandSpectrum coarse = scattering_at(array, drive, m, n_max);
        const SidebandSpectrum fine = scattering_at(array, drive, m, 2 * n_max);
        double worst = 0.0;
        for (int n = -n_max; n <= n_max; ++n) {
            worst = std::max(worst, std::abs(std::abs(coarse.r_at(n)) - std::abs(fine.r_at(n))));
            worst = std::max(worst, std::abs(std::abs(coarse.t_at(n)) - std::abs(fine.t_at(n))));
        }
        if (worst < tol)
            return n_max;
    }
    throw NonConvergence("sideband truncation did not converge below n_max = " +
                         std::to_string(ceiling));
}

SidebandSpectrum solve_scattering(const WaveguideArray& array, const DriveConfig& drive,
                                  const ModulationConfig& m, int n_max) {
    if (n_max < 0)
        n_max = choose_truncation(array, drive, m);
    return scattering_at(array, drive, m, std::max(n_max, 0));
}

} // namespace modmirror::floquet
