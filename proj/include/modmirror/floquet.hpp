#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

#include "modmirror/types.hpp"

// Weak-drive (linear response) Floquet solver.
//
// The coherence of emitter j is expanded as
//     p_j(t) = sum_n p_j^(n) exp(-i (omega + n*Omega) t),
// and the sideband amplitudes obey, for each (j, n),
//
//   (omega + n*Omega) p_j^(n) = (omega0 - i*Gamma_phi^(j)) p_j^(n)
//       + (A_m^(j)/2) (e^{-i alpha_j} p_j^(n-1) + e^{+i alpha_j} p_j^(n+1))
//       - (i*Gamma1/2) sum_k e^{i phi |j-k|} p_k^(n)
//       + (Omega_R/2) e^{i phi j} delta_{n,0},
//
// with Gamma_phi = Gamma2 - Gamma1/2 so that the k = j term of the correlated
// sum restores the full coherence decay Gamma2 of a lone emitter. Emitters are
// indexed j = 0..N-1 from the left port; the incident wave carries e^{i phi j}.
// The n-coupling phases are the conjugate pair that follows from expanding
// A_m cos(Omega t + alpha_j); a common shift of all alpha_j is then a time
// translation and leaves every |r^(n)|, |t^(n)| unchanged.

namespace modmirror::floquet {

using complexd = std::complex<double>;

// J_n(x) for any integer n, x >= 0.
double bessel_jn(int n, double x);

// Smallest cutoff with sum_{|n| > n_cut} J_n(x)^2 < tol, via the completeness
// relation sum_n J_n(x)^2 = 1. Throws NonConvergence past `ceiling`.
int bessel_tail_cutoff(double x, double tol = 1e-12, int ceiling = 512);

// Eq.-style analytic results for one emitter (no drive-phase factor).
complexd single_qubit_t0(const EmitterParams& q, const ModulationConfig& m, double omega,
                         int ceiling = 512);
complexd single_qubit_pn(const EmitterParams& q, const ModulationConfig& m, double omega, int n,
                         double rabi, int ceiling = 512);

struct FloquetSolution {
    std::size_t n_emitters = 0;
    int n_max = 0;
    Eigen::MatrixXcd amplitudes; // N rows, 2*n_max+1 columns (column n + n_max)

    complexd p(std::size_t j, int n) const { return amplitudes(j, n + n_max); }
    // Largest boundary-sideband magnitude over the largest magnitude anywhere;
    // small once n_max is converged.
    double tail_ratio() const;
};

struct SidebandSpectrum {
    int n_max = 0;
    Eigen::VectorXcd r, t; // index n + n_max

    complexd r_at(int n) const { return r(n + n_max); }
    complexd t_at(int n) const { return t(n + n_max); }
    double total_power() const { return r.squaredNorm() + t.squaredNorm(); }
    // Sideband power summed over n != 0.
    double inelastic_power_r() const;
    double inelastic_power_t() const;
};

struct FloquetSystem {
    Eigen::MatrixXcd lhs;
    Eigen::VectorXcd rhs;
    std::size_t n_emitters = 0;
    int n_max = 0;

    // Unknown ordering is n-major: index = (n + n_max)*N + j, so that the
    // A_m = 0 system is block diagonal with N x N blocks.
    std::size_t index(std::size_t j, int n) const {
        return static_cast<std::size_t>(n + n_max) * n_emitters + j;
    }
};

FloquetSystem assemble_floquet_system(const WaveguideArray& array, const DriveConfig& drive,
                                      const ModulationConfig& m, int n_max);

// Dense LU solve of the assembled system. For port == right the emitter order
// is mirrored before assembly and the returned amplitudes are indexed in the
// mirrored frame, so scattering_coefficients applies unchanged.
FloquetSolution solve_sidebands(const WaveguideArray& array, const DriveConfig& drive,
                                const ModulationConfig& m, int n_max);

//   r^(n) = -(i Gamma1/Omega_R) sum_j e^{+i phi j} p_j^(n)
//   t^(n) = delta_{n,0} - (i Gamma1/Omega_R) sum_j e^{-i phi j} p_j^(n)
SidebandSpectrum scattering_coefficients(const FloquetSolution& sol, const WaveguideArray& array,
                                         const DriveConfig& drive);

// Smallest n_max whose doubling moves no |r^(n)|, |t^(n)| (|n| <= n_max) by
// more than tol. A_m = 0 gives 0.
int choose_truncation(const WaveguideArray& array, const DriveConfig& drive,
                      const ModulationConfig& m, double tol = 1e-8, int ceiling = 64);

// solve_sidebands + scattering_coefficients; n_max < 0 selects automatic
// truncation via choose_truncation.
SidebandSpectrum solve_scattering(const WaveguideArray& array, const DriveConfig& drive,
                                  const ModulationConfig& m, int n_max = -1);

} // namespace modmirror::floquet
