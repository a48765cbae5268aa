#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "modmirror/types.hpp"

// Full master equation for N driven, modulated emitters with waveguide-
// correlated decay, used beyond linear response.
//
// Integration happens in the frame rotating at the drive frequency, where the
// generator is periodic with the modulation period:
//   H(t) = sum_j [omega0_j - omega + A_m^j cos(Omega t + alpha_j)] n_j
//        + (Gamma1/2) sum_{j<k} sin(phi |j-k|) (sp_j sm_k + sp_k sm_j)
//        + sum_j (Omega_R/2) (e^{+i phi j} sp_j + h.c.),
//   Ld rho = sum_{jk} K_jk (2 sm_j rho sp_k - {sp_k sm_j, rho}) + dephasing,
// with K_jk = (Gamma1/2) cos(phi (j-k)). Dephasing defaults to pure sigma_z
// channels of rate Gamma_phi = Gamma2 - Gamma1/2 per emitter, which keeps the
// bare population decay at Gamma1; DephasingModel::sigma_diagonal instead puts
// the full Gamma2 on the dissipator diagonal (the literal Supplementary
// reading, which adds 2*Gamma_phi to the population decay).
//
// Basis: 2^N states ordered lexicographically by qubit index, bit 0 = ground,
// qubit 0 in the most significant position. Port::right mirrors the emitter
// order, as in the Floquet solver.

namespace modmirror::lindblad {

using complexd = std::complex<double>;

enum class DephasingModel { pure_dephasing, sigma_diagonal };

struct Options {
    DephasingModel dephasing = DephasingModel::pure_dephasing;
    int check_stride = 32;      // state-invariant check interval, in steps
    bool strict_checks = false; // check after every step instead
};

class Generator {
public:
    Generator(const WaveguideArray& array, const DriveConfig& drive, const ModulationConfig& m,
              DephasingModel model = DephasingModel::pure_dephasing);

    // Instantaneous Liouvillian action rho -> drho/dt at time t.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho, double t) const;

    std::size_t n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(1) << n_; }
    const Eigen::MatrixXcd& lowering(std::size_t j) const { return sigma_[j]; }
    const WaveguideArray& oriented_array() const { return array_; }

private:
    std::size_t n_ = 0;
    WaveguideArray array_; // oriented left-to-right for the active port
    double omega_mod_ = 0.0;
    std::vector<Eigen::MatrixXcd> sigma_;     // lowering operators
    std::vector<Eigen::VectorXd> number_;     // diagonal of n_j
    std::vector<double> mod_amp_, mod_phase_; // per-emitter modulation
    Eigen::MatrixXcd h_static_;               // exchange + drive
    Eigen::MatrixXcd q_;                      // sum_jk K_jk sp_k sm_j
    std::vector<std::pair<std::size_t, std::size_t>> jump_pairs_;
    std::vector<double> jump_weights_;
    Eigen::MatrixXd dephasing_mask_; // elementwise sigma_z channel action
};

Generator build_generator(const WaveguideArray& array, const DriveConfig& drive,
                          const ModulationConfig& m,
                          DephasingModel model = DephasingModel::pure_dephasing);

Eigen::MatrixXcd ground_state(std::size_t n_qubits);

// Throws PositivityLost / StepSizeTooLarge when rho is no longer a state
// (Hermitian to 1e-10, unit trace to 1e-8, eigenvalues >= -1e-8).
void check_density(const Eigen::MatrixXcd& rho, const char* where);

struct DensityTrajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> states;
    double dt = 0.0;
};

// Fixed-step RK4 of the master equation from t = 0, sampling every step.
DensityTrajectory evolve(const Eigen::MatrixXcd& rho0, const WaveguideArray& array,
                         const DriveConfig& drive, const ModulationConfig& m, double t_end,
                         double dt, const Options& opts = {});

struct CoherentSidebands {
    int n_max = 0;
    Eigen::VectorXcd r, t; // index n + n_max
    double power = 0.0;    // (Omega_R / Gamma1)^2

    complexd r_at(int n) const { return r(n + n_max); }
    complexd t_at(int n) const { return t(n + n_max); }
    double inelastic_power_r() const;
    double inelastic_power_t() const;
};

// Fourier extraction of the coherent scattering coefficients from a periodic
// steady segment of the trajectory (last full modulation period):
//   c_{j,n} = (1/T) int e^{+i n Omega t} <sm_j>(t) dt,
//   r_n = -(i Gamma1/Omega_R) sum_j e^{+i phi j} c_{j,n},
//   t_n = delta_{n0} - (i Gamma1/Omega_R) sum_j e^{-i phi j} c_{j,n}.
// Throws NonStationary when the trajectory has not settled onto the attractor.
CoherentSidebands coherent_sidebands(const DensityTrajectory& traj, const WaveguideArray& array,
                                     const DriveConfig& drive, const ModulationConfig& m,
                                     int n_max);

// Convenience driver: evolve from the ground state to the periodic attractor
// (transient >= 10/Gamma1 discarded) and extract the sidebands.
CoherentSidebands steady_sidebands(const WaveguideArray& array, const DriveConfig& drive,
                                   const ModulationConfig& m, int n_max,
                                   const Options& opts = {});

struct EmissionPsd {
    SpectralDensity forward;  // collective operator sum_j e^{-i phi j} sm_j
    SpectralDensity backward; // collective operator sum_j e^{+i phi j} sm_j
};

// Output-field PSD on a grid of detunings from the drive. Incoherent part by
// quantum regression of the connected collective correlator; coherent
// sidebands enter as lines binned onto the nearest grid point.
EmissionPsd emission_psd(const WaveguideArray& array, const DriveConfig& drive,
                         const ModulationConfig& m, const FrequencyGrid& grid, int workers = 0,
                         const Options& opts = {});

} // namespace modmirror::lindblad
