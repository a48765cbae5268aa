#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "modmirror/types.hpp"

// Directionality metrics and the parameter-sweep maps built on top of the
// solvers. Sweeps are data parallel: each cell is an independent solver call
// writing its own slot, so results do not depend on the worker count.

namespace modmirror::analysis {

enum class SolverTier { floquet, lindblad };

// D = (P_fwd - P_bwd) / (P_fwd + P_bwd); UndefinedValue when both are zero.
double directivity(double p_forward, double p_backward);

struct DirectionalityRecord {
    double alpha = 0.0;       // modulation phase of the second emitter (rad)
    double detuning = 0.0;    // probe detuning from omega0 (rad/s)
    double p_forward = 0.0;   // |t^(n)|^2
    double p_backward = 0.0;  // |r^(n)|^2
    double directivity = 0.0;
};

struct SweepMap {
    std::vector<double> alpha_grid;    // rad
    std::vector<double> detuning_grid; // rad/s
    int sideband = 0;
    std::vector<DirectionalityRecord> cells; // row-major: [alpha][detuning]
    double panel_norm = 0.0; // joint maximum of both power panels

    const DirectionalityRecord& at(std::size_t ia, std::size_t id) const {
        return cells[ia * detuning_grid.size() + id];
    }
};

// Fig.-4-style map: the template array must have at least two emitters; the
// second emitter's mod_phase is overwritten by each alpha grid point and the
// probe is swept as omega = omega0 + detuning. The drive's rabi and port are
// taken from `drive`.
SweepMap alpha_frequency_map(const WaveguideArray& array_template, const DriveConfig& drive,
                             const ModulationConfig& m, const std::vector<double>& alpha_grid,
                             const std::vector<double>& detuning_grid, int sideband,
                             SolverTier tier = SolverTier::floquet, int workers = 0);

struct IsolatorMetrics {
    double isolation_db = 0.0;      // 10 log10(S21/S12), powers of one sideband
    double insertion_loss_db = 0.0; // -10 log10(S21), positive dB
};

// Inputs are sideband powers |t_n|^2 for left (S21) and right (S12) incidence.
IsolatorMetrics isolator_metrics(double t_n_left_power, double t_n_right_power);

// arg(t_n^left) - arg(t_n^right) in [0, 2*pi), weak-drive tier. A value of pi
// certifies the gyrator relation S12 = -S21 of the sideband.
double gyrator_check(const WaveguideArray& array, const DriveConfig& drive,
                     const ModulationConfig& m, int sideband);

struct PowerMaps {
    std::vector<double> power_grid;    // (Omega_R / Gamma1)^2
    std::vector<double> detuning_grid; // rad/s from omega0
    // rows: power grid, cols: detuning grid
    Eigen::MatrixXd r_elastic, t_elastic;     // |r_0|^2, |t_0|^2
    Eigen::MatrixXd r_inelastic, t_inelastic; // sum_{n != 0} powers
    Eigen::MatrixXd r_stokes, t_stokes;       // n = -1 sideband powers
};

// Supplementary-Fig.-2-style maps on the lindblad tier.
PowerMaps power_map(const WaveguideArray& array, const DriveConfig& drive_template,
                    const ModulationConfig& m, const std::vector<double>& power_grid,
                    const std::vector<double>& detuning_grid, int n_max = 3, int workers = 0);

} // namespace modmirror::analysis
