#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "modmirror/types.hpp"

// Ingestion and least-squares fitting of measured transmission spectra.
// MeasuredSpectrum grids are ordinary frequencies in Hz (CSV files carry MHz);
// fitted rates are returned angular (rad/s) like everything else.

namespace modmirror::calibration {

struct MeasuredSpectrum {
    std::vector<double> freq_hz;
    std::vector<double> power; // |t|^2, >= 0
};

// Pointwise |t|^2 / |t_bg|^2. Throws GridMismatch / ZeroBackground.
MeasuredSpectrum normalize_transmission(const MeasuredSpectrum& raw,
                                        const MeasuredSpectrum& background);

struct QubitFit {
    double omega0 = 0.0, gamma1 = 0.0, gamma2 = 0.0; // rad/s
    double omega0_ci = 0.0, gamma1_ci = 0.0, gamma2_ci = 0.0; // 99% half-widths
    double residual_norm = 0.0;
    int iterations = 0;
};

// Nonlinear least squares of the unmodulated |t_0|^2 line shape. Deterministic
// initialization: omega0 at the dip minimum, gamma2 from the dip half width,
// gamma1 = 2*gamma2*(1 - sqrt(min |t|^2)).
QubitFit fit_qubit_params(const MeasuredSpectrum& spectrum);

struct ModAmpFit {
    double mod_amp = 0.0; // rad/s
    double mod_amp_ci = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

// One-parameter fit of the modulated |t_0|^2 (Bessel line shape) given known
// qubit parameters. The coarse scan covers A_m/Omega in [0, 8].
ModAmpFit fit_modulation_amplitude(const MeasuredSpectrum& spectrum, double omega0, double gamma1,
                                   double gamma2, const ModulationConfig& m);

struct CalibrationCurve {
    double slope = 0.0;     // rad/s per volt
    double intercept = 0.0; // rad/s
    double residual_norm = 0.0;
};

// Ordinary least squares of A_m against the applied voltage amplitude.
CalibrationCurve fit_linear_calibration(const std::vector<std::pair<double, double>>& av_am_pairs);

} // namespace modmirror::calibration
