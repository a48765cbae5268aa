#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "modmirror/errors.hpp"

// Shared domain types and unit conventions.
//
// Every rate and frequency inside the library is angular (rad/s). The CLI and
// all file formats speak MHz in the f = omega/(2*pi) convention instead; the
// conversion lives in config.cpp and nowhere else.

namespace modmirror {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// One two-level emitter coupled to the line. gamma2 is the total coherence
// decay rate; the radiative-only limit is gamma2 == gamma1/2. gamma2 is held
// constant: any dependence of the dephasing on the modulation amplitude is
// outside the model.
struct EmitterParams {
    double omega0 = 0.0;    // transition frequency (rad/s)
    double gamma1 = 0.0;    // radiative decay rate (rad/s), > 0
    double gamma2 = 0.0;    // coherence decay rate (rad/s), >= gamma1/2
    double mod_amp = 0.0;   // frequency-modulation amplitude A_m (rad/s), >= 0
    double mod_phase = 0.0; // modulation phase alpha_j (rad)

    // Pure-dephasing part of gamma2.
    double gamma_phi() const noexcept { return gamma2 - 0.5 * gamma1; }
};

enum class Port { left, right };

struct DriveConfig {
    double omega = 0.0; // probe frequency (rad/s)
    double rabi = 0.0;  // Rabi frequency of the incident tone (rad/s), >= 0
    Port port = Port::left;
};

struct ModulationConfig {
    double omega_mod = 0.0; // modulation frequency Omega (rad/s), > 0
};

// Ordered chain of emitters. Index 0 sits nearest the left port; light gains
// the phase phi between neighbours. All emitters must share one gamma1.
struct WaveguideArray {
    std::vector<EmitterParams> emitters;
    double phi = 0.0; // inter-emitter propagation phase, in [0, 2*pi)

    std::size_t size() const noexcept { return emitters.size(); }
    double gamma1() const { return emitters.at(0).gamma1; }
};

struct Scene {
    WaveguideArray array;
    DriveConfig drive;
    ModulationConfig modulation;
};

// Uniform frequency grid, endpoints included.
struct FrequencyGrid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;

    // Throws InvalidParameter unless count >= 2 and start < stop.
    std::vector<double> points() const;
};

// Power spectral density sampled on a detection grid; frequencies are
// detunings from the drive tone (rad/s), psd values are nonnegative up to
// integration leakage.
struct SpectralDensity {
    std::vector<double> frequencies;
    std::vector<double> psd;
};

double hz_to_angular(double f_hz);

// Checks every type invariant and returns the scene unchanged. Throws
// InvalidParameter whose message lists the field path of each violation.
Scene validate(Scene scene);

// Piecewise variants used by operations that only touch part of a scene.
void validate_array(const WaveguideArray& array);
void validate_drive(const DriveConfig& drive);
void validate_modulation(const ModulationConfig& modulation);

} // namespace modmirror
