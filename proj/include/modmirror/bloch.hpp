#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "modmirror/types.hpp"

// Driven, frequency-modulated spin-1/2 dynamics of one emitter and its
// emission spectrum.
//
// The spin obeys the torque equation dS/dt = W(t) x S - [Gamma2 Sx, Gamma2 Sy,
// Gamma1 (Sz + 1/2)]. In the frame rotating at the drive frequency the field
// is W(t) = [Omega_R, 0, omega0 - omega + dw cos(Omega t + alpha)] with dw the
// modulation amplitude; in the lab frame it is [Omega_R cos(omega t),
// Omega_R sin(omega t), omega0 + dw cos(Omega t + alpha)]. The equilibrium is
// S0 = [0, 0, -1/2].

namespace modmirror::bloch {

struct SpinState {
    double sx = 0.0, sy = 0.0, sz = -0.5;
    double norm() const;
};

inline constexpr SpinState spin_ground{0.0, 0.0, -0.5};

struct SpinTrajectory {
    std::vector<double> times;
    std::vector<SpinState> states;
    double dt = 0.0;
};

enum class Frame { rotating, lab };

// Fixed-step RK4 from t = 0 to at least t_end. The step must satisfy
// dt <= 0.05 * 2*pi / max(|omega0 - omega|, Omega_R, Omega), else
// StepSizeTooLarge.
SpinTrajectory integrate_bloch(const EmitterParams& q, const DriveConfig& drive,
                               const ModulationConfig& m, double t_end, double dt,
                               Frame frame = Frame::rotating, SpinState s0 = spin_ground);

// Lab -> rotating frame at the drive frequency.
SpinState to_rotating_frame(const SpinState& lab, double omega_drive, double t);

// Incoherent (connected-correlator) emission spectrum on a detection grid of
// detunings from the drive: I(d) = Re int_0^inf e^{-i d tau}
// <<dS+(t+tau) dS-(t)>>_t, with the absolute-time average taken over one
// modulation period of the steady orbit and the correlator propagated by
// quantum regression. Throws NonStationary when no periodic orbit is reached.
SpectralDensity emission_spectrum(const EmitterParams& q, const DriveConfig& drive,
                                  const ModulationConfig& m, const FrequencyGrid& grid,
                                  int workers = 0);

// The nine quasi-energy emission lines of the doubly dressed emitter,
// reported as detunings from the drive: line(p, q) = p*rabi_prime +
// q*rabi_second for p, q in {-1, 0, 1}.
struct MollowLines {
    double rabi_prime = 0.0;  // sqrt(Omega_R^2 + (omega0 - omega)^2)
    double rabi_second = 0.0; // sqrt((Omega_R*dw / (2 rabi_prime))^2 + (rabi_prime - Omega)^2)
    std::array<double, 9> detunings{};
    bool regime_warning = false; // set outside the dw << Omega_R validity regime

    double line(int p, int q) const { return detunings[static_cast<std::size_t>(3 * (p + 1) + (q + 1))]; }
};

MollowLines nested_mollow_lines(double rabi, double detuning, double dw,
                                const ModulationConfig& m);

} // namespace modmirror::bloch
