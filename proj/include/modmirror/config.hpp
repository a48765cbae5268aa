#pragma once

#include <string>

#include <json.hpp>

#include "modmirror/types.hpp"

// The one place where units cross the I/O boundary: config files and the CLI
// quote every frequency and rate in MHz with the f = omega/(2*pi) convention
// (gamma1_mhz = 4.4 means Gamma1 = 2*pi * 4.4e6 rad/s).

namespace modmirror::config {

double mhz_to_angular(double f_mhz);
double angular_to_mhz(double omega);

// Schema: qubits[]{f0_mhz, gamma1_mhz, gamma2_mhz, am_mhz, alpha_over_pi},
// phi_over_pi, drive{f_mhz, rabi_mhz, port}, modulation{omega_mhz}.
Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& scene);

Scene load_scene(const std::string& path);

} // namespace modmirror::config
