#include "modmirror/config.hpp"

#include <fstream>

namespace modmirror::config {

double mhz_to_angular(double f_mhz) { return two_pi * 1e6 * f_mhz; }
double angular_to_mhz(double omega) { return omega / (two_pi * 1e6); }

namespace {

double need_number(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number())
        throw InvalidParameter(path + "." + key, "missing or not a number");
    return j[key].get<double>();
}

} // namespace

Scene scene_from_json(const nlohmann::json& j) {
    Scene scene;
    if (!j.contains("qubits") || !j["qubits"].is_array() || j["qubits"].empty())
        throw InvalidParameter("qubits", "missing or empty array");

    std::size_t idx = 0;
    for (const auto& q : j["qubits"]) {
        const std::string path = "qubits[" + std::to_string(idx) + "]";
        EmitterParams e;
        e.omega0 = mhz_to_angular(need_number(q, "f0_mhz", path));
        e.gamma1 = mhz_to_angular(need_number(q, "gamma1_mhz", path));
        e.gamma2 = mhz_to_angular(need_number(q, "gamma2_mhz", path));
        e.mod_amp = mhz_to_angular(need_number(q, "am_mhz", path));
        e.mod_phase = pi * need_number(q, "alpha_over_pi", path);
        scene.array.emitters.push_back(e);
        ++idx;
    }
    scene.array.phi = pi * need_number(j, "phi_over_pi", "scene");

    if (!j.contains("drive") || !j["drive"].is_object())
        throw InvalidParameter("drive", "missing object");
    const auto& d = j["drive"];
    scene.drive.omega = mhz_to_angular(need_number(d, "f_mhz", "drive"));
    scene.drive.rabi = mhz_to_angular(need_number(d, "rabi_mhz", "drive"));
    const std::string port = d.value("port", "left");
    if (port == "left")
        scene.drive.port = Port::left;
    else if (port == "right")
        scene.drive.port = Port::right;
    else
        throw InvalidParameter("drive.port", "must be \"left\" or \"right\"");

    if (!j.contains("modulation") || !j["modulation"].is_object())
        throw InvalidParameter("modulation", "missing object");
    scene.modulation.omega_mod =
        mhz_to_angular(need_number(j["modulation"], "omega_mhz", "modulation"));

    return validate(std::move(scene));
}

nlohmann::json scene_to_json(const Scene& scene) {
    nlohmann::json j;
    j["qubits"] = nlohmann::json::array();
    for (const auto& e : scene.array.emitters) {
        j["qubits"].push_back({{"f0_mhz", angular_to_mhz(e.omega0)},
                               {"gamma1_mhz", angular_to_mhz(e.gamma1)},
                               {"gamma2_mhz", angular_to_mhz(e.gamma2)},
                               {"am_mhz", angular_to_mhz(e.mod_amp)},
                               {"alpha_over_pi", e.mod_phase / pi}});
    }
    j["phi_over_pi"] = scene.array.phi / pi;
    j["drive"] = {{"f_mhz", angular_to_mhz(scene.drive.omega)},
                  {"rabi_mhz", angular_to_mhz(scene.drive.rabi)},
                  {"port", scene.drive.port == Port::left ? "left" : "right"}};
    j["modulation"] = {{"omega_mhz", angular_to_mhz(scene.modulation.omega_mod)}};
    return j;
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidParameter("config", "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter("config", std::string("parse error: ") + e.what());
    }
    return scene_from_json(j);
}

} // namespace modmirror::config
