#include "modmirror/types.hpp"

#include <cmath>
#include <string>

namespace modmirror {

std::vector<double> FrequencyGrid::points() const {
    if (count < 2)
        throw InvalidParameter("grid.count", "need at least 2 points");
    if (!(start < stop))
        throw InvalidParameter("grid.start", "start must be below stop");
    std::vector<double> p(count);
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        p[i] = start + step * static_cast<double>(i);
    p.back() = stop;
    return p;
}

double hz_to_angular(double f_hz) { return two_pi * f_hz; }

namespace {

void append(std::string& all, const std::string& field, const char* message) {
    if (!all.empty())
        all += "; ";
    all += field + ": " + message;
}

void collect_array(const WaveguideArray& array, std::string& bad) {
    const auto& em = array.emitters;
    if (em.empty()) {
        append(bad, "emitters", "list must not be empty");
    } else {
        const double gamma1_ref = em.front().gamma1;
        for (std::size_t j = 0; j < em.size(); ++j) {
            const std::string base = "emitters[" + std::to_string(j) + "]";
            const EmitterParams& q = em[j];
            if (!(q.gamma1 > 0.0))
                append(bad, base + ".gamma1", "must be > 0");
            if (!(q.gamma2 >= 0.5 * q.gamma1))
                append(bad, base + ".gamma2", "must be >= gamma1/2");
            if (!(q.mod_amp >= 0.0))
                append(bad, base + ".mod_amp", "must be >= 0");
            if (!(std::abs(q.gamma1 - gamma1_ref) <=
                  1e-12 * std::max(std::abs(gamma1_ref), std::abs(q.gamma1))))
                append(bad, base + ".gamma1", "all emitters must share one gamma1");
        }
    }
    if (!(array.phi >= 0.0 && array.phi < two_pi))
        append(bad, "phi", "must lie in [0, 2*pi)");
}

void collect_drive(const DriveConfig& drive, std::string& bad) {
    if (!(drive.rabi >= 0.0))
        append(bad, "drive.rabi", "must be >= 0");
}

void collect_modulation(const ModulationConfig& modulation, std::string& bad) {
    if (!(modulation.omega_mod > 0.0))
        append(bad, "modulation.omega_mod", "must be > 0");
}

void raise_if_bad(const std::string& bad) {
    if (!bad.empty())
        throw InvalidParameter(bad, "invalid scene");
}

} // namespace

Scene validate(Scene scene) {
    std::string bad;
    collect_array(scene.array, bad);
    collect_drive(scene.drive, bad);
    collect_modulation(scene.modulation, bad);
    raise_if_bad(bad);
    return scene;
}

void validate_array(const WaveguideArray& array) {
    std::string bad;
    collect_array(array, bad);
    raise_if_bad(bad);
}

void validate_drive(const DriveConfig& drive) {
    std::string bad;
    collect_drive(drive, bad);
    raise_if_bad(bad);
}

void validate_modulation(const ModulationConfig& modulation) {
    std::string bad;
    collect_modulation(modulation, bad);
    raise_if_bad(bad);
}

} // namespace modmirror
