#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "modmirror/analysis.hpp"
#include "modmirror/floquet.hpp"
#include "support/test_scenes.hpp"

using namespace modmirror;
namespace an = modmirror::analysis;
using test_scenes::MHz;

namespace {

const double g1 = 4.4 * MHz;
const ModulationConfig mod20{20.0 * MHz};

DriveConfig weak_drive(double omega) { return {omega, 0.01 * g1, Port::left}; }

} // namespace

TEST_CASE("directivity") {
    CHECK(an::directivity(0.3, 0.3) == 0.0);
    CHECK(an::directivity(0.2, 0.0) == 1.0);
    CHECK(an::directivity(0.0, 0.7) == -1.0);
    CHECK(an::directivity(0.9, 0.1) == doctest::Approx(0.8));
    CHECK_THROWS_AS(an::directivity(0.0, 0.0), UndefinedValue);
    CHECK_THROWS_AS(an::directivity(-0.1, 0.2), InvalidParameter);
}

TEST_CASE("degenerate 1x1 map equals the direct solver call") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, 0.7, 4.1);
    const double omega0 = arr.emitters[0].omega0;
    const DriveConfig d = weak_drive(omega0);
    const auto map = an::alpha_frequency_map(arr, d, mod20, {0.7}, {-20.0 * MHz}, -1);
    REQUIRE(map.cells.size() == 1);
    WaveguideArray direct = arr;
    direct.emitters[1].mod_phase = 0.7;
    DriveConfig dd = d;
    dd.omega = omega0 - 20.0 * MHz;
    const auto spec = floquet::solve_scattering(direct, dd, mod20);
    CHECK(map.at(0, 0).p_forward == doctest::Approx(std::norm(spec.t_at(-1))).epsilon(1e-9));
    CHECK(map.at(0, 0).p_backward == doctest::Approx(std::norm(spec.r_at(-1))).epsilon(1e-9));
}

TEST_CASE("empty grids are rejected") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, pi, 4.1);
    const DriveConfig d = weak_drive(arr.emitters[0].omega0);
    CHECK_THROWS_AS(an::alpha_frequency_map(arr, d, mod20, {}, {0.0}, -1), DegenerateInput);
    CHECK_THROWS_AS(an::power_map(arr, d, mod20, {}, {0.0}), DegenerateInput);
    CHECK_THROWS_AS(an::power_map(arr, d, mod20, {0.0}, {0.0}), InvalidParameter);
}

TEST_CASE("in-phase column is forward dominant at resonance") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, 0.0, 4.1);
    const auto map = an::alpha_frequency_map(arr, weak_drive(arr.emitters[0].omega0), mod20,
                                             {0.0}, {0.0}, -1);
    CHECK(map.at(0, 0).p_forward > 2.0 * map.at(0, 0).p_backward);
}

TEST_CASE("directivity map flips sign between alpha = 0 and alpha = pi") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, 0.0, 4.1);
    const auto map = an::alpha_frequency_map(arr, weak_drive(arr.emitters[0].omega0), mod20,
                                             {0.0, pi}, {-mod20.omega_mod}, -1);
    CHECK(map.at(0, 0).directivity > 0.0);
    CHECK(map.at(1, 0).directivity < 0.0);
}

TEST_CASE("map columns repeat after a 2*pi phase shift") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, 0.0, 4.1);
    const auto map = an::alpha_frequency_map(arr, weak_drive(arr.emitters[0].omega0), mod20,
                                             {0.4, 0.4 + two_pi}, {-mod20.omega_mod, 0.0}, -1);
    for (std::size_t id = 0; id < 2; ++id) {
        CHECK(std::abs(map.at(0, id).p_forward - map.at(1, id).p_forward) < 1e-10);
        CHECK(std::abs(map.at(0, id).p_backward - map.at(1, id).p_backward) < 1e-10);
        CHECK(std::abs(map.at(0, id).directivity - map.at(1, id).directivity) < 1e-10);
    }
}

TEST_CASE("serial and parallel sweeps produce identical maps") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, 0.0, 4.1);
    const DriveConfig d = weak_drive(arr.emitters[0].omega0);
    const std::vector<double> alphas{-pi, -0.3 * pi, 0.0, 0.6 * pi};
    const std::vector<double> dets{-30.0 * MHz, -20.0 * MHz, 0.0, 15.0 * MHz};
    const auto serial = an::alpha_frequency_map(arr, d, mod20, alphas, dets, -1,
                                                an::SolverTier::floquet, 1);
    const auto parallel = an::alpha_frequency_map(arr, d, mod20, alphas, dets, -1,
                                                  an::SolverTier::floquet, 4);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(serial.cells[i].p_forward == parallel.cells[i].p_forward);
        CHECK(serial.cells[i].p_backward == parallel.cells[i].p_backward);
        CHECK(serial.cells[i].directivity == parallel.cells[i].directivity);
    }
    CHECK(serial.panel_norm == parallel.panel_norm);
}

TEST_CASE("Stokes map shows resonances at -2W, -W, 0 and +W") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, pi, 4.1);
    const double omega0 = arr.emitters[0].omega0;
    std::vector<double> dets;
    for (double det = -55.0; det <= 35.01; det += 1.0)
        dets.push_back(det * MHz);
    const auto map = an::alpha_frequency_map(arr, weak_drive(omega0), mod20, {pi}, dets, -1);
    std::vector<double> maxima;
    for (std::size_t i = 1; i + 1 < dets.size(); ++i) {
        const double total = map.at(0, i).p_forward + map.at(0, i).p_backward;
        const double prev = map.at(0, i - 1).p_forward + map.at(0, i - 1).p_backward;
        const double next = map.at(0, i + 1).p_forward + map.at(0, i + 1).p_backward;
        if (total > prev && total >= next)
            maxima.push_back(dets[i]);
    }
    for (double want : {-2.0 * 20.0, -20.0, 0.0, 20.0}) {
        double closest = 1e300;
        for (double m : maxima)
            closest = std::min(closest, std::abs(m - want * MHz));
        CHECK(closest < 3.0 * MHz);
    }
}

TEST_CASE("port reversal leaves the mirror-symmetric device unchanged") {
    const WaveguideArray arr = test_scenes::pair_array(30.0, 0.2, 0.2, 4.1);
    DriveConfig dl = weak_drive(arr.emitters[0].omega0 - 13.0 * MHz);
    DriveConfig dr = dl;
    dr.port = Port::right;
    const auto left = floquet::solve_scattering(arr, dl, mod20);
    const auto right = floquet::solve_scattering(arr, dr, mod20);
    for (int n = -left.n_max; n <= left.n_max; ++n)
        CHECK(std::abs(std::norm(left.t_at(n)) - std::norm(right.t_at(n))) < 1e-10);
}

TEST_CASE("isolator_metrics") {
    CHECK(an::isolator_metrics(0.25, 0.25).isolation_db == doctest::Approx(0.0));
    CHECK(an::isolator_metrics(1.0, 0.5).insertion_loss_db == doctest::Approx(0.0));
    const auto m = an::isolator_metrics(0.08, 0.02);
    CHECK(m.isolation_db == doctest::Approx(10.0 * std::log10(4.0)));
    CHECK(m.insertion_loss_db == doctest::Approx(-10.0 * std::log10(0.08)));
    CHECK_THROWS_AS(an::isolator_metrics(0.1, 0.0), UndefinedValue);
}

TEST_CASE("gyrator_check") {
    SUBCASE("pi phase difference certifies the gyrator") {
        const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, pi, 4.1);
        const DriveConfig d = weak_drive(arr.emitters[0].omega0 - 7.0 * MHz);
        const double diff = an::gyrator_check(arr, d, mod20, -1);
        CHECK(std::abs(diff - pi) < 1e-6);
    }
    SUBCASE("symmetric device transmits reciprocally") {
        const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, 0.0, 4.1);
        const DriveConfig d = weak_drive(arr.emitters[0].omega0 - 7.0 * MHz);
        const double diff = an::gyrator_check(arr, d, mod20, -1);
        CHECK(std::min(diff, two_pi - diff) < 1e-9);
    }
    SUBCASE("elastic coefficient is reported without asserting pi") {
        const WaveguideArray arr = test_scenes::pair_array(30.0, 0.0, pi, 4.1);
        const DriveConfig d = weak_drive(arr.emitters[0].omega0 - 7.0 * MHz);
        CHECK_NOTHROW(an::gyrator_check(arr, d, mod20, 0));
    }
    SUBCASE("vanishing amplitude raises AmplitudeTooSmall") {
        const WaveguideArray arr = test_scenes::pair_array(0.0, 0.0, pi, 4.1);
        const DriveConfig d = weak_drive(arr.emitters[0].omega0);
        CHECK_THROWS_AS(an::gyrator_check(arr, d, mod20, -1), AmplitudeTooSmall);
    }
}

TEST_CASE("power_map weak row matches the Floquet prediction") {
    WaveguideArray arr = test_scenes::pair_array(0.0, 0.0, pi, 2.2);
    for (auto& q : arr.emitters)
        q.mod_amp = 5.0 * g1;
    const ModulationConfig m{5.0 * g1};
    const DriveConfig d{arr.emitters[0].omega0, 0.0, Port::left};
    const std::vector<double> dets{-5.0 * g1, 0.0};
    const auto maps = an::power_map(arr, d, m, {1e-4, 1.0}, dets, 3);
    for (std::size_t ic = 0; ic < dets.size(); ++ic) {
        DriveConfig dd{arr.emitters[0].omega0 + dets[ic], 0.01 * g1, Port::left};
        const auto fs = floquet::solve_scattering(arr, dd, m);
        CHECK(maps.r_stokes(0, ic) == doctest::Approx(std::norm(fs.r_at(-1))).epsilon(0.01));
        CHECK(maps.t_elastic(0, ic) == doctest::Approx(std::norm(fs.t_at(0))).epsilon(0.01));
    }
    // stronger drive suppresses the relative inelastic response
    CHECK(maps.r_inelastic(1, 1) < maps.r_inelastic(0, 1));
}
