#include "modmirror/analysis.hpp"

#include <cmath>
#include <complex>

#include "modmirror/floquet.hpp"
#include "modmirror/lindblad.hpp"
#include "modmirror/sweep.hpp"

namespace modmirror::analysis {

double directivity(double p_forward, double p_backward) {
    if (!(p_forward >= 0.0) || !(p_backward >= 0.0))
        throw InvalidParameter("powers", "must be >= 0");
    const double total = p_forward + p_backward;
    if (total == 0.0)
        throw UndefinedValue("directivity undefined for zero scattered power");
    return (p_forward - p_backward) / total;
}

namespace {

std::complex<double> sideband_t(const WaveguideArray& array, const DriveConfig& drive,
                                const ModulationConfig& m, int n, SolverTier tier, int n_max) {
    if (tier == SolverTier::floquet)
        return floquet::solve_scattering(array, drive, m, n_max).t_at(n);
    return lindblad::steady_sidebands(array, drive, m, n_max).t_at(n);
}

} // namespace

SweepMap alpha_frequency_map(const WaveguideArray& array_template, const DriveConfig& drive,
                             const ModulationConfig& m, const std::vector<double>& alpha_grid,
                             const std::vector<double>& detuning_grid, int sideband,
                             SolverTier tier, int workers) {
    if (array_template.size() < 2)
        throw InvalidParameter("emitters", "alpha sweep needs at least two emitters");
    if (alpha_grid.empty() || detuning_grid.empty())
        throw DegenerateInput("alpha and detuning grids must not be empty");
    validate({array_template, drive, m});

    const double omega0 = array_template.emitters.front().omega0;
    const int n_abs = std::abs(sideband);

    SweepMap map;
    map.alpha_grid = alpha_grid;
    map.detuning_grid = detuning_grid;
    map.sideband = sideband;
    map.cells.resize(alpha_grid.size() * detuning_grid.size());

    // One truncation choice for the whole map keeps cells comparable; probe
    // both ends of the detuning grid and add a guard.
    int n_max = n_abs;
    if (tier == SolverTier::floquet) {
        DriveConfig d = drive;
        d.omega = omega0 + detuning_grid.front();
        n_max = floquet::choose_truncation(array_template, d, m);
        d.omega = omega0 + detuning_grid.back();
        n_max = std::max(n_max, floquet::choose_truncation(array_template, d, m));
        n_max = std::max(n_max + 1, n_abs + 1);
    } else {
        double x = 0.0;
        for (const auto& q : array_template.emitters)
            x = std::max(x, q.mod_amp / m.omega_mod);
        n_max = std::max(static_cast<int>(std::ceil(x)) + 2, n_abs + 1);
    }

    for_each_index(map.cells.size(), workers, [&](std::size_t idx) {
        const std::size_t ia = idx / detuning_grid.size();
        const std::size_t id = idx % detuning_grid.size();
        WaveguideArray arr = array_template;
        arr.emitters[1].mod_phase = alpha_grid[ia];
        DriveConfig d = drive;
        d.omega = omega0 + detuning_grid[id];

        double pf = 0.0, pb = 0.0;
        if (tier == SolverTier::floquet) {
            const auto spec = floquet::solve_scattering(arr, d, m, n_max);
            pf = std::norm(spec.t_at(sideband));
            pb = std::norm(spec.r_at(sideband));
        } else {
            const auto cs = lindblad::steady_sidebands(arr, d, m, n_max);
            pf = std::norm(cs.t_at(sideband));
            pb = std::norm(cs.r_at(sideband));
        }
        DirectionalityRecord& cell = map.cells[idx];
        cell.alpha = alpha_grid[ia];
        cell.detuning = detuning_grid[id];
        cell.p_forward = pf;
        cell.p_backward = pb;
        cell.directivity = (pf + pb > 0.0) ? (pf - pb) / (pf + pb) : 0.0;
    });

    // Transmission and reflection panels share one normalization constant so
    // their relative magnitudes (and hence D) stay comparable.
    double peak = 0.0;
    for (const auto& c : map.cells)
        peak = std::max({peak, c.p_forward, c.p_backward});
    map.panel_norm = peak;
    return map;
}

IsolatorMetrics isolator_metrics(double t_n_left_power, double t_n_right_power) {
    if (!(t_n_left_power >= 0.0) || !(t_n_right_power >= 0.0))
        throw InvalidParameter("powers", "must be >= 0");
    if (t_n_right_power == 0.0 || t_n_left_power == 0.0)
        throw UndefinedValue("isolation undefined for zero transmission");
    IsolatorMetrics metrics;
    metrics.isolation_db = 10.0 * std::log10(t_n_left_power / t_n_right_power);
    metrics.insertion_loss_db = -10.0 * std::log10(t_n_left_power);
    return metrics;
}

double gyrator_check(const WaveguideArray& array, const DriveConfig& drive,
                     const ModulationConfig& m, int sideband) {
    DriveConfig left = drive;
    left.port = Port::left;
    DriveConfig right = drive;
    right.port = Port::right;
    const auto tl = sideband_t(array, left, m, sideband, SolverTier::floquet, -1);
    const auto tr = sideband_t(array, right, m, sideband, SolverTier::floquet, -1);
    if (std::abs(tl) < 1e-9 || std::abs(tr) < 1e-9)
        throw AmplitudeTooSmall("sideband transmission below 1e-9, phase is meaningless");
    double diff = std::arg(tl) - std::arg(tr);
    diff = std::fmod(diff, two_pi);
    if (diff < 0.0)
        diff += two_pi;
    return diff;
}

PowerMaps power_map(const WaveguideArray& array, const DriveConfig& drive_template,
                    const ModulationConfig& m, const std::vector<double>& power_grid,
                    const std::vector<double>& detuning_grid, int n_max, int workers) {
    if (power_grid.empty() || detuning_grid.empty())
        throw DegenerateInput("power and detuning grids must not be empty");
    validate({array, drive_template, m});
    for (double p : power_grid)
        if (!(p > 0.0))
            throw InvalidParameter("power_grid", "(rabi/gamma1)^2 values must be > 0");

    const double gamma1 = array.gamma1();
    const double omega0 = array.emitters.front().omega0;
    const std::size_t rows = power_grid.size(), cols = detuning_grid.size();

    PowerMaps maps;
    maps.power_grid = power_grid;
    maps.detuning_grid = detuning_grid;
    maps.r_elastic.resize(rows, cols);
    maps.t_elastic.resize(rows, cols);
    maps.r_inelastic.resize(rows, cols);
    maps.t_inelastic.resize(rows, cols);
    maps.r_stokes.resize(rows, cols);
    maps.t_stokes.resize(rows, cols);

    for_each_index(rows * cols, workers, [&](std::size_t idx) {
        const std::size_t ir = idx / cols, ic = idx % cols;
        DriveConfig d = drive_template;
        d.rabi = std::sqrt(power_grid[ir]) * gamma1;
        d.omega = omega0 + detuning_grid[ic];
        const auto cs = lindblad::steady_sidebands(array, d, m, n_max);
        maps.r_elastic(ir, ic) = std::norm(cs.r_at(0));
        maps.t_elastic(ir, ic) = std::norm(cs.t_at(0));
        maps.r_inelastic(ir, ic) = cs.inelastic_power_r();
        maps.t_inelastic(ir, ic) = cs.inelastic_power_t();
        maps.r_stokes(ir, ic) = std::norm(cs.r_at(-1));
        maps.t_stokes(ir, ic) = std::norm(cs.t_at(-1));
    });
    return maps;
}

} // namespace modmirror::analysis
