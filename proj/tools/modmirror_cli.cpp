// modmirror: scattering from frequency-modulated emitters in a 1D waveguide.
//
// Every frequency on this surface is MHz in the omega/(2*pi) convention;
// internally everything is angular (rad/s). Each run writes its CSV output(s)
// plus a <prefix>.manifest.json recording the resolved parameters; re-running
// the stored argv reproduces the CSVs byte for byte, independent of the
// worker count.

#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modmirror/analysis.hpp"
#include "modmirror/bloch.hpp"
#include "modmirror/calibration.hpp"
#include "modmirror/config.hpp"
#include "modmirror/csv.hpp"
#include "modmirror/floquet.hpp"
#include "modmirror/lindblad.hpp"
#include "modmirror/sweep.hpp"
#include "modmirror/types.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace modmirror;
using nlohmann::json;

double mhz(double f) { return config::mhz_to_angular(f); }
double to_mhz(double w) { return config::angular_to_mhz(w); }

struct SweepSpec {
    double start = 0.0, stop = 0.0;
    std::size_t count = 0;
};

SweepSpec parse_sweep(const std::string& text) {
    SweepSpec s;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw InvalidParameter("sweep", "expected start:stop:count");
    try {
        s.start = std::stod(text.substr(0, c1));
        s.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        s.count = static_cast<std::size_t>(std::stoul(text.substr(c2 + 1)));
    } catch (...) {
        throw InvalidParameter("sweep", "expected start:stop:count with numbers");
    }
    if (s.count < 2 || !(s.start < s.stop))
        throw InvalidParameter("sweep", "need count >= 2 and start < stop");
    return s;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    return FrequencyGrid{a, b, n}.points();
}

// Fig. 1/3/4 device values as the built-in default scene.
Scene default_pair_scene() {
    Scene s;
    EmitterParams q;
    q.omega0 = mhz(6129.0);
    q.gamma1 = mhz(4.4);
    q.gamma2 = mhz(4.1);
    q.mod_amp = mhz(30.0);
    q.mod_phase = 0.0;
    s.array.emitters = {q, q};
    s.array.emitters[1].mod_phase = pi;
    s.array.phi = 0.5 * pi;
    s.drive = {mhz(6129.0), mhz(0.044), Port::left};
    s.modulation = {mhz(20.0)};
    return s;
}

struct Outputs {
    std::string prefix;
    std::vector<std::string> files;
    json manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    std::string csv_path(const std::string& suffix = "") {
        std::string p = prefix + suffix + ".csv";
        files.push_back(p);
        return p;
    }
    void finish() {
        manifest["outputs"] = files;
        manifest["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::ofstream out(prefix + ".manifest.json", std::ios::binary);
        if (!out)
            throw Error("cannot write " + prefix + ".manifest.json");
        out << manifest.dump(2) << '\n';
    }
};

Outputs make_outputs(const std::string& subcommand, const std::string& prefix,
                     const std::vector<std::string>& argv_tail, int workers) {
    Outputs o;
    o.prefix = prefix.empty() ? subcommand : prefix;
    o.manifest["tool"] = "modmirror";
    o.manifest["version"] = kVersion;
    o.manifest["subcommand"] = subcommand;
    json argv = json::array();
    argv.push_back(subcommand);
    for (const auto& a : argv_tail)
        argv.push_back(a);
    o.manifest["argv"] = argv;
    o.manifest["workers"] = workers;
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet sideband scattering from modulated waveguide emitters"};
    app.require_subcommand(1);
    app.set_version_flag("--app-version", kVersion);

    // Shared options, bound per subcommand.
    struct Common {
        std::string config_path;
        std::string prefix;
        int workers = 0;
    };

    auto add_common = [](CLI::App* sub, Common& c, bool with_config = true) {
        if (with_config)
            sub->add_option("--config", c.config_path, "scene config JSON");
        sub->add_option("--out", c.prefix, "output file prefix (default: subcommand name)");
        sub->add_option("--workers", c.workers,
                        "worker count (default: MODMIRROR_WORKERS or all cores)");
    };

    // ---- single-qubit ------------------------------------------------------
    auto* sq = app.add_subcommand("single-qubit", "elastic |t0|^2 line of one modulated qubit");
    Common sq_c;
    double sq_f0 = 6129.0, sq_g1 = 4.4, sq_g2 = 3.9, sq_am = 0.0, sq_om = 20.0;
    std::string sq_sweep = "6060:6200:281";
    add_common(sq, sq_c);
    sq->add_option("--f0-mhz", sq_f0, "qubit frequency");
    sq->add_option("--gamma1-mhz", sq_g1, "radiative decay");
    sq->add_option("--gamma2-mhz", sq_g2, "coherence decay");
    sq->add_option("--am-mhz", sq_am, "modulation amplitude");
    sq->add_option("--omega-mhz", sq_om, "modulation frequency");
    sq->add_option("--sweep", sq_sweep, "probe sweep start:stop:count in MHz");

    // ---- sidebands ---------------------------------------------------------
    auto* sb = app.add_subcommand("sidebands", "Floquet r_n/t_n for the configured scene");
    Common sb_c;
    std::string sb_nmax = "auto";
    add_common(sb, sb_c);
    sb->add_option("--nmax", sb_nmax, "sideband truncation: auto or an integer");

    // ---- mollow ------------------------------------------------------------
    auto* mo = app.add_subcommand("mollow", "emission spectrum vs modulation frequency");
    Common mo_c;
    double mo_f0 = 6129.0, mo_g1 = 4.4, mo_g2 = 3.9, mo_rabi = 52.0, mo_am_rel = 0.2;
    double mo_det_span = 80.0;
    std::size_t mo_det_steps = 321, mo_om_steps = 10;
    double mo_om_min = 30.0, mo_om_max = 75.0;
    add_common(mo, mo_c, false);
    mo->add_option("--f0-mhz", mo_f0, "qubit frequency (drive applied there)");
    mo->add_option("--gamma1-mhz", mo_g1, "radiative decay");
    mo->add_option("--gamma2-mhz", mo_g2, "coherence decay");
    mo->add_option("--rabi-mhz", mo_rabi, "drive Rabi frequency");
    mo->add_option("--am-rel", mo_am_rel, "modulation amplitude as a fraction of rabi");
    mo->add_option("--omega-min-mhz", mo_om_min, "modulation sweep start");
    mo->add_option("--omega-max-mhz", mo_om_max, "modulation sweep stop");
    mo->add_option("--omega-steps", mo_om_steps, "modulation sweep points");
    mo->add_option("--det-span-mhz", mo_det_span, "detection span around the drive");
    mo->add_option("--det-steps", mo_det_steps, "detection grid points");

    // ---- psd ---------------------------------------------------------------
    auto* ps = app.add_subcommand("psd", "forward/backward emission PSD (master equation)");
    Common ps_c;
    double ps_span = 41.0, ps_rabi = -1.0;
    std::size_t ps_steps = 83;
    add_common(ps, ps_c);
    ps->add_option("--det-span-mhz", ps_span, "detection span around the drive");
    ps->add_option("--det-steps", ps_steps, "detection grid points");
    ps->add_option("--rabi-mhz", ps_rabi, "override drive rabi (default: from scene)");

    // ---- map ---------------------------------------------------------------
    auto* mp = app.add_subcommand("map", "sideband power and directivity vs (alpha, detuning)");
    Common mp_c;
    int mp_sideband = -1;
    std::size_t mp_alpha_steps = 81, mp_det_steps = 161;
    double mp_det_span = 50.0;
    std::vector<double> mp_det_list;
    std::string mp_tier = "floquet";
    add_common(mp, mp_c);
    mp->add_option("--sideband", mp_sideband, "sideband index n");
    mp->add_option("--alpha-steps", mp_alpha_steps, "alpha grid points over [-pi, pi]");
    mp->add_option("--detuning-steps", mp_det_steps, "detuning grid points");
    mp->add_option("--detuning-span-mhz", mp_det_span, "detuning half-span around omega0");
    mp->add_option("--detuning-mhz", mp_det_list,
                   "explicit detuning list (overrides span/steps; use for D(alpha) cuts)");
    mp->add_option("--tier", mp_tier, "solver tier: floquet or lindblad");

    // ---- power-map ---------------------------------------------------------
    auto* pm = app.add_subcommand("power-map", "elastic/inelastic scattering vs drive power");
    Common pm_c;
    double pm_pmin = 1e-2, pm_pmax = 100.0, pm_det_span = 12.0;
    std::size_t pm_psteps = 9, pm_det_steps = 49;
    add_common(pm, pm_c);
    pm->add_option("--power-min", pm_pmin, "smallest (rabi/gamma1)^2");
    pm->add_option("--power-max", pm_pmax, "largest (rabi/gamma1)^2");
    pm->add_option("--power-steps", pm_psteps, "log-spaced power points");
    pm->add_option("--detuning-span-gamma1", pm_det_span, "detuning half-span in gamma1 units");
    pm->add_option("--detuning-steps", pm_det_steps, "detuning grid points");

    // ---- fit ---------------------------------------------------------------
    auto* ft = app.add_subcommand("fit", "least-squares calibration fits");
    Common ft_c;
    std::string ft_mode = "qubit", ft_input;
    double ft_f0 = 6129.0, ft_g1 = 4.4, ft_g2 = 3.9, ft_om = 20.0;
    add_common(ft, ft_c, false);
    ft->add_option("--mode", ft_mode, "qubit | modamp | linear");
    ft->add_option("--input", ft_input, "input CSV")->required();
    ft->add_option("--f0-mhz", ft_f0, "known qubit frequency (modamp mode)");
    ft->add_option("--gamma1-mhz", ft_g1, "known gamma1 (modamp mode)");
    ft->add_option("--gamma2-mhz", ft_g2, "known gamma2 (modamp mode)");
    ft->add_option("--omega-mhz", ft_om, "modulation frequency (modamp mode)");

    // ---- gyrator -----------------------------------------------------------
    auto* gy = app.add_subcommand("gyrator", "forward/backward sideband phase difference");
    Common gy_c;
    int gy_sideband = -1;
    double gy_span = 20.0;
    std::size_t gy_steps = 41;
    add_common(gy, gy_c);
    gy->add_option("--sideband", gy_sideband, "sideband index n");
    gy->add_option("--det-span-mhz", gy_span, "detuning scan half-span");
    gy->add_option("--det-steps", gy_steps, "detuning scan points");

    // ---- isolator ----------------------------------------------------------
    auto* is = app.add_subcommand("isolator", "isolation and insertion loss of one sideband");
    Common is_c;
    double is_alpha = -0.3, is_det = -20.0;
    int is_sideband = 1;
    add_common(is, is_c);
    is->add_option("--alpha-over-pi", is_alpha, "modulation phase of the second qubit");
    is->add_option("--detuning-mhz", is_det, "probe detuning from omega0");
    is->add_option("--sideband", is_sideband, "sideband index n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    std::vector<std::string> tail;
    for (int i = 2; i < argc; ++i)
        tail.emplace_back(argv[i]);

    try {
        if (*sq) {
            const SweepSpec sweep = parse_sweep(sq_sweep);
            EmitterParams q{mhz(sq_f0), mhz(sq_g1), mhz(sq_g2), mhz(sq_am), 0.0};
            ModulationConfig m{mhz(sq_om)};
            validate({WaveguideArray{{q}, 0.0}, DriveConfig{mhz(sq_f0), 0.0, Port::left}, m});
            Outputs out = make_outputs("single-qubit", sq_c.prefix, tail, 1);
            out.manifest["params"] = {{"f0_mhz", sq_f0},     {"gamma1_mhz", sq_g1},
                                      {"gamma2_mhz", sq_g2}, {"am_mhz", sq_am},
                                      {"omega_mhz", sq_om},  {"sweep", sq_sweep}};
            out.manifest["solver_tier"] = "analytic";
            out.manifest["grid_shapes"] = {{"probe", sweep.count}};
            csv::Writer w(out.csv_path(), {"f_mhz", "re_t0", "im_t0", "abs_t0_sq"});
            for (double f : linspace(sweep.start, sweep.stop, sweep.count)) {
                const auto t0 = floquet::single_qubit_t0(q, m, mhz(f));
                w.row(std::vector<double>{f, t0.real(), t0.imag(), std::norm(t0)});
            }
            out.finish();
        } else if (*sb) {
            const Scene scene = sb_c.config_path.empty() ? validate(default_pair_scene())
                                                         : config::load_scene(sb_c.config_path);
            int n_max = -1;
            if (sb_nmax != "auto")
                n_max = std::stoi(sb_nmax);
            const auto spec =
                floquet::solve_scattering(scene.array, scene.drive, scene.modulation, n_max);
            Outputs out = make_outputs("sidebands", sb_c.prefix, tail, 1);
            out.manifest["scene"] = config::scene_to_json(scene);
            out.manifest["solver_tier"] = "floquet";
            out.manifest["n_max"] = spec.n_max;
            out.manifest["grid_shapes"] = {{"sidebands", 2 * spec.n_max + 1}};
            csv::Writer w(out.csv_path(), {"n", "re_r", "im_r", "re_t", "im_t"});
            for (int n = -spec.n_max; n <= spec.n_max; ++n)
                w.row(std::vector<double>{static_cast<double>(n), spec.r_at(n).real(),
                                          spec.r_at(n).imag(), spec.t_at(n).real(),
                                          spec.t_at(n).imag()});
            out.finish();
        } else if (*mo) {
            EmitterParams q{mhz(mo_f0), mhz(mo_g1), mhz(mo_g2), 0.0, 0.0};
            DriveConfig drive{mhz(mo_f0), mhz(mo_rabi), Port::left};
            q.mod_amp = mo_am_rel * drive.rabi;
            const std::vector<double> omegas = linspace(mo_om_min, mo_om_max, mo_om_steps);
            const FrequencyGrid grid{-mhz(mo_det_span), mhz(mo_det_span), mo_det_steps};

            Outputs out = make_outputs("mollow", mo_c.prefix, tail, default_workers());
            out.manifest["params"] = {{"f0_mhz", mo_f0},         {"gamma1_mhz", mo_g1},
                                      {"gamma2_mhz", mo_g2},     {"rabi_mhz", mo_rabi},
                                      {"am_rel", mo_am_rel},     {"omega_min_mhz", mo_om_min},
                                      {"omega_max_mhz", mo_om_max}};
            out.manifest["solver_tier"] = "bloch";
            out.manifest["grid_shapes"] = {{"omega_mod", omegas.size()},
                                           {"detection", mo_det_steps}};
            std::vector<SpectralDensity> spectra(omegas.size());
            for_each_index(omegas.size(), mo_c.workers, [&](std::size_t i) {
                spectra[i] = bloch::emission_spectrum(q, drive, ModulationConfig{mhz(omegas[i])},
                                                      grid, 1);
            });
            csv::Writer w(out.csv_path(), {"omega_mod_mhz", "det_mhz", "psd"});
            for (std::size_t i = 0; i < omegas.size(); ++i)
                for (std::size_t k = 0; k < spectra[i].frequencies.size(); ++k)
                    w.row(std::vector<double>{omegas[i], to_mhz(spectra[i].frequencies[k]),
                                              spectra[i].psd[k]});
            out.finish();
        } else if (*ps) {
            Scene scene = ps_c.config_path.empty() ? validate(default_pair_scene())
                                                   : config::load_scene(ps_c.config_path);
            if (ps_rabi >= 0.0)
                scene.drive.rabi = mhz(ps_rabi);
            if (scene.drive.rabi == 0.0)
                throw InvalidParameter("drive.rabi", "psd needs a nonzero drive");
            const FrequencyGrid grid{-mhz(ps_span), mhz(ps_span), ps_steps};
            Outputs out = make_outputs("psd", ps_c.prefix, tail, default_workers());
            out.manifest["scene"] = config::scene_to_json(scene);
            out.manifest["solver_tier"] = "lindblad";
            out.manifest["grid_shapes"] = {{"detection", ps_steps}};
            const auto psd = lindblad::emission_psd(scene.array, scene.drive, scene.modulation,
                                                    grid, ps_c.workers);
            csv::Writer w(out.csv_path(), {"det_mhz", "psd_fwd", "psd_bwd"});
            for (std::size_t i = 0; i < psd.forward.frequencies.size(); ++i)
                w.row(std::vector<double>{to_mhz(psd.forward.frequencies[i]), psd.forward.psd[i],
                                          psd.backward.psd[i]});
            out.finish();
        } else if (*mp) {
            const Scene scene = mp_c.config_path.empty() ? validate(default_pair_scene())
                                                         : config::load_scene(mp_c.config_path);
            const auto tier = [&] {
                if (mp_tier == "floquet")
                    return analysis::SolverTier::floquet;
                if (mp_tier == "lindblad")
                    return analysis::SolverTier::lindblad;
                throw InvalidParameter("tier", "must be floquet or lindblad");
            }();
            const std::vector<double> alphas = linspace(-pi, pi, mp_alpha_steps);
            std::vector<double> dets;
            if (mp_det_list.empty()) {
                dets = linspace(-mhz(mp_det_span), mhz(mp_det_span), mp_det_steps);
            } else {
                for (double f : mp_det_list)
                    dets.push_back(mhz(f));
            }
            Outputs out = make_outputs("map", mp_c.prefix, tail, default_workers());
            out.manifest["scene"] = config::scene_to_json(scene);
            out.manifest["solver_tier"] = mp_tier;
            out.manifest["sideband"] = mp_sideband;
            out.manifest["grid_shapes"] = {{"alpha", mp_alpha_steps},
                                           {"detuning", dets.size()}};
            const auto map =
                analysis::alpha_frequency_map(scene.array, scene.drive, scene.modulation, alphas,
                                              dets, mp_sideband, tier, mp_c.workers);
            out.manifest["panel_norm"] = map.panel_norm;
            const std::string suffix = "_n" + std::to_string(mp_sideband);
            csv::Writer w(out.csv_path(suffix),
                          {"alpha_over_pi", "detuning_mhz", "p_fwd", "p_bwd", "directivity"});
            for (const auto& cell : map.cells)
                w.row(std::vector<double>{cell.alpha / pi, to_mhz(cell.detuning), cell.p_forward,
                                          cell.p_backward, cell.directivity});
            out.finish();
        } else if (*pm) {
            Scene scene;
            if (pm_c.config_path.empty()) {
                // Supplementary defaults: alpha difference pi, Omega = A_m =
                // 5*Gamma1, radiative-only linewidths.
                scene = default_pair_scene();
                for (auto& q : scene.array.emitters) {
                    q.gamma2 = 0.5 * q.gamma1;
                    q.mod_amp = 5.0 * q.gamma1;
                }
                scene.modulation.omega_mod = 5.0 * scene.array.gamma1();
                scene = validate(std::move(scene));
            } else {
                scene = config::load_scene(pm_c.config_path);
            }
            if (pm_psteps < 1)
                throw DegenerateInput("power-steps must be >= 1");
            std::vector<double> powers(pm_psteps);
            for (std::size_t i = 0; i < pm_psteps; ++i)
                powers[i] = pm_pmin * std::pow(pm_pmax / pm_pmin,
                                               pm_psteps == 1
                                                   ? 0.0
                                                   : static_cast<double>(i) /
                                                         static_cast<double>(pm_psteps - 1));
            const double g1 = scene.array.gamma1();
            const std::vector<double> dets =
                linspace(-pm_det_span * g1, pm_det_span * g1, pm_det_steps);
            Outputs out = make_outputs("power-map", pm_c.prefix, tail, default_workers());
            out.manifest["scene"] = config::scene_to_json(scene);
            out.manifest["solver_tier"] = "lindblad";
            out.manifest["grid_shapes"] = {{"power", pm_psteps}, {"detuning", pm_det_steps}};
            const auto maps = analysis::power_map(scene.array, scene.drive, scene.modulation,
                                                  powers, dets, 3, pm_c.workers);
            csv::Writer w(out.csv_path(),
                          {"power", "detuning_over_gamma1", "r_elastic", "t_elastic",
                           "r_inelastic", "t_inelastic", "r_stokes", "t_stokes"});
            for (std::size_t ir = 0; ir < powers.size(); ++ir)
                for (std::size_t ic = 0; ic < dets.size(); ++ic)
                    w.row(std::vector<double>{
                        powers[ir], dets[ic] / g1, maps.r_elastic(ir, ic),
                        maps.t_elastic(ir, ic), maps.r_inelastic(ir, ic),
                        maps.t_inelastic(ir, ic), maps.r_stokes(ir, ic),
                        maps.t_stokes(ir, ic)});
            out.finish();
        } else if (*ft) {
            Outputs out = make_outputs("fit", ft_c.prefix, tail, 1);
            out.manifest["solver_tier"] = "calibration";
            out.manifest["mode"] = ft_mode;
            out.manifest["input"] = ft_input;
            out.manifest["grid_shapes"] = json::object();
            json result;
            if (ft_mode == "qubit" || ft_mode == "modamp") {
                const csv::Table table = csv::read_table(ft_input);
                calibration::MeasuredSpectrum spec;
                for (double f : table.column("freq_mhz"))
                    spec.freq_hz.push_back(f * 1e6);
                spec.power = table.column("power");
                if (ft_mode == "qubit") {
                    const auto fit = calibration::fit_qubit_params(spec);
                    result = {{"f0_mhz", to_mhz(fit.omega0)},
                              {"f0_ci_mhz", to_mhz(fit.omega0_ci)},
                              {"gamma1_mhz", to_mhz(fit.gamma1)},
                              {"gamma1_ci_mhz", to_mhz(fit.gamma1_ci)},
                              {"gamma2_mhz", to_mhz(fit.gamma2)},
                              {"gamma2_ci_mhz", to_mhz(fit.gamma2_ci)},
                              {"residual_norm", fit.residual_norm},
                              {"iterations", fit.iterations}};
                } else {
                    const auto fit = calibration::fit_modulation_amplitude(
                        spec, mhz(ft_f0), mhz(ft_g1), mhz(ft_g2), ModulationConfig{mhz(ft_om)});
                    result = {{"am_mhz", to_mhz(fit.mod_amp)},
                              {"am_ci_mhz", to_mhz(fit.mod_amp_ci)},
                              {"residual_norm", fit.residual_norm},
                              {"iterations", fit.iterations}};
                }
            } else if (ft_mode == "linear") {
                const csv::Table table = csv::read_table(ft_input);
                const auto& av = table.column("av_vpp");
                const auto& am = table.column("am_mhz");
                std::vector<std::pair<double, double>> pairs;
                for (std::size_t i = 0; i < av.size() && i < am.size(); ++i)
                    pairs.emplace_back(av[i], mhz(am[i]));
                const auto curve = calibration::fit_linear_calibration(pairs);
                result = {{"slope_mhz_per_vpp", to_mhz(curve.slope)},
                          {"intercept_mhz", to_mhz(curve.intercept)},
                          {"residual_norm_mhz", to_mhz(curve.residual_norm)}};
            } else {
                throw InvalidParameter("mode", "must be qubit, modamp or linear");
            }
            const std::string result_path = out.prefix + ".json";
            std::ofstream rf(result_path, std::ios::binary);
            if (!rf)
                throw Error("cannot write " + result_path);
            rf << result.dump(2) << '\n';
            out.files.push_back(result_path);
            out.finish();
        } else if (*gy) {
            const Scene scene = gy_c.config_path.empty() ? validate(default_pair_scene())
                                                         : config::load_scene(gy_c.config_path);
            const double omega0 = scene.array.emitters.front().omega0;
            Outputs out = make_outputs("gyrator", gy_c.prefix, tail, 1);
            out.manifest["scene"] = config::scene_to_json(scene);
            out.manifest["solver_tier"] = "floquet";
            out.manifest["sideband"] = gy_sideband;
            out.manifest["grid_shapes"] = {{"detuning", gy_steps}};
            csv::Writer w(out.csv_path(),
                          {"det_mhz", "phase_diff_rad", "abs_t_fwd", "abs_t_bwd"});
            for (double det : linspace(-gy_span, gy_span, gy_steps)) {
                DriveConfig dl = scene.drive;
                dl.omega = omega0 + mhz(det);
                dl.port = Port::left;
                DriveConfig dr = dl;
                dr.port = Port::right;
                const auto sl = floquet::solve_scattering(scene.array, dl, scene.modulation);
                const auto sr = floquet::solve_scattering(scene.array, dr, scene.modulation);
                const double phase =
                    analysis::gyrator_check(scene.array, dl, scene.modulation, gy_sideband);
                w.row(std::vector<double>{det, phase, std::abs(sl.t_at(gy_sideband)),
                                          std::abs(sr.t_at(gy_sideband))});
            }
            out.finish();
        } else if (*is) {
            Scene scene = is_c.config_path.empty() ? validate(default_pair_scene())
                                                   : config::load_scene(is_c.config_path);
            if (scene.array.size() < 2)
                throw InvalidParameter("emitters", "isolator needs two emitters");
            scene.array.emitters[1].mod_phase =
                scene.array.emitters[0].mod_phase + is_alpha * pi;
            const double omega0 = scene.array.emitters.front().omega0;
            DriveConfig dl = scene.drive;
            dl.omega = omega0 + mhz(is_det);
            dl.port = Port::left;
            DriveConfig dr = dl;
            dr.port = Port::right;
            const auto sl = floquet::solve_scattering(scene.array, dl, scene.modulation);
            const auto sr = floquet::solve_scattering(scene.array, dr, scene.modulation);
            const double s21 = std::norm(sl.t_at(is_sideband));
            const double s12 = std::norm(sr.t_at(is_sideband));
            const auto metrics = analysis::isolator_metrics(s21, s12);
            Outputs out = make_outputs("isolator", is_c.prefix, tail, 1);
            out.manifest["scene"] = config::scene_to_json(scene);
            out.manifest["solver_tier"] = "floquet";
            out.manifest["grid_shapes"] = json::object();
            csv::Writer w(out.csv_path(), {"alpha_over_pi", "sideband", "detuning_mhz", "s21",
                                           "s12", "isolation_db", "insertion_loss_db"});
            w.row(std::vector<double>{is_alpha, static_cast<double>(is_sideband), is_det, s21,
                                      s12, metrics.isolation_db, metrics.insertion_loss_db});
            out.finish();
        }
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
