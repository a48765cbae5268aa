#include "modmirror/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "modmirror/floquet.hpp"

namespace modmirror::calibration {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Levenberg-Marquardt with forward-difference Jacobian. Converges when the
// relative parameter step drops below 1e-9.
struct LmResult {
    VectorXd params;
    double residual_norm = 0.0;
    VectorXd ci; // 99% half-widths from (J^T J)^-1 * s^2
    int iterations = 0;
};

LmResult levenberg_marquardt(const std::function<VectorXd(const VectorXd&)>& residuals,
                             VectorXd p, int max_iter = 200) {
    const auto n_params = static_cast<std::size_t>(p.size());
    VectorXd r = residuals(p);
    if (!r.allFinite())
        throw FitDiverged("model residuals not finite at the starting point");
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    int iter = 0;

    MatrixXd jac(r.size(), p.size());
    for (; iter < max_iter; ++iter) {
        for (std::size_t j = 0; j < n_params; ++j) {
            const double h = 1e-7 * std::max(std::abs(p(static_cast<Eigen::Index>(j))), 1e-30);
            VectorXd pj = p;
            pj(static_cast<Eigen::Index>(j)) += h;
            jac.col(static_cast<Eigen::Index>(j)) = (residuals(pj) - r) / h;
        }
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd jtr = jac.transpose() * r;

        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            MatrixXd damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            const VectorXd step = damped.ldlt().solve(jtr);
            if (!step.allFinite())
                throw FitDiverged("normal equations singular");
            const VectorXd p_new = p - step;
            const VectorXd r_new = residuals(p_new);
            const double cost_new = r_new.allFinite() ? r_new.squaredNorm() : 2.0 * cost + 1.0;
            if (cost_new <= cost) {
                const double rel_step =
                    (step.cwiseQuotient(p.cwiseAbs().cwiseMax(1e-30))).cwiseAbs().maxCoeff();
                p = p_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel_step < 1e-9) {
                    LmResult out;
                    out.params = p;
                    out.residual_norm = std::sqrt(cost);
                    out.iterations = iter + 1;
                    const auto dof = static_cast<double>(
                        std::max<Eigen::Index>(r.size() - p.size(), 1));
                    const MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse() *
                                         (cost / dof);
                    out.ci = 2.576 * cov.diagonal().cwiseMax(0.0).cwiseSqrt();
                    return out;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped)
            throw FitDiverged("no descent step found (lambda exhausted)");
    }
    throw FitDiverged("no convergence within " + std::to_string(max_iter) + " iterations");
}

void require_aligned(const MeasuredSpectrum& s) {
    if (s.freq_hz.size() != s.power.size() || s.freq_hz.size() < 2)
        throw GridMismatch("spectrum grid and values must align (>= 2 points)");
    for (std::size_t i = 0; i < s.power.size(); ++i)
        if (!(s.power[i] >= 0.0))
            throw InvalidParameter("power[" + std::to_string(i) + "]", "must be >= 0");
}

} // namespace

MeasuredSpectrum normalize_transmission(const MeasuredSpectrum& raw,
                                        const MeasuredSpectrum& background) {
    require_aligned(raw);
    require_aligned(background);
    if (raw.freq_hz.size() != background.freq_hz.size())
        throw GridMismatch("raw and background grids differ in size");
    for (std::size_t i = 0; i < raw.freq_hz.size(); ++i)
        if (raw.freq_hz[i] != background.freq_hz[i])
            throw GridMismatch("raw and background grids differ at point " + std::to_string(i));

    MeasuredSpectrum out;
    out.freq_hz = raw.freq_hz;
    out.power.resize(raw.power.size());
    for (std::size_t i = 0; i < raw.power.size(); ++i) {
        if (!(background.power[i] > 0.0))
            throw ZeroBackground("background power vanishes at point " + std::to_string(i));
        out.power[i] = raw.power[i] / background.power[i];
    }
    return out;
}

namespace {

double lorentzian_t0_power(double omega, double omega0, double gamma1, double gamma2) {
    const std::complex<double> t =
        1.0 - std::complex<double>(0.0, 0.5 * gamma1) /
                  std::complex<double>(omega - omega0, gamma2);
    return std::norm(t);
}

} // namespace

QubitFit fit_qubit_params(const MeasuredSpectrum& spectrum) {
    require_aligned(spectrum);
    const std::size_t n = spectrum.freq_hz.size();

    std::size_t i_min = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (spectrum.power[i] < spectrum.power[i_min])
            i_min = i;
    const double depth = 1.0 - spectrum.power[i_min];
    if (depth < 0.05)
        throw FitDiverged("no transmission dip to fit (depth < 5%)");

    // Half width at half depth around the dip.
    const double half_level = spectrum.power[i_min] + 0.5 * depth;
    double f_lo = spectrum.freq_hz.front(), f_hi = spectrum.freq_hz.back();
    for (std::size_t i = i_min; i-- > 0;)
        if (spectrum.power[i] > half_level) {
            f_lo = spectrum.freq_hz[i];
            break;
        }
    for (std::size_t i = i_min + 1; i < n; ++i)
        if (spectrum.power[i] > half_level) {
            f_hi = spectrum.freq_hz[i];
            break;
        }
    const double omega0_init = hz_to_angular(spectrum.freq_hz[i_min]);
    const double gamma2_init = std::max(pi * (f_hi - f_lo), 1e-6 * std::abs(omega0_init));
    const double gamma1_init =
        2.0 * gamma2_init * (1.0 - std::sqrt(std::max(spectrum.power[i_min], 0.0)));

    const double span = hz_to_angular(spectrum.freq_hz.back() - spectrum.freq_hz.front());
    if (span < 5.0 * 2.0 * gamma2_init)
        throw InvalidParameter("spectrum", "grid must span at least 5 linewidths");

    const auto residuals = [&](const VectorXd& p) {
        VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            r(static_cast<Eigen::Index>(i)) =
                lorentzian_t0_power(hz_to_angular(spectrum.freq_hz[i]), p(0), p(1), p(2)) -
                spectrum.power[i];
        return r;
    };
    VectorXd p0(3);
    p0 << omega0_init, gamma1_init, gamma2_init;
    const LmResult lm = levenberg_marquardt(residuals, p0);

    QubitFit fit;
    fit.omega0 = lm.params(0);
    fit.gamma1 = std::abs(lm.params(1));
    fit.gamma2 = std::abs(lm.params(2));
    fit.omega0_ci = lm.ci(0);
    fit.gamma1_ci = lm.ci(1);
    fit.gamma2_ci = lm.ci(2);
    fit.residual_norm = lm.residual_norm;
    fit.iterations = lm.iterations;
    return fit;
}

ModAmpFit fit_modulation_amplitude(const MeasuredSpectrum& spectrum, double omega0, double gamma1,
                                   double gamma2, const ModulationConfig& m) {
    require_aligned(spectrum);
    if (!(m.omega_mod > 0.0))
        throw InvalidParameter("modulation.omega_mod", "must be > 0");
    EmitterParams q{omega0, gamma1, gamma2, 0.0, 0.0};

    const auto cost_at = [&](double am) {
        q.mod_amp = am;
        double c = 0.0;
        for (std::size_t i = 0; i < spectrum.freq_hz.size(); ++i) {
            const double model =
                std::norm(floquet::single_qubit_t0(q, m, hz_to_angular(spectrum.freq_hz[i])));
            const double diff = model - spectrum.power[i];
            c += diff * diff;
        }
        return c;
    };

    // Coarse deterministic scan, then local refinement; the sideband pattern
    // keeps the minimum unique well past the strong-modulation boundary.
    double best_am = 0.0, best_cost = cost_at(0.0);
    for (int i = 1; i <= 320; ++i) {
        const double am = (8.0 * i / 320.0) * m.omega_mod;
        const double c = cost_at(am);
        if (c < best_cost) {
            best_cost = c;
            best_am = am;
        }
    }

    const auto residuals = [&](const VectorXd& p) {
        q.mod_amp = std::abs(p(0));
        VectorXd r(static_cast<Eigen::Index>(spectrum.freq_hz.size()));
        for (std::size_t i = 0; i < spectrum.freq_hz.size(); ++i)
            r(static_cast<Eigen::Index>(i)) =
                std::norm(floquet::single_qubit_t0(q, m, hz_to_angular(spectrum.freq_hz[i]))) -
                spectrum.power[i];
        return r;
    };
    VectorXd p0(1);
    p0 << std::max(best_am, 1e-4 * m.omega_mod);
    const LmResult lm = levenberg_marquardt(residuals, p0);

    ModAmpFit fit;
    fit.mod_amp = std::abs(lm.params(0));
    fit.mod_amp_ci = lm.ci(0);
    fit.residual_norm = lm.residual_norm;
    fit.iterations = lm.iterations;
    // Fits hugging zero report the noise floor rather than a spurious value.
    if (fit.mod_amp < 1e-3 * m.omega_mod && best_am == 0.0)
        fit.mod_amp = 0.0;
    return fit;
}

CalibrationCurve fit_linear_calibration(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2)
        throw DegenerateInput("need at least two calibration points");
    double v_min = pairs.front().first, v_max = pairs.front().first;
    for (const auto& [av, am] : pairs) {
        v_min = std::min(v_min, av);
        v_max = std::max(v_max, av);
    }
    if (v_max - v_min <= 0.0)
        throw DegenerateInput("calibration voltages must not be all equal");

    MatrixXd a(pairs.size(), 2);
    VectorXd b(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        a(static_cast<Eigen::Index>(i), 0) = pairs[i].first;
        a(static_cast<Eigen::Index>(i), 1) = 1.0;
        b(static_cast<Eigen::Index>(i)) = pairs[i].second;
    }
    const VectorXd sol = a.colPivHouseholderQr().solve(b);

    CalibrationCurve curve;
    curve.slope = sol(0);
    curve.intercept = sol(1);
    curve.residual_norm = (a * sol - b).norm();
    return curve;
}

} // namespace modmirror::calibration
