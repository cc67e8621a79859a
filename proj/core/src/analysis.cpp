// analysis.cpp — wavenumber formulas, separable oscillation fit, threshold scan

#include "oscidet/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "oscidet/errors.hpp"

namespace oscidet::analysis {

namespace {

constexpr double kSvdThreshold = 1e-10;       // rank cutoff (degenerate rates)
constexpr int kProfilePoints = 400;           // log-spaced trial wavenumbers
constexpr double kProfileSpan = 3.0;          // bracket [k0/3, 3 k0]
constexpr int kTernaryIterations = 80;        // bracket shrink (2/3)^80 ~ 1e-14
constexpr double kMinPeriods = 2.0;           // required grid span
constexpr double kMinSamplesPerPeriod = 20.0;
constexpr double kFlatSignificance = 10.0;    // interference vs noise scale

void check_pair(const osc::OscillationScenario& scenario, std::size_t i,
                std::size_t j, const char* fn) {
    const std::size_t n = scenario.states.size();
    if (i >= n || j >= n) {
        std::ostringstream msg;
        msg << fn << ": state pair (" << i << ", " << j
            << ") out of range for " << n << " mass eigenstates";
        throw ValidationError(msg.str());
    }
    if (i == j) {
        std::ostringstream msg;
        msg << fn << ": interference wavenumber needs two distinct states; got ("
            << i << ", " << j << ")";
        throw ValidationError(msg.str());
    }
}

// Least-squares solve of the four-column model at a fixed trial wavenumber.
// The SVD threshold makes the solve least-norm when the two decay columns
// coincide (equal rates), splitting their weight evenly.
struct ProfilePoint {
    double rss{0.0};
    Eigen::Vector4d beta{Eigen::Vector4d::Zero()};
};

ProfilePoint solve_at(const Eigen::VectorXd& l, const Eigen::VectorXd& y,
                      double g1, double g2, double k) {
    const Eigen::Index n = l.size();
    Eigen::MatrixXd x(n, 4);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double lv = l[r];
        const double mixed = std::exp(-(g1 + g2) * lv);
        x(r, 0) = std::exp(-2.0 * g1 * lv);
        x(r, 1) = std::exp(-2.0 * g2 * lv);
        x(r, 2) = std::cos(k * lv) * mixed;
        x(r, 3) = std::sin(k * lv) * mixed;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
    svd.setThreshold(kSvdThreshold);
    ProfilePoint point;
    point.beta = svd.solve(y);
    point.rss = (x * point.beta - y).squaredNorm();
    return point;
}

}  // namespace

// ------------------------------ wavenumbers ---------------------------------

double standard_wavenumber(const osc::OscillationScenario& scenario,
                           std::size_t i, std::size_t j) {
    check_pair(scenario, i, j, "standard_wavenumber");
    const auto& si = scenario.states[i];
    const auto& sj = scenario.states[j];
    const double p_bar = 0.5 * (si.momentum + sj.momentum);
    return (si.mass * si.mass - sj.mass * sj.mass) / (2.0 * p_bar);
}

double analytic_wavenumber(const osc::OscillationScenario& scenario,
                           const osc::DetectionModel& detection, std::size_t i,
                           std::size_t j) {
    check_pair(scenario, i, j, "analytic_wavenumber");
    const auto& si = scenario.states[i];
    const auto& sj = scenario.states[j];
    const double eps = detection.threshold;
    return (si.energy() - eps) / si.velocity() -
           (sj.energy() - eps) / sj.velocity() - (si.momentum - sj.momentum);
}

double threshold_corrected_wavenumber(const osc::OscillationScenario& scenario,
                                      const osc::DetectionModel& detection,
                                      std::size_t i, std::size_t j) {
    check_pair(scenario, i, j, "threshold_corrected_wavenumber");
    const auto& si = scenario.states[i];
    const auto& sj = scenario.states[j];
    const double e_bar = 0.5 * (si.energy() + sj.energy());
    return (1.0 - detection.threshold / (2.0 * e_bar)) *
           (si.mass * si.mass - sj.mass * sj.mass) / e_bar;
}

// ----------------------------------- fit ------------------------------------

FitModel default_fit_model(const osc::OscillationScenario& scenario,
                           const osc::DetectionModel& detection) {
    return FitModel{std::abs(analytic_wavenumber(scenario, detection, 0, 1))};
}

OscillationFit fit_oscillation(const engine::DetectionCurve& curve,
                               const osc::OscillationScenario& scenario,
                               const FitModel& model) {
    if (scenario.states.size() != 2) {
        std::ostringstream msg;
        msg << "fit_oscillation: the two-state interference model needs "
               "exactly 2 mass eigenstates; scenario has "
            << scenario.states.size();
        throw ValidationError(msg.str());
    }
    const std::size_t n = curve.l_values.size();
    if (curve.values.size() != n) {
        throw ValidationError(
            "fit_oscillation: curve grid and value lengths disagree");
    }

    double y_max = 0.0;
    for (double v : curve.values) {
        y_max = std::max(y_max, std::abs(v));
    }
    if (curve.meta.zero_curve || !(y_max > 0.0)) {
        throw FitError(
            "fit_oscillation: curve is identically zero; nothing to fit");
    }

    const double k0 = std::abs(model.initial_wavenumber);
    if (k0 == 0.0) {
        throw FitError(
            "fit_oscillation: initial wavenumber is zero (degenerate masses "
            "produce no interference oscillation)");
    }

    const double span = curve.l_values.back() - curve.l_values.front();
    if (!(span > 0.0)) {
        throw ValidationError(
            "fit_oscillation: curve grid must be increasing");
    }
    const double period = 2.0 * std::numbers::pi / k0;
    if (span < kMinPeriods * period) {
        std::ostringstream msg;
        msg << "fit_oscillation: grid spans " << span / period
            << " oscillation periods; need at least " << kMinPeriods
            << " (period " << period << ", span " << span << ")";
        throw FitError(msg.str());
    }
    const double samples_per_period =
        static_cast<double>(n - 1) / (span / period);
    if (samples_per_period < kMinSamplesPerPeriod) {
        std::ostringstream msg;
        msg << "fit_oscillation: " << samples_per_period
            << " samples per oscillation period; need at least "
            << kMinSamplesPerPeriod;
        throw FitError(msg.str());
    }

    const Eigen::Map<const Eigen::VectorXd> l(curve.l_values.data(),
                                              static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> y(curve.values.data(),
                                              static_cast<Eigen::Index>(n));
    const double g1 =
        scenario.states[0].decay_rate / scenario.states[0].velocity();
    const double g2 =
        scenario.states[1].decay_rate / scenario.states[1].velocity();

    // Coarse profile over a log-spaced bracket around the initial guess.  The
    // x3 half-width keeps the true wavenumber inside the bracket even when
    // the initialization is off by tens of percent.
    std::vector<double> trials(kProfilePoints + 1);
    for (int i = 0; i < kProfilePoints; ++i) {
        trials[static_cast<std::size_t>(i)] =
            (k0 / kProfileSpan) *
            std::pow(kProfileSpan * kProfileSpan,
                     static_cast<double>(i) / (kProfilePoints - 1));
    }
    trials[kProfilePoints] = k0;
    std::sort(trials.begin(), trials.end());

    std::size_t best = 0;
    double best_rss = std::numeric_limits<double>::infinity();
    Eigen::Vector4d best_beta = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const ProfilePoint point = solve_at(l, y, g1, g2, trials[i]);
        if (point.rss < best_rss) {
            best_rss = point.rss;
            best_beta = point.beta;
            best = i;
        }
    }

    const double dof = static_cast<double>(n) - 4.0;
    const double noise = std::sqrt(best_rss / dof);
    if (std::hypot(best_beta[2], best_beta[3]) < kFlatSignificance * noise) {
        std::ostringstream msg;
        msg << "fit_oscillation: no statistically significant oscillation "
               "(interference amplitude "
            << std::hypot(best_beta[2], best_beta[3]) << " vs noise scale "
            << noise << ")";
        throw FitError(msg.str());
    }

    // Ternary refinement between the neighbors of the best coarse trial.
    double lo = trials[best > 0 ? best - 1 : 0];
    double hi = trials[std::min(best + 1, trials.size() - 1)];
    for (int it = 0; it < kTernaryIterations; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (solve_at(l, y, g1, g2, m1).rss < solve_at(l, y, g1, g2, m2).rss) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    const double k_fit = 0.5 * (lo + hi);
    const ProfilePoint final_point = solve_at(l, y, g1, g2, k_fit);

    // 1-sigma wavenumber uncertainty from the profile curvature:
    // sigma_k^2 = 2 s^2 / RSS''(k), s^2 the residual variance.
    const double h = std::max(1e-4 * k_fit, 1e-12);
    const double rss_minus = solve_at(l, y, g1, g2, k_fit - h).rss;
    const double rss_plus = solve_at(l, y, g1, g2, k_fit + h).rss;
    const double curvature =
        (rss_plus - 2.0 * final_point.rss + rss_minus) / (h * h);
    double sigma_k = 0.0;
    if (curvature > 0.0) {
        sigma_k = std::sqrt(2.0 * (final_point.rss / dof) / curvature);
    }

    OscillationFit fit;
    fit.amplitudes[0] = final_point.beta[0];
    fit.amplitudes[1] = final_point.beta[1];
    fit.interference =
        0.5 * std::complex<double>(final_point.beta[2], -final_point.beta[3]);
    fit.wavenumber = k_fit;
    fit.wavenumber_uncertainty = sigma_k;
    fit.decay_slopes[0] = g1;
    fit.decay_slopes[1] = g2;
    fit.residual_rms = std::sqrt(final_point.rss / static_cast<double>(n));
    fit.grid_points = n;
    return fit;
}

// ----------------------------- threshold scans ------------------------------

ThresholdScanResult threshold_scan(const osc::OscillationScenario& scenario,
                                   const osc::DetectionModel& detection,
                                   const std::vector<double>& thresholds,
                                   const ScanPipeline& pipeline) {
    if (thresholds.empty()) {
        throw ValidationError("threshold_scan: threshold list is empty");
    }

    ThresholdScanResult result;
    result.points.reserve(thresholds.size());
    for (double eps : thresholds) {
        osc::DetectionModel point_model = detection;
        point_model.threshold = eps;

        ThresholdScanPoint point;
        point.threshold = eps;
        point.analytic = std::abs(analytic_wavenumber(scenario, point_model,
                                                      0, 1));
        try {
            engine::DensityRequest request;
            request.scenario = scenario;
            request.detection = point_model;
            request.flavor = pipeline.flavor;
            request.l_grid = pipeline.l_grid;
            request.window = pipeline.window;
            request.control = pipeline.control;
            const engine::DetectionCurve curve =
                engine::detection_density(request);
            const OscillationFit fit = fit_oscillation(
                curve, scenario, default_fit_model(scenario, point_model));
            point.fitted_wavenumber = fit.wavenumber;
            point.fitted_uncertainty = fit.wavenumber_uncertainty;
        } catch (const AccuracyError& err) {
            point.failed = true;
            point.error = err.what();
        } catch (const FitError& err) {
            point.failed = true;
            point.error = err.what();
        }
        result.partial = result.partial || point.failed;
        result.points.push_back(std::move(point));
    }

    // Unweighted least-squares slope of the fitted wavenumber over the
    // successful points.
    double sum_e = 0.0;
    double sum_k = 0.0;
    std::size_t good = 0;
    for (const auto& point : result.points) {
        if (!point.failed) {
            sum_e += point.threshold;
            sum_k += point.fitted_wavenumber;
            ++good;
        }
    }
    if (good >= 2) {
        const double mean_e = sum_e / static_cast<double>(good);
        const double mean_k = sum_k / static_cast<double>(good);
        double var = 0.0;
        double cov = 0.0;
        for (const auto& point : result.points) {
            if (!point.failed) {
                var += (point.threshold - mean_e) * (point.threshold - mean_e);
                cov += (point.threshold - mean_e) *
                       (point.fitted_wavenumber - mean_k);
            }
        }
        if (var > 0.0) {
            result.slope = cov / var;
        }
    }

    // d |k| / d eps of the analytic wavenumber for the pair (0, 1): the signed
    // slope is 1/v2 - 1/v1, and the modulus flips it when k < 0 over the scan.
    double mean_threshold = 0.0;
    for (double eps : thresholds) {
        mean_threshold += eps;
    }
    mean_threshold /= static_cast<double>(thresholds.size());
    osc::DetectionModel mid_model = detection;
    mid_model.threshold = mean_threshold;
    const double k_mid = analytic_wavenumber(scenario, mid_model, 0, 1);
    const double signed_slope = 1.0 / scenario.states[1].velocity() -
                                1.0 / scenario.states[0].velocity();
    result.analytic_slope = k_mid < 0.0 ? -signed_slope : signed_slope;
    return result;
}

}  // namespace oscidet::analysis
