// test_analysis.cpp — wavenumber predictions, oscillation fit, threshold scan
//
// Frozen wavenumbers below are for the ultrarelativistic two-flavor reference
// (m = {0.1, 0.2}, common momentum 10) from an independent high-precision
// evaluation of the closed forms.

#include <doctest.h>

#include <Eigen/Dense>

#include <oscidet/analysis.hpp>
#include <oscidet/engine.hpp>
#include <oscidet/errors.hpp>
#include <oscidet/oscillation.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace osc = oscidet::osc;
namespace eng = oscidet::engine;
namespace ana = oscidet::analysis;
using oscidet::FitError;
using oscidet::ValidationError;
using cplx = std::complex<double>;

namespace {

osc::OscillationScenario reference_scenario(double gamma1 = 0.0,
                                            double gamma2 = 0.0) {
    osc::OscillationScenario sc;
    sc.states = {{0.1, 10.0, gamma1}, {0.2, 10.0, gamma2}};
    sc.mixing = osc::MixingMatrix::rotation_2f(std::numbers::pi / 4.0);
    sc.sigma = 20.0;
    sc.initial_flavor = 0;
    return sc;
}

osc::DetectionModel detection_at(double threshold) {
    osc::DetectionModel model;
    model.threshold = threshold;
    model.product_masses = {1.0};
    model.localization = 1.0;
    return model;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        out.push_back(a + (b - a) * k / (n - 1));
    }
    return out;
}

// Synthetic curve with the fit's own decay structure and known parameters.
eng::DetectionCurve synthetic_curve(const osc::OscillationScenario& sc,
                                    double k, double b1, double b2, double b3,
                                    double b4, const std::vector<double>& grid) {
    const double g1 = sc.states[0].decay_rate / sc.states[0].velocity();
    const double g2 = sc.states[1].decay_rate / sc.states[1].velocity();
    eng::DetectionCurve curve;
    curve.l_values = grid;
    for (double l : grid) {
        const double value =
            b1 * std::exp(-2.0 * g1 * l) + b2 * std::exp(-2.0 * g2 * l) +
            (b3 * std::cos(k * l) + b4 * std::sin(k * l)) *
                std::exp(-(g1 + g2) * l);
        curve.values.push_back(value);
    }
    return curve;
}

}  // namespace

// ------------------------------ wavenumbers ---------------------------------

TEST_CASE("closed-form wavenumbers match frozen references") {
    osc::OscillationScenario heavy;
    heavy.states = {{1.0, 50.0, 0.0}, {2.0, 50.0, 0.0}};
    heavy.mixing = osc::MixingMatrix::rotation_2f(0.5);
    heavy.sigma = 10.0;
    heavy.initial_flavor = 0;
    CHECK(ana::standard_wavenumber(heavy, 0, 1) ==
          doctest::Approx(-0.03).epsilon(1e-15).scale(0.0));

    const osc::OscillationScenario sc = reference_scenario();
    const double frozen[] = {0.0029999999999983373, 0.0028500187460629434,
                             0.0027000374921275494, 0.0025500562381903791,
                             0.0024000749842532088, 0.0022500937303169266};
    for (int eps = 0; eps <= 5; ++eps) {
        CAPTURE(eps);
        const double got =
            ana::analytic_wavenumber(sc, detection_at(eps), 1, 0);
        CHECK(got == doctest::Approx(frozen[eps]).epsilon(1e-11).scale(0.0));
    }
    CHECK(ana::threshold_corrected_wavenumber(sc, detection_at(0.0), 1, 0) ==
          doctest::Approx(0.002999625078730084).epsilon(1e-11).scale(0.0));
}

TEST_CASE("wavenumbers are antisymmetric and index-checked") {
    const osc::OscillationScenario sc = reference_scenario();
    const osc::DetectionModel det = detection_at(2.0);
    CHECK(ana::standard_wavenumber(sc, 0, 1) == -ana::standard_wavenumber(sc, 1, 0));
    CHECK(ana::analytic_wavenumber(sc, det, 0, 1) ==
          -ana::analytic_wavenumber(sc, det, 1, 0));
    CHECK(ana::threshold_corrected_wavenumber(sc, det, 0, 1) ==
          -ana::threshold_corrected_wavenumber(sc, det, 1, 0));

    CHECK_THROWS_AS(ana::standard_wavenumber(sc, 1, 1), ValidationError);
    CHECK_THROWS_AS(ana::analytic_wavenumber(sc, det, 0, 2), ValidationError);
}

TEST_CASE("detection-time wavenumber doubles the standard one at zero "
          "threshold") {
    const osc::OscillationScenario sc = reference_scenario();
    const double doubled = ana::analytic_wavenumber(sc, detection_at(0.0), 1, 0);
    const double standard = ana::standard_wavenumber(sc, 1, 0);
    CHECK(doubled / standard == doctest::Approx(2.0).epsilon(1e-10));

    // The expanded form tracks the exact one to O(m^2/p^2) relative accuracy.
    for (double eps : {0.0, 2.0, 5.0}) {
        const double exact = ana::analytic_wavenumber(sc, detection_at(eps), 1, 0);
        const double expanded =
            ana::threshold_corrected_wavenumber(sc, detection_at(eps), 1, 0);
        CAPTURE(eps);
        CHECK(std::abs(expanded - exact) <= 5e-4 * std::abs(exact));
    }
}

TEST_CASE("default fit model seeds from the magnitude of the prediction") {
    const osc::OscillationScenario sc = reference_scenario();
    const ana::FitModel model = ana::default_fit_model(sc, detection_at(3.0));
    CHECK(model.initial_wavenumber ==
          doctest::Approx(0.0025500562381903791).epsilon(1e-11).scale(0.0));
    CHECK(model.initial_wavenumber > 0.0);
}

// ----------------------------------- fit ------------------------------------

TEST_CASE("fit recovers parameters of a synthetic curve") {
    const osc::OscillationScenario sc = reference_scenario(2e-4, 3e-4);
    const double k_true = 0.0028;
    const double span = 3.0 * 2.0 * std::numbers::pi / k_true;
    const std::vector<double> grid = linspace(100.0, 100.0 + span, 400);
    const eng::DetectionCurve curve =
        synthetic_curve(sc, k_true, 0.5, 0.3, 0.3, -0.2, grid);

    for (double off : {1.0, 0.7, 1.3}) {  // exact, -30 %, +30 % initial guess
        ana::FitModel model;
        model.initial_wavenumber = k_true * off;
        const ana::OscillationFit fit = ana::fit_oscillation(curve, sc, model);
        CAPTURE(off);
        CHECK(fit.wavenumber == doctest::Approx(k_true).epsilon(1e-7).scale(0.0));
        CHECK(fit.amplitudes[0] == doctest::Approx(0.5).epsilon(1e-6).scale(0.0));
        CHECK(fit.amplitudes[1] == doctest::Approx(0.3).epsilon(1e-6).scale(0.0));
        // T12 = (b3 - i b4) / 2.
        CHECK(std::abs(fit.interference - cplx(0.15, 0.1)) <= 1e-6);
        CHECK(fit.residual_rms < 1e-10);
        CHECK(fit.wavenumber_uncertainty < 1e-6);
        CHECK(fit.grid_points == grid.size());
        CHECK(fit.decay_slopes[0] ==
              doctest::Approx(2e-4 / sc.states[0].velocity()).epsilon(1e-12).scale(0.0));
        CHECK(fit.decay_slopes[1] ==
              doctest::Approx(3e-4 / sc.states[1].velocity()).epsilon(1e-12).scale(0.0));
    }
}

TEST_CASE("fit honours the interference bound of a physical amplitude sum") {
    // Curve built from |c1 f1 + c2 f2|^2: the cross term saturates
    // |T12| = |c1||c2| = sqrt(b1 b2).
    const osc::OscillationScenario sc = reference_scenario(2e-4, 3e-4);
    const cplx c1 = cplx(0.6, 0.2);
    const cplx c2 = cplx(-0.3, 0.5);
    const double k_true = 0.003;
    const cplx cross = c1 * std::conj(c2);

    const double span = 2.5 * 2.0 * std::numbers::pi / k_true;
    const std::vector<double> grid = linspace(50.0, 50.0 + span, 360);
    const eng::DetectionCurve curve = synthetic_curve(
        sc, k_true, std::norm(c1), std::norm(c2), 2.0 * cross.real(),
        -2.0 * cross.imag(), grid);

    ana::FitModel model;
    model.initial_wavenumber = k_true;
    const ana::OscillationFit fit = ana::fit_oscillation(curve, sc, model);

    CHECK(std::abs(fit.interference - cross) <= 1e-6);
    const double bound =
        std::sqrt(fit.amplitudes[0] * fit.amplitudes[1]);
    CHECK(std::abs(fit.interference) <= bound * (1.0 + 1e-6));
    CHECK(std::abs(fit.interference) >= bound * (1.0 - 1e-4));  // saturated
}

TEST_CASE("exactly degenerate envelope columns split the weight evenly") {
    // Identical states (same mass, momentum, and decay rate) make the two
    // envelope columns bitwise equal; the rank-revealing solve must drop the
    // null direction and return the minimum-norm (even) split, not garbage.
    osc::OscillationScenario sc = reference_scenario(3e-4, 3e-4);
    sc.states[1] = sc.states[0];
    const double k_true = 0.0031;
    const double span = 2.6 * 2.0 * std::numbers::pi / k_true;
    const std::vector<double> grid = linspace(0.0, span, 300);
    // Total non-oscillating weight 0.8 on two identical columns.
    const eng::DetectionCurve curve =
        synthetic_curve(sc, k_true, 0.5, 0.3, 0.25, 0.1, grid);

    ana::FitModel model;
    model.initial_wavenumber = k_true * 1.1;
    const ana::OscillationFit fit = ana::fit_oscillation(curve, sc, model);
    CHECK(fit.wavenumber == doctest::Approx(k_true).epsilon(1e-7).scale(0.0));
    CHECK(fit.amplitudes[0] == doctest::Approx(0.4).epsilon(1e-6).scale(0.0));
    CHECK(fit.amplitudes[1] == doctest::Approx(0.4).epsilon(1e-6).scale(0.0));
}

TEST_CASE("fit failure modes raise FitError with distinct causes") {
    const osc::OscillationScenario sc = reference_scenario(2e-4, 3e-4);
    const double k = 0.0028;
    const double span = 3.0 * 2.0 * std::numbers::pi / k;
    const std::vector<double> grid = linspace(100.0, 100.0 + span, 400);
    ana::FitModel model;
    model.initial_wavenumber = k;

    // Structurally zero curve.
    eng::DetectionCurve zero = synthetic_curve(sc, k, 0.0, 0.0, 0.0, 0.0, grid);
    zero.meta.zero_curve = true;
    CHECK_THROWS_AS(ana::fit_oscillation(zero, sc, model), FitError);

    // Zero initial wavenumber (degenerate prediction).
    const eng::DetectionCurve good = synthetic_curve(sc, k, 0.5, 0.3, 0.3, -0.2, grid);
    ana::FitModel flat_model;
    flat_model.initial_wavenumber = 0.0;
    CHECK_THROWS_AS(ana::fit_oscillation(good, sc, flat_model), FitError);

    // Grid spanning under two periods.
    const std::vector<double> short_grid = linspace(0.0, 0.5 * span / 3.0, 200);
    const eng::DetectionCurve brief =
        synthetic_curve(sc, k, 0.5, 0.3, 0.3, -0.2, short_grid);
    CHECK_THROWS_AS(ana::fit_oscillation(brief, sc, model), FitError);

    // Too few samples per period.
    const std::vector<double> sparse_grid = linspace(100.0, 100.0 + span, 40);
    const eng::DetectionCurve sparse =
        synthetic_curve(sc, k, 0.5, 0.3, 0.3, -0.2, sparse_grid);
    CHECK_THROWS_AS(ana::fit_oscillation(sparse, sc, model), FitError);

    // No interference component above the noise.
    eng::DetectionCurve flat = synthetic_curve(sc, k, 0.5, 0.3, 0.0, 0.0, grid);
    for (std::size_t idx = 0; idx < flat.values.size(); ++idx) {
        flat.values[idx] += 1e-6 * std::sin(0.9 * flat.l_values[idx]);
    }
    CHECK_THROWS_AS(ana::fit_oscillation(flat, sc, model), FitError);

    // Fitting needs exactly two mass eigenstates.
    osc::OscillationScenario three = sc;
    three.states.push_back({0.3, 10.0, 0.0});
    three.mixing.u = Eigen::MatrixXcd::Identity(3, 3);
    CHECK_THROWS_AS(ana::fit_oscillation(good, three, model), ValidationError);
}

// ----------------------------- threshold scans ------------------------------

TEST_CASE("threshold scan recovers the analytic threshold dependence") {
    osc::OscillationScenario sc;
    sc.states = {{0.5, 5.0, 0.0}, {1.0, 5.0, 0.0}};
    sc.mixing = osc::MixingMatrix::rotation_2f(std::numbers::pi / 4.0);
    sc.sigma = 20.0;
    sc.initial_flavor = 0;
    sc.validate();
    // Heavy slow products put the kernel correlation time far above the
    // packet passage time; that is the regime where the fitted wavenumber
    // tracks the detection-summed prediction (light products would relax the
    // curve back to the standard equal-time wavenumber).
    osc::DetectionModel det = detection_at(0.0);
    det.product_masses = {5000.0};

    // Grid spanning ~2.3 periods of the slowest prediction in the scan.
    ana::ScanPipeline pipeline;
    pipeline.l_grid = linspace(160.0, 347.0, 181);
    pipeline.flavor = 1;

    // In this regime each state contributes with weight exp(-(E-eps)^2
    // sigma^2 / v^2), so the thresholds must sit near the state energies
    // (5.025 and 5.099) or the lighter state swamps the interference term.
    const std::vector<double> thresholds = {4.95, 5.0};
    const ana::ThresholdScanResult scan =
        ana::threshold_scan(sc, det, thresholds, pipeline);

    REQUIRE(scan.points.size() == 2);
    CHECK_FALSE(scan.partial);
    for (const ana::ThresholdScanPoint& point : scan.points) {
        CAPTURE(point.threshold);
        CHECK_FALSE(point.failed);
        CHECK(point.error.empty());
        const double expect = std::abs(
            ana::analytic_wavenumber(sc, detection_at(point.threshold), 0, 1));
        CHECK(point.analytic ==
              doctest::Approx(expect).epsilon(1e-12).scale(0.0));
        CHECK(point.fitted_wavenumber ==
              doctest::Approx(expect).epsilon(1e-2).scale(0.0));
    }
    REQUIRE(scan.slope.has_value());
    CHECK(*scan.slope / scan.analytic_slope == doctest::Approx(1.0).epsilon(0.2));
    CHECK(scan.analytic_slope < 0.0);  // |k| shrinks as the threshold rises
}

TEST_CASE("threshold scan records failed points and turns partial") {
    osc::OscillationScenario sc;
    sc.states = {{0.5, 5.0, 0.0}, {1.0, 5.0, 0.0}};
    sc.mixing = osc::MixingMatrix::rotation_2f(std::numbers::pi / 4.0);
    sc.sigma = 20.0;
    sc.initial_flavor = 0;
    const osc::DetectionModel det = detection_at(0.0);

    // Threshold at which the predicted wavenumber crosses zero: the fit
    // cannot resolve a period there and must fail, not crash the scan.
    const double k4 = ana::analytic_wavenumber(sc, detection_at(4.0), 0, 1);
    const double k5 = ana::analytic_wavenumber(sc, detection_at(5.0), 0, 1);
    const double eps_zero = 4.0 - k4 / (k5 - k4);

    ana::ScanPipeline pipeline;
    pipeline.l_grid = linspace(160.0, 347.0, 181);
    pipeline.flavor = 1;

    const ana::ThresholdScanResult scan =
        ana::threshold_scan(sc, det, {4.0, eps_zero}, pipeline);
    REQUIRE(scan.points.size() == 2);
    CHECK(scan.partial);
    CHECK_FALSE(scan.points[0].failed);
    CHECK(scan.points[1].failed);
    CHECK_FALSE(scan.points[1].error.empty());
    CHECK_FALSE(scan.slope.has_value());  // a single good point fixes no line

    // Invalid pipeline input is fatal rather than a partial result.
    ana::ScanPipeline broken = pipeline;
    broken.flavor = 7;
    CHECK_THROWS_AS(ana::threshold_scan(sc, det, {4.0}, broken), ValidationError);
}
