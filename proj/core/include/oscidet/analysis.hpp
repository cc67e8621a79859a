// analysis.hpp — wavenumber predictions, oscillation fitting, threshold scans
//
// Three closed-form wavenumbers for a state pair (i, j): the standard
// equal-time prediction (m_i^2 - m_j^2)/(2 pbar), the detection-time-summed
// prediction (E_i - eps)/v_i - (E_j - eps)/v_j - (p_i - p_j) (which doubles
// the standard one at threshold eps = 0 in the ultrarelativistic regime), and
// its leading threshold expansion (1 - eps/(2 Ebar)) (m_i^2 - m_j^2)/Ebar.
//
// fit_oscillation extracts the empirical wavenumber from a two-state detection
// curve with a separable least-squares fit: for each trial k the model
//   y(L) = b1 e^{-2 g1 L} + b2 e^{-2 g2 L}
//        + [b3 cos(kL) + b4 sin(kL)] e^{-(g1+g2) L},   g_i = Gamma_i / v_i,
// is linear in the b's, so the coefficients are profiled out with an SVD solve
// and only k is scanned (log-spaced bracket around the initial guess, then
// ternary refinement).  threshold_scan repeats density + fit across detection
// thresholds and regresses the fitted wavenumber against the threshold.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "oscidet/engine.hpp"
#include "oscidet/oscillation.hpp"

namespace oscidet::analysis {

// ------------------------------ wavenumbers ---------------------------------

// Equal-time interference wavenumber (m_i^2 - m_j^2) / (2 pbar) with pbar the
// mean of the two momenta.  Antisymmetric in (i, j); i == j or an
// out-of-range index is a ValidationError.
double standard_wavenumber(const osc::OscillationScenario& scenario,
                           std::size_t i, std::size_t j);

// Wavenumber of the detection-time-summed interference term:
//   (E_i - eps)/v_i - (E_j - eps)/v_j - (p_i - p_j),  eps = detection threshold.
// Signed and antisymmetric in (i, j).
double analytic_wavenumber(const osc::OscillationScenario& scenario,
                           const osc::DetectionModel& detection, std::size_t i,
                           std::size_t j);

// Leading ultrarelativistic expansion of analytic_wavenumber:
//   (1 - eps / (2 Ebar)) (m_i^2 - m_j^2) / Ebar,  Ebar the mean energy.
double threshold_corrected_wavenumber(const osc::OscillationScenario& scenario,
                                      const osc::DetectionModel& detection,
                                      std::size_t i, std::size_t j);

// ----------------------------------- fit ------------------------------------

struct FitModel {
    double initial_wavenumber{0.0};  // > 0; center of the profile bracket
};

// Initial guess |analytic_wavenumber(scenario, detection, 0, 1)|.
FitModel default_fit_model(const osc::OscillationScenario& scenario,
                           const osc::DetectionModel& detection);

struct OscillationFit {
    double amplitudes[2]{0.0, 0.0};      // b1, b2 (normalized-curve units)
    std::complex<double> interference;   // T12 = (b3 - i b4) / 2
    double wavenumber{0.0};              // fitted k, > 0
    double wavenumber_uncertainty{0.0};  // 1-sigma from profile curvature
    double decay_slopes[2]{0.0, 0.0};    // g_i = Gamma_i / v_i (held fixed)
    double residual_rms{0.0};            // sqrt(RSS / N) of the best fit
    std::size_t grid_points{0};          // N
};

// Fit the model above to a detection curve.  Requires exactly two mass
// eigenstates (ValidationError) and a grid spanning >= 2 periods of the
// initial wavenumber with >= 20 samples per period.  A structurally zero
// curve, a zero initial wavenumber, an insufficient grid, or an interference
// coefficient indistinguishable from noise raise FitError.
OscillationFit fit_oscillation(const engine::DetectionCurve& curve,
                               const osc::OscillationScenario& scenario,
                               const FitModel& model);

// ----------------------------- threshold scans ------------------------------

struct ThresholdScanPoint {
    double threshold{0.0};
    double fitted_wavenumber{0.0};
    double fitted_uncertainty{0.0};
    double analytic{0.0};            // |analytic_wavenumber| at this threshold
    bool failed{false};              // density or fit raised; values above 0
    std::string error;               // diagnostic when failed
};

struct ThresholdScanResult {
    std::vector<ThresholdScanPoint> points;
    std::optional<double> slope;     // d k_fit / d eps, needs >= 2 good points
    double analytic_slope{0.0};      // d |analytic_wavenumber| / d eps
    bool partial{false};             // true iff any point failed
};

// Pipeline configuration shared across scan points.
struct ScanPipeline {
    std::vector<double> l_grid;
    engine::WindowPolicy window{};
    engine::EngineControl control{};
    int flavor{0};
};

// Run density + fit at each threshold; detection.threshold is overridden per
// point.  Failed points are recorded, not fatal; the scan is marked partial.
// The slope is an unweighted least-squares line through the good points.
ThresholdScanResult threshold_scan(const osc::OscillationScenario& scenario,
                                   const osc::DetectionModel& detection,
                                   const std::vector<double>& thresholds,
                                   const ScanPipeline& pipeline);

}  // namespace oscidet::analysis
