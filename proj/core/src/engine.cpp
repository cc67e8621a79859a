// engine.cpp — spectral-representation density curves, the 2D quadrature
// oracle, the closed-form pair overlap, and the standard-treatment baselines.

#include "oscidet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "oscidet/complex_erf.hpp"
#include "oscidet/errors.hpp"
#include "oscidet/quadrature.hpp"

namespace oscidet::engine {

namespace {

using cd = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Automatic-window stability: doubling T must change no density by more.
constexpr double kWindowStabilityTol = 1e-3;
constexpr int kMaxWindowDoublings = 8;

// nu-grid layout.
constexpr int kEdgeHalvings = 40;   // geometric edge panels down to ~1e-12
constexpr int kWindowPanels = 24;   // panels per merged resonance window
constexpr int kBridgePanels = 16;   // panels per bridge / tail segment
constexpr int kInitialNodesPerPanel = 8;

// 2D oracle t-grid.
constexpr int kOracleNodesPerPanel = 16;
constexpr double kOraclePointsPerPeriod = 20.0;
constexpr double kOracleRelTol = 1e-6;

// ---- small helpers ----

template <typename Fn>
void parallel_for(int threads, std::size_t count, Fn&& fn) {
    const std::size_t usable =
        count == 0 ? 0
                   : std::min<std::size_t>(
                         static_cast<std::size_t>(std::max(threads, 1)), count);
    if (usable <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(usable);
    for (std::size_t t = 0; t < usable; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += usable) {
                    fn(i);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto& worker : pool) {
        worker.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

void validate_common(const osc::OscillationScenario& scenario, int alpha,
                     const std::vector<double>& l_grid) {
    scenario.validate();
    std::vector<std::string> errors;
    if (alpha < 0 || alpha >= static_cast<int>(scenario.states.size())) {
        errors.push_back("flavor index out of range");
    }
    if (l_grid.empty()) {
        errors.push_back("l_grid must be nonempty");
    }
    for (std::size_t i = 0; i < l_grid.size(); ++i) {
        if (l_grid[i] < 0.0) {
            errors.push_back("l_grid values must be >= 0");
            break;
        }
    }
    for (std::size_t i = 1; i < l_grid.size(); ++i) {
        if (!(l_grid[i] > l_grid[i - 1])) {
            errors.push_back("l_grid must be strictly increasing");
            break;
        }
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "detection curve request validation failed:";
        for (const auto& e : errors) {
            msg << "\n  - " << e;
        }
        throw ValidationError(msg.str());
    }
}

// Per-state constants shared by every (L, nu) evaluation.
struct StateTerm {
    double energy{0.0};
    double velocity{0.0};
    double momentum{0.0};
    double decay_rate{0.0};
    double gauss_a{0.0};    // v^2 / (2 sigma^2)
    double log_coeff{0.0};  // ln|c_i| + ln (pi sigma^2)^{-1/4}; -inf if c_i = 0
    double arg_coeff{0.0};  // arg(c_i)
};

std::vector<StateTerm> state_terms(const osc::OscillationScenario& scenario,
                                   int alpha) {
    const double log_norm =
        -0.25 * std::log(std::numbers::pi * scenario.sigma * scenario.sigma);
    std::vector<StateTerm> out;
    out.reserve(scenario.states.size());
    for (std::size_t i = 0; i < scenario.states.size(); ++i) {
        const auto& st = scenario.states[i];
        const cd coeff = scenario.pair_coefficient(alpha, i);
        StateTerm term;
        term.energy = st.energy();
        term.velocity = st.velocity();
        term.momentum = st.momentum;
        term.decay_rate = st.decay_rate;
        term.gauss_a = term.velocity * term.velocity /
                       (2.0 * scenario.sigma * scenario.sigma);
        const double mag = std::abs(coeff);
        term.log_coeff = mag > 0.0 ? std::log(mag) + log_norm : -kInf;
        term.arg_coeff = mag > 0.0 ? std::arg(coeff) : 0.0;
        out.push_back(term);
    }
    return out;
}

// Build a normalized curve from per-L log densities; all-(-inf) input means a
// structurally zero curve and is reported as such instead of normalized.
DetectionCurve finalize_from_logs(const std::vector<double>& l_grid,
                                  const std::vector<double>& log_density,
                                  Method method, CurveMetadata meta) {
    DetectionCurve curve;
    curve.l_values = l_grid;
    curve.method = method;
    curve.values.assign(l_grid.size(), 0.0);
    double log_max = -kInf;
    for (double v : log_density) {
        log_max = std::max(log_max, v);
    }
    if (log_max == -kInf) {
        meta.zero_curve = true;
        meta.log_scale = 0.0;
    } else {
        meta.zero_curve = false;
        meta.log_scale = log_max;
        for (std::size_t i = 0; i < log_density.size(); ++i) {
            curve.values[i] = std::exp(log_density[i] - log_max);
        }
    }
    curve.meta = meta;
    return curve;
}

// ---- nu grid of the spectral representation ----

struct NuSegment {
    double lo{0.0};
    double hi{0.0};
    int panels{1};
};

struct NuNode {
    double nu{0.0};
    double weight{0.0};
    double log_rho{0.0};
};

// Graded grid: geometric panels into the nu -> 0 edge (the coherent-regime
// mass sits there, shaped like nu^{a-1} e^{-r nu}), fine panels across each
// resonance nu = E_i - eps_th (width ~ v_i/sigma plus window-sinc and decay
// broadening), bridge/tail panels elsewhere.
std::vector<NuSegment> build_nu_segments(
    const osc::OscillationScenario& scenario,
    const osc::DetectionModel& detection, double t_final) {
    const auto rates = detection.spectral_rates();
    const double s_min = *std::min_element(rates.begin(), rates.end());
    const double eps = detection.threshold;

    double e_mean = 0.0;
    double drive = 0.0;  // growth rate of |alpha|^2 toward the resonances
    for (const auto& st : scenario.states) {
        const double e = st.energy();
        const double v = st.velocity();
        e_mean += e;
        drive += scenario.sigma * scenario.sigma * (e - eps) / (v * v);
    }
    e_mean /= static_cast<double>(scenario.states.size());
    const double nu0 = std::max(e_mean - eps, 1e-6);
    const double r_abs = std::max(std::abs(s_min - drive), 1.0);
    const double edge_hi = std::min(3000.0 / r_abs, nu0);

    std::vector<NuSegment> segments;
    double cursor = 0.0;
    for (int j = kEdgeHalvings; j >= 0; --j) {
        const double hi = edge_hi * std::ldexp(1.0, -j);
        segments.push_back(NuSegment{cursor, hi, 1});
        cursor = hi;
    }

    struct Window {
        double lo;
        double hi;
    };
    std::vector<Window> windows;
    for (const auto& st : scenario.states) {
        const double center = st.energy() - eps;
        const double half_width = 12.0 * st.velocity() / scenario.sigma +
                                  40.0 / t_final + 8.0 * st.decay_rate;
        if (center + half_width <= edge_hi) {
            continue;  // inside the edge block
        }
        windows.push_back(Window{std::max(center - half_width, edge_hi),
                                 center + half_width});
    }
    std::sort(windows.begin(), windows.end(),
              [](const Window& a, const Window& b) { return a.lo < b.lo; });
    std::vector<Window> merged;
    for (const auto& w : windows) {
        if (!merged.empty() && w.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, w.hi);
        } else {
            merged.push_back(w);
        }
    }

    for (const auto& w : merged) {
        if (w.lo > cursor) {
            segments.push_back(NuSegment{cursor, w.lo, kBridgePanels});
        }
        segments.push_back(NuSegment{w.lo, w.hi, kWindowPanels});
        cursor = w.hi;
    }
    const double tail =
        std::max(20.0 / s_min, std::max(cursor - edge_hi, edge_hi));
    segments.push_back(NuSegment{cursor, cursor + tail, kBridgePanels});
    return segments;
}

long total_panels(const std::vector<NuSegment>& segments) {
    long panels = 0;
    for (const auto& seg : segments) {
        panels += seg.panels;
    }
    return panels;
}

std::vector<NuNode> build_nu_nodes(const std::vector<NuSegment>& segments,
                                   int per_panel,
                                   const osc::DetectionModel& detection) {
    std::vector<NuNode> nodes;
    nodes.reserve(static_cast<std::size_t>(total_panels(segments)) *
                  static_cast<std::size_t>(per_panel));
    for (const auto& seg : segments) {
        for_each_gl_node(seg.lo, seg.hi, per_panel, seg.panels,
                         [&](double nu, double w) {
                             nodes.push_back(NuNode{
                                 nu, w, osc::log_spectral_density(detection, nu)});
                         });
    }
    return nodes;
}

// ln p(L) = ln int rho(nu) |alpha_L(nu)|^2 d nu on the given node set.
double log_density_at(const std::vector<StateTerm>& states, double threshold,
                      double l, double t_final,
                      const std::vector<NuNode>& nodes,
                      std::vector<ScaledComplex>& scratch) {
    LogSum acc;
    for (const NuNode& node : nodes) {
        if (node.log_rho == -kInf) {
            continue;
        }
        std::size_t count = 0;
        for (const StateTerm& st : states) {
            if (st.log_coeff == -kInf) {
                continue;
            }
            const cd z(st.decay_rate, st.energy - threshold - node.nu);
            const ScaledComplex w = gaussian_window_integral_log(
                st.gauss_a, l / st.velocity, z, 0.0, t_final);
            scratch[count++] = ScaledComplex{
                w.log_scale + st.log_coeff,
                w.mantissa * std::polar(1.0, st.arg_coeff + st.momentum * l)};
        }
        const ScaledComplex alpha = scaled_sum(scratch.data(), count);
        const double mag = std::abs(alpha.mantissa);
        if (mag == 0.0) {
            continue;
        }
        acc.add(node.log_rho + 2.0 * (alpha.log_scale + std::log(mag)),
                node.weight);
    }
    return acc.log_value();
}

struct CurvePass {
    std::vector<double> log_density;
    long nodes{0};
    int refinements{0};
};

double max_log_change(const std::vector<double>& prev,
                      const std::vector<double>& next) {
    double worst = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        if (prev[i] == -kInf && next[i] == -kInf) {
            continue;
        }
        if (prev[i] == -kInf || next[i] == -kInf) {
            return kInf;
        }
        worst = std::max(worst, std::abs(std::expm1(prev[i] - next[i])));
    }
    return worst;
}

CurvePass evaluate_spectral(const DensityRequest& request, double t_final) {
    const auto segments =
        build_nu_segments(request.scenario, request.detection, t_final);
    const long panels = total_panels(segments);
    const auto states = state_terms(request.scenario, request.flavor);

    const auto eval_level = [&](const std::vector<NuNode>& nodes) {
        std::vector<double> out(request.l_grid.size());
        parallel_for(request.control.threads, out.size(), [&](std::size_t i) {
            std::vector<ScaledComplex> scratch(states.size());
            out[i] =
                log_density_at(states, request.detection.threshold,
                               request.l_grid[i], t_final, nodes, scratch);
        });
        return out;
    };

    int per_panel = kInitialNodesPerPanel;
    std::vector<double> prev =
        eval_level(build_nu_nodes(segments, per_panel, request.detection));
    int refinements = 0;
    while (true) {
        per_panel *= 2;
        const std::vector<double> next =
            eval_level(build_nu_nodes(segments, per_panel, request.detection));
        ++refinements;
        const double change = max_log_change(prev, next);
        if (change < request.control.curve_rel_tol) {
            return CurvePass{next, panels * per_panel, refinements};
        }
        if (panels * 2L * per_panel > request.control.max_nu_nodes) {
            std::size_t worst = 0;
            double worst_change = -1.0;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                const double c = std::abs(std::expm1(prev[i] - next[i]));
                if (c > worst_change) {
                    worst_change = c;
                    worst = i;
                }
            }
            std::ostringstream msg;
            msg << "detection_density: nu quadrature did not reach rel tol "
                << request.control.curve_rel_tol << " within "
                << request.control.max_nu_nodes
                << " nodes (last change " << change << " at L = "
                << request.l_grid[worst]
                << "; values below are the last two log densities there)";
            throw AccuracyError(msg.str(), prev[worst], next[worst]);
        }
        prev = next;
    }
}

struct NormalizedPass {
    std::vector<double> values;
    bool zero{false};
};

NormalizedPass normalize_pass(const std::vector<double>& log_density) {
    NormalizedPass out;
    out.values.assign(log_density.size(), 0.0);
    double log_max = -kInf;
    for (double v : log_density) {
        log_max = std::max(log_max, v);
    }
    if (log_max == -kInf) {
        out.zero = true;
        return out;
    }
    for (std::size_t i = 0; i < log_density.size(); ++i) {
        out.values[i] = std::exp(log_density[i] - log_max);
    }
    return out;
}

double normalized_max_diff(const NormalizedPass& a, const NormalizedPass& b) {
    if (a.zero && b.zero) {
        return 0.0;
    }
    if (a.zero != b.zero) {
        return kInf;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]) /
                                    std::max(b.values[i], 1e-6));
    }
    return worst;
}

}  // namespace

// ------------------------------- curve types --------------------------------

std::string_view method_name(Method method) {
    switch (method) {
        case Method::amplitude_sum:
            return "amplitude_sum";
        case Method::equal_time:
            return "equal_time";
        case Method::component_arrival:
            return "component_arrival";
        case Method::time_averaged:
            return "time_averaged";
    }
    return "unknown";
}

// ------------------------------- requests -----------------------------------

void DensityRequest::validate() const {
    scenario.validate();
    detection.validate();
    validate_common(scenario, flavor, l_grid);

    std::vector<std::string> errors;
    if (window.kind == WindowPolicy::Kind::fixed) {
        double v_min = kInf;
        for (const auto& st : scenario.states) {
            v_min = std::min(v_min, st.velocity());
        }
        const double needed = l_grid.back() / v_min;
        if (!(window.t_value > needed)) {
            std::ostringstream msg;
            msg << "fixed window T = " << window.t_value
                << " must exceed max(L)/min(v) = " << needed;
            errors.push_back(msg.str());
        }
    }
    if (!(control.curve_rel_tol > 0.0)) {
        errors.push_back("control.curve_rel_tol must be > 0");
    }
    if (control.max_nu_nodes < 1024) {
        errors.push_back("control.max_nu_nodes must be >= 1024");
    }
    if (control.threads < 1) {
        errors.push_back("control.threads must be >= 1");
    }
    if (!(control.oracle_node_budget > 0.0)) {
        errors.push_back("control.oracle_node_budget must be > 0");
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "DensityRequest validation failed:";
        for (const auto& e : errors) {
            msg << "\n  - " << e;
        }
        throw ValidationError(msg.str());
    }
}

bool DensityRequest::localization_warning() const {
    return detection.localization > scenario.sigma / 10.0;
}

double auto_window(const osc::OscillationScenario& scenario,
                   const std::vector<double>& l_grid) {
    scenario.validate();
    if (l_grid.empty()) {
        throw ValidationError("auto_window: l_grid must be nonempty");
    }
    double v_min = kInf;
    for (const auto& st : scenario.states) {
        v_min = std::min(v_min, st.velocity());
    }
    return (*std::max_element(l_grid.begin(), l_grid.end()) +
            8.0 * scenario.sigma) /
           v_min;
}

// ------------------------------- operations ---------------------------------

DetectionCurve detection_density(const DensityRequest& request) {
    request.validate();

    CurveMetadata meta;
    if (request.window.kind == WindowPolicy::Kind::fixed) {
        const double t_final = request.window.t_value;
        const CurvePass pass = evaluate_spectral(request, t_final);
        meta.t_window = t_final;
        meta.window_doublings = 0;
        meta.nodes = pass.nodes;
        meta.refinements = pass.refinements;
        return finalize_from_logs(request.l_grid, pass.log_density,
                                  Method::amplitude_sum, meta);
    }

    double t_final = auto_window(request.scenario, request.l_grid);
    CurvePass prev = evaluate_spectral(request, t_final);
    double last_change = kInf;
    for (int doubling = 1; doubling <= kMaxWindowDoublings; ++doubling) {
        const CurvePass next = evaluate_spectral(request, 2.0 * t_final);
        last_change = normalized_max_diff(normalize_pass(prev.log_density),
                                          normalize_pass(next.log_density));
        if (last_change < kWindowStabilityTol) {
            meta.t_window = 2.0 * t_final;
            meta.window_doublings = doubling;
            meta.nodes = next.nodes;
            meta.refinements = next.refinements;
            return finalize_from_logs(request.l_grid, next.log_density,
                                      Method::amplitude_sum, meta);
        }
        t_final *= 2.0;
        prev = next;
    }
    std::ostringstream msg;
    msg << "detection_density: automatic window did not stabilize after "
        << kMaxWindowDoublings << " doublings (T reached " << t_final
        << "; values below are the last change and the tolerance)";
    throw AccuracyError(msg.str(), last_change, kWindowStabilityTol);
}

DetectionCurve detection_density_2d_oracle(const DensityRequest& request) {
    request.validate();
    if (request.window.kind != WindowPolicy::Kind::fixed) {
        throw ValidationError(
            "detection_density_2d_oracle: requires an explicit window "
            "(use WindowPolicy::fixed)");
    }
    const double t_final = request.window.t_value;
    double e_max = 0.0;
    for (const auto& st : request.scenario.states) {
        e_max = std::max(e_max, st.energy());
    }
    const double nodes_needed = t_final * e_max / (2.0 * std::numbers::pi) *
                                kOraclePointsPerPeriod;
    long panels = std::max(
        4L, static_cast<long>(std::ceil(nodes_needed / kOracleNodesPerPanel)));
    {
        const double n_t =
            static_cast<double>(panels) * kOracleNodesPerPanel;
        if (n_t * n_t > request.control.oracle_node_budget) {
            const double t_max = std::sqrt(request.control.oracle_node_budget) *
                                 2.0 * std::numbers::pi /
                                 (kOraclePointsPerPeriod * e_max);
            std::ostringstream msg;
            msg << "detection_density_2d_oracle: window T = " << t_final
                << " needs " << n_t << "^2 kernel evaluations, over the budget "
                << request.control.oracle_node_budget
                << "; largest affordable window is about T = " << t_max;
            throw ValidationError(msg.str());
        }
    }

    const auto rates = request.detection.spectral_rates();
    // Normalized kernel F(s)/F(0); its inverse transform is the spectral
    // density used by detection_density, so the two methods share
    // normalization exactly.
    const auto kernel = [&rates](double s) {
        cd f(1.0, 0.0);
        for (double rate : rates) {
            f *= std::pow(cd(1.0, s / rate), -1.5);
        }
        return f;
    };

    const double norm = std::pow(
        std::numbers::pi * request.scenario.sigma * request.scenario.sigma,
        -0.25);
    std::vector<cd> coeffs;
    for (std::size_t i = 0; i < request.scenario.states.size(); ++i) {
        coeffs.push_back(request.scenario.pair_coefficient(request.flavor, i) *
                         norm);
    }
    const double eps = request.detection.threshold;
    const double sigma_sq = request.scenario.sigma * request.scenario.sigma;

    const auto eval_level = [&](long level_panels) {
        std::vector<double> ts;
        std::vector<double> ws;
        for_each_gl_node(0.0, t_final, kOracleNodesPerPanel,
                         static_cast<int>(level_panels),
                         [&](double t, double w) {
                             ts.push_back(t);
                             ws.push_back(w);
                         });
        const std::size_t n = ts.size();
        std::vector<double> out(request.l_grid.size());
        parallel_for(request.control.threads, out.size(), [&](std::size_t iL) {
            const double l = request.l_grid[iL];
            std::vector<cd> amp(n);
            for (std::size_t k = 0; k < n; ++k) {
                cd a(0.0, 0.0);
                for (std::size_t i = 0; i < coeffs.size(); ++i) {
                    const auto& st = request.scenario.states[i];
                    const double v = st.velocity();
                    const double dx = l - v * ts[k];
                    a += coeffs[i] *
                         std::exp(-dx * dx / (2.0 * sigma_sq) -
                                  st.decay_rate * ts[k]) *
                         std::polar(1.0, st.momentum * l - st.energy() * ts[k]);
                }
                amp[k] = a;
            }
            double diag = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                diag += ws[k] * ws[k] * std::norm(amp[k]);
            }
            cd cross(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t m = k + 1; m < n; ++m) {
                    const double s = ts[m] - ts[k];
                    cross += ws[k] * ws[m] * amp[k] * std::conj(amp[m]) *
                             std::polar(1.0, -eps * s) * kernel(s);
                }
            }
            out[iL] = diag + 2.0 * cross.real();
        });
        return out;
    };

    std::vector<double> prev = eval_level(panels);
    int refinements = 0;
    while (true) {
        const double next_nodes =
            static_cast<double>(2 * panels) * kOracleNodesPerPanel;
        if (next_nodes * next_nodes > request.control.oracle_node_budget) {
            throw AccuracyError(
                "detection_density_2d_oracle: node budget exhausted before "
                "the t-grid converged",
                prev.empty() ? 0.0 : prev.front(),
                prev.empty() ? 0.0 : prev.back());
        }
        panels *= 2;
        const std::vector<double> next = eval_level(panels);
        ++refinements;
        double scale = 0.0;
        for (double v : next) {
            scale = std::max(scale, std::abs(v));
        }
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            change = std::max(change, std::abs(next[i] - prev[i]) /
                                          std::max(std::abs(next[i]),
                                                   1e-12 * std::max(scale, 1e-300)));
        }
        if (change < kOracleRelTol || scale == 0.0) {
            prev = next;
            break;
        }
        prev = next;
    }

    // Clamp round-off negatives (the continuum quadratic form is positive).
    CurveMetadata meta;
    meta.t_window = t_final;
    meta.nodes = panels * kOracleNodesPerPanel;
    meta.refinements = refinements;
    double max_value = 0.0;
    for (double v : prev) {
        max_value = std::max(max_value, v);
    }
    DetectionCurve curve;
    curve.l_values = request.l_grid;
    curve.method = Method::amplitude_sum;
    curve.values.assign(prev.size(), 0.0);
    if (max_value <= 0.0) {
        meta.zero_curve = true;
        curve.meta = meta;
        return curve;
    }
    for (std::size_t i = 0; i < prev.size(); ++i) {
        if (prev[i] < 0.0) {
            meta.clamped = true;
            curve.values[i] = 0.0;
        } else {
            curve.values[i] = prev[i] / max_value;
        }
    }
    meta.log_scale = std::log(max_value);
    curve.meta = meta;
    return curve;
}

std::complex<double> pair_overlap_G(const osc::OscillationScenario& scenario,
                                    std::size_t i, std::size_t j, double l,
                                    double s, double t_final) {
    scenario.validate();
    if (i >= scenario.states.size() || j >= scenario.states.size()) {
        throw ValidationError("pair_overlap_G: state index out of range");
    }
    if (!(t_final > 0.0)) {
        throw ValidationError("pair_overlap_G: window must be positive");
    }
    const double lo = std::max(0.0, -s);
    const double hi = std::min(t_final, t_final - s);
    if (!(lo < hi)) {
        return cd(0.0, 0.0);
    }
    const auto& si = scenario.states[i];
    const auto& sj = scenario.states[j];
    const double sigma_sq = scenario.sigma * scenario.sigma;
    const double vi = si.velocity();
    const double vj = sj.velocity();
    const double lj = l - vj * s;  // partner-envelope center offset

    // Combined exponent -a t^2 + b t + c of A_i(t, L) conj(A_j(t + s, L)).
    const double a = (vi * vi + vj * vj) / (2.0 * sigma_sq);
    const cd b(
        (vi * l + vj * lj) / sigma_sq - (si.decay_rate + sj.decay_rate),
        -(si.energy() - sj.energy()));
    const cd c(-(l * l + lj * lj) / (2.0 * sigma_sq) - sj.decay_rate * s,
               (si.momentum - sj.momentum) * l + sj.energy() * s);

    const double t0 = b.real() / (2.0 * a);
    const cd z = 2.0 * a * t0 - b;  // purely imaginary by construction
    const ScaledComplex w = gaussian_window_integral_log(a, t0, z, lo, hi);
    const double log_norm_sq = -0.5 * std::log(std::numbers::pi * sigma_sq);
    const double log_total = c.real() + a * t0 * t0 + w.log_scale + log_norm_sq;
    return w.mantissa * std::polar(1.0, c.imag()) * std::exp(log_total);
}

// ------------------------------- baselines ----------------------------------

DetectionCurve baseline_equal_time(const osc::OscillationScenario& scenario,
                                   int alpha,
                                   const std::vector<double>& l_grid) {
    validate_common(scenario, alpha, l_grid);
    const auto states = state_terms(scenario, alpha);
    std::vector<double> logs(l_grid.size(), -kInf);
    std::vector<ScaledComplex> terms(states.size());
    for (std::size_t k = 0; k < l_grid.size(); ++k) {
        const double l = l_grid[k];
        std::size_t count = 0;
        for (const auto& st : states) {
            if (st.log_coeff == -kInf) {
                continue;
            }
            const double dx = l - st.velocity * l;
            const double envelope =
                -dx * dx * st.gauss_a / (st.velocity * st.velocity) -
                st.decay_rate * l;
            terms[count++] = ScaledComplex{
                st.log_coeff + envelope,
                std::polar(1.0, st.arg_coeff + st.momentum * l -
                                    st.energy * l)};
        }
        const ScaledComplex amp = scaled_sum(terms.data(), count);
        const double mag = std::abs(amp.mantissa);
        if (mag > 0.0) {
            logs[k] = 2.0 * (amp.log_scale + std::log(mag));
        }
    }
    return finalize_from_logs(l_grid, logs, Method::equal_time,
                              CurveMetadata{});
}

DetectionCurve baseline_component_arrival(
    const osc::OscillationScenario& scenario, int alpha,
    const std::vector<double>& l_grid) {
    validate_common(scenario, alpha, l_grid);
    const auto states = state_terms(scenario, alpha);
    std::vector<double> logs(l_grid.size(), -kInf);
    std::vector<ScaledComplex> terms(states.size());
    for (std::size_t k = 0; k < l_grid.size(); ++k) {
        const double l = l_grid[k];
        std::size_t count = 0;
        for (const auto& st : states) {
            if (st.log_coeff == -kInf) {
                continue;
            }
            const double arrival = l / st.velocity;
            terms[count++] = ScaledComplex{
                st.log_coeff - st.decay_rate * arrival,
                std::polar(1.0, st.arg_coeff + st.momentum * l -
                                    st.energy * arrival)};
        }
        const ScaledComplex amp = scaled_sum(terms.data(), count);
        const double mag = std::abs(amp.mantissa);
        if (mag > 0.0) {
            logs[k] = 2.0 * (amp.log_scale + std::log(mag));
        }
    }
    return finalize_from_logs(l_grid, logs, Method::component_arrival,
                              CurveMetadata{});
}

DetectionCurve baseline_time_averaged(const osc::OscillationScenario& scenario,
                                      int alpha,
                                      const std::vector<double>& l_grid,
                                      double t_final) {
    validate_common(scenario, alpha, l_grid);
    if (!(t_final > 0.0)) {
        throw ValidationError("baseline_time_averaged: window must be positive");
    }
    const std::size_t n = scenario.states.size();
    std::vector<cd> coeffs(n);
    for (std::size_t i = 0; i < n; ++i) {
        coeffs[i] = scenario.pair_coefficient(alpha, i);
    }
    std::vector<double> values(l_grid.size(), 0.0);
    double max_imag = 0.0;
    bool clamped = false;
    for (std::size_t k = 0; k < l_grid.size(); ++k) {
        const double l = l_grid[k];
        cd total(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (coeffs[i] == cd(0.0, 0.0)) {
                continue;
            }
            total += std::norm(coeffs[i]) *
                     pair_overlap_G(scenario, i, i, l, 0.0, t_final);
            for (std::size_t j = i + 1; j < n; ++j) {
                if (coeffs[j] == cd(0.0, 0.0)) {
                    continue;
                }
                const cd g = pair_overlap_G(scenario, i, j, l, 0.0, t_final);
                total += 2.0 * (coeffs[i] * std::conj(coeffs[j]) * g).real();
            }
        }
        if (std::abs(total) > 0.0) {
            max_imag = std::max(max_imag,
                                std::abs(total.imag()) / std::abs(total));
        }
        double value = total.real();
        if (value < 0.0) {
            clamped = true;
            value = 0.0;
        }
        values[k] = value;
    }
    double max_value = 0.0;
    for (double v : values) {
        max_value = std::max(max_value, v);
    }
    DetectionCurve curve;
    curve.l_values = l_grid;
    curve.method = Method::time_averaged;
    curve.values.assign(values.size(), 0.0);
    CurveMetadata meta;
    meta.t_window = t_final;
    meta.max_imag_residual = max_imag;
    meta.clamped = clamped;
    if (max_value <= 0.0) {
        meta.zero_curve = true;
        curve.meta = meta;
        return curve;
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        curve.values[k] = values[k] / max_value;
    }
    meta.log_scale = std::log(max_value);
    curve.meta = meta;
    return curve;
}

}  // namespace oscidet::engine
