// main.cpp — oscidet command line: validate, density, baselines, fit, scan
//
// Exit codes: 0 success, 1 validation error, 2 accuracy (quadrature) error,
// 3 fit failure.  Result data goes to files and standard output; warnings and
// error diagnostics go to the error stream.

#include <CLI11.hpp>
#include <json.hpp>

#include <clocale>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oscidet/analysis.hpp"
#include "oscidet/engine.hpp"
#include "oscidet/errors.hpp"
#include "report.hpp"
#include "scenario.hpp"

namespace {

namespace fs = std::filesystem;
namespace engine = oscidet::engine;
namespace analysis = oscidet::analysis;
namespace cli = oscidet::cli;
using nlohmann::ordered_json;
using oscidet::AccuracyError;
using oscidet::FitError;
using oscidet::ValidationError;

struct Options {
    std::string scenario_path;
    std::string out_dir{"."};
    int threads{1};
    double quadrature_tol{0.0};  // 0 keeps the engine default
};

engine::EngineControl make_control(const Options& options) {
    engine::EngineControl control;
    control.threads = options.threads;
    if (options.quadrature_tol > 0.0) {
        control.curve_rel_tol = options.quadrature_tol;
    }
    return control;
}

void emit_warnings(const cli::ScenarioFile& sf) {
    const double six_sigma = 6.0 * sf.scenario.sigma;
    if (sf.run.l_grid.start < six_sigma) {
        std::cerr << "warning: L grid starts at "
                  << cli::format_double(sf.run.l_grid.start)
                  << ", inside 6*sigma = " << cli::format_double(six_sigma)
                  << "; the short-distance region can be dominated by the "
                     "preparation transient\n";
    }
    if (sf.detection.localization > sf.scenario.sigma / 10.0) {
        std::cerr << "warning: localization "
                  << cli::format_double(sf.detection.localization)
                  << " exceeds sigma/10 = "
                  << cli::format_double(sf.scenario.sigma / 10.0)
                  << "; the pointlike-detector reduction degrades\n";
    }
}

// ------------------------------ JSON pieces ---------------------------------

ordered_json complex_pair(const std::complex<double>& z) {
    return ordered_json::array({z.real(), z.imag()});
}

ordered_json scenario_echo(const cli::ScenarioFile& sf,
                           const engine::EngineControl& control) {
    ordered_json root;
    root["schema_version"] = sf.schema_version;

    ordered_json sc;
    ordered_json masses = ordered_json::array();
    ordered_json momenta = ordered_json::array();
    ordered_json widths = ordered_json::array();
    for (const auto& st : sf.scenario.states) {
        masses.push_back(st.mass);
        momenta.push_back(st.momentum);
        widths.push_back(st.decay_rate);
    }
    sc["masses"] = masses;
    sc["momenta"] = momenta;
    sc["widths"] = widths;
    ordered_json mixing = ordered_json::array();
    for (Eigen::Index r = 0; r < sf.scenario.mixing.dim(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < sf.scenario.mixing.dim(); ++c) {
            row.push_back(complex_pair(sf.scenario.mixing.u(r, c)));
        }
        mixing.push_back(row);
    }
    sc["mixing_matrix"] = mixing;
    sc["sigma"] = sf.scenario.sigma;
    sc["initial_flavor"] = sf.scenario.initial_flavor;
    root["scenario"] = sc;

    ordered_json det;
    det["threshold"] = sf.detection.threshold;
    det["product_masses"] = sf.detection.product_masses;
    det["localization"] = sf.detection.localization;
    det["overall_constant"] = sf.detection.overall_constant;
    root["detection"] = det;

    ordered_json run;
    run["l_grid"] = {{"start", sf.run.l_grid.start},
                     {"stop", sf.run.l_grid.stop},
                     {"count", sf.run.l_grid.count}};
    run["flavor"] = sf.run.flavor;
    run["window"] =
        sf.run.window.kind == engine::WindowPolicy::Kind::automatic
            ? ordered_json{{"mode", "auto"}}
            : ordered_json{{"mode", "fixed"}, {"t", sf.run.window.t_value}};
    root["run"] = run;

    ordered_json ctl;
    ctl["threads"] = control.threads;
    ctl["curve_rel_tol"] = control.curve_rel_tol;
    ctl["max_nu_nodes"] = control.max_nu_nodes;
    ctl["oracle_node_budget"] = control.oracle_node_budget;
    root["control"] = ctl;
    return root;
}

ordered_json meta_json(const engine::CurveMetadata& meta) {
    ordered_json j;
    j["t_window"] = meta.t_window;
    j["window_doublings"] = meta.window_doublings;
    j["nodes"] = meta.nodes;
    j["refinements"] = meta.refinements;
    j["log_scale"] = meta.log_scale;
    j["zero_curve"] = meta.zero_curve;
    j["clamped"] = meta.clamped;
    j["max_imag_residual"] = meta.max_imag_residual;
    return j;
}

ordered_json fit_json(const analysis::OscillationFit& fit) {
    ordered_json j;
    j["wavenumber"] = fit.wavenumber;
    j["wavenumber_uncertainty"] = fit.wavenumber_uncertainty;
    j["amplitudes"] =
        ordered_json::array({fit.amplitudes[0], fit.amplitudes[1]});
    j["interference"] = complex_pair(fit.interference);
    j["decay_slopes"] =
        ordered_json::array({fit.decay_slopes[0], fit.decay_slopes[1]});
    j["residual_rms"] = fit.residual_rms;
    j["grid_points"] = fit.grid_points;
    return j;
}

// --------------------------- curve computation ------------------------------

struct MethodReport {
    engine::DetectionCurve curve;
    std::optional<analysis::OscillationFit> fit;
    std::string fit_error;
};

engine::DetectionCurve compute_curve(engine::Method method,
                                     const cli::ScenarioFile& sf,
                                     const std::vector<double>& grid,
                                     const engine::EngineControl& control) {
    switch (method) {
        case engine::Method::amplitude_sum: {
            engine::DensityRequest request;
            request.scenario = sf.scenario;
            request.detection = sf.detection;
            request.flavor = sf.run.flavor;
            request.l_grid = grid;
            request.window = sf.run.window;
            request.control = control;
            return engine::detection_density(request);
        }
        case engine::Method::equal_time:
            return engine::baseline_equal_time(sf.scenario, sf.run.flavor,
                                               grid);
        case engine::Method::component_arrival:
            return engine::baseline_component_arrival(sf.scenario,
                                                      sf.run.flavor, grid);
        case engine::Method::time_averaged: {
            const double t_final =
                sf.run.window.kind == engine::WindowPolicy::Kind::fixed
                    ? sf.run.window.t_value
                    : engine::auto_window(sf.scenario, grid);
            return engine::baseline_time_averaged(sf.scenario, sf.run.flavor,
                                                  grid, t_final);
        }
    }
    throw ValidationError("compute_curve: unknown method");
}

// Computes curve + fit per method.  When require_amplitude_fit is set (the
// `fit` command), a failed amplitude_sum fit propagates; otherwise failures
// are recorded per method and reported in the summary.
std::vector<MethodReport> compute_reports(
    const cli::ScenarioFile& sf, const std::vector<engine::Method>& methods,
    const std::vector<double>& grid, const engine::EngineControl& control,
    bool require_amplitude_fit) {
    std::vector<MethodReport> reports;
    reports.reserve(methods.size());
    for (engine::Method method : methods) {
        MethodReport report;
        report.curve = compute_curve(method, sf, grid, control);
        try {
            report.fit = analysis::fit_oscillation(
                report.curve, sf.scenario,
                analysis::default_fit_model(sf.scenario, sf.detection));
        } catch (const FitError& err) {
            if (require_amplitude_fit &&
                method == engine::Method::amplitude_sum) {
                throw;
            }
            report.fit_error = err.what();
        } catch (const ValidationError& err) {
            if (require_amplitude_fit &&
                method == engine::Method::amplitude_sum) {
                throw;
            }
            report.fit_error = err.what();
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

ordered_json reports_summary(const cli::ScenarioFile& sf,
                             const engine::EngineControl& control,
                             const std::vector<MethodReport>& reports) {
    ordered_json root = scenario_echo(sf, control);

    std::optional<double> k_standard;
    std::optional<double> k_analytic;
    std::optional<double> k_corrected;
    if (sf.scenario.states.size() >= 2) {
        k_standard =
            std::abs(analysis::standard_wavenumber(sf.scenario, 0, 1));
        k_analytic = std::abs(
            analysis::analytic_wavenumber(sf.scenario, sf.detection, 0, 1));
        k_corrected = std::abs(analysis::threshold_corrected_wavenumber(
            sf.scenario, sf.detection, 0, 1));
    }
    ordered_json analytic;
    analytic["standard_wavenumber"] =
        k_standard ? ordered_json(*k_standard) : ordered_json(nullptr);
    analytic["analytic_wavenumber"] =
        k_analytic ? ordered_json(*k_analytic) : ordered_json(nullptr);
    analytic["threshold_corrected_wavenumber"] =
        k_corrected ? ordered_json(*k_corrected) : ordered_json(nullptr);
    root["analytic"] = analytic;

    ordered_json methods;
    std::optional<double> k_amplitude;
    std::optional<double> k_time_averaged;
    for (const auto& report : reports) {
        ordered_json entry;
        entry["metadata"] = meta_json(report.curve.meta);
        if (report.fit) {
            entry["fit"] = fit_json(*report.fit);
            if (report.curve.method == engine::Method::amplitude_sum) {
                k_amplitude = report.fit->wavenumber;
            }
            if (report.curve.method == engine::Method::time_averaged) {
                k_time_averaged = report.fit->wavenumber;
            }
        } else {
            entry["fit_error"] = report.fit_error;
        }
        methods[std::string(engine::method_name(report.curve.method))] = entry;
    }
    root["methods"] = methods;

    ordered_json ratios;
    for (const auto& report : reports) {
        if (report.fit && k_standard && *k_standard > 0.0) {
            ratios[std::string(engine::method_name(report.curve.method)) +
                   "_over_standard"] = report.fit->wavenumber / *k_standard;
        }
    }
    if (k_amplitude && k_time_averaged && *k_time_averaged > 0.0) {
        ratios["amplitude_sum_over_time_averaged"] =
            *k_amplitude / *k_time_averaged;
    }
    root["ratios"] = ratios;
    return root;
}

void write_summary(const fs::path& path, const ordered_json& summary) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << summary.dump(2) << "\n";
}

// ------------------------------- subcommands --------------------------------

void run_validate(const cli::ScenarioFile& sf) {
    std::cout << "scenario OK: " << sf.scenario.states.size()
              << " mass states, sigma = "
              << cli::format_double(sf.scenario.sigma) << ", threshold = "
              << cli::format_double(sf.detection.threshold) << ", L grid ["
              << cli::format_double(sf.run.l_grid.start) << ", "
              << cli::format_double(sf.run.l_grid.stop) << "] x "
              << sf.run.l_grid.count << "\n";
}

void run_curves(const cli::ScenarioFile& sf, const Options& options,
                const std::vector<engine::Method>& methods,
                bool require_amplitude_fit) {
    const engine::EngineControl control = make_control(options);
    const std::vector<double> grid = sf.run.l_grid.points();
    const std::vector<MethodReport> reports =
        compute_reports(sf, methods, grid, control, require_amplitude_fit);

    fs::create_directories(options.out_dir);
    std::vector<engine::DetectionCurve> curves;
    curves.reserve(reports.size());
    for (const auto& report : reports) {
        curves.push_back(report.curve);
    }
    const fs::path out_dir(options.out_dir);
    cli::write_density_csv((out_dir / sf.output.density).string(), curves);
    cli::write_plot_csv((out_dir / sf.output.plot).string(), curves);
    write_summary(out_dir / sf.output.summary,
                  reports_summary(sf, control, reports));
    std::cerr << "wrote " << (out_dir / sf.output.density).string() << ", "
              << (out_dir / sf.output.plot).string() << ", "
              << (out_dir / sf.output.summary).string() << "\n";

    for (const auto& report : reports) {
        const std::string_view tag = engine::method_name(report.curve.method);
        if (report.fit) {
            std::cout << "k_fit[" << tag
                      << "] = " << cli::format_double(report.fit->wavenumber)
                      << " +- "
                      << cli::format_double(report.fit->wavenumber_uncertainty)
                      << "\n";
        } else {
            std::cerr << "fit[" << tag << "] failed: " << report.fit_error
                      << "\n";
        }
    }
}

void run_scan(const cli::ScenarioFile& sf, const Options& options) {
    if (sf.run.thresholds.empty()) {
        throw ValidationError(
            "scan: run.thresholds is empty in the scenario file");
    }
    const engine::EngineControl control = make_control(options);
    analysis::ScanPipeline pipeline;
    pipeline.l_grid = sf.run.l_grid.points();
    pipeline.window = sf.run.window;
    pipeline.control = control;
    pipeline.flavor = sf.run.flavor;
    const analysis::ThresholdScanResult result = analysis::threshold_scan(
        sf.scenario, sf.detection, sf.run.thresholds, pipeline);

    fs::create_directories(options.out_dir);
    const fs::path out_dir(options.out_dir);
    {
        std::ofstream out(out_dir / sf.output.scan);
        if (!out) {
            throw ValidationError("cannot write file: " +
                                  (out_dir / sf.output.scan).string());
        }
        out << "threshold,k_fit,k_uncertainty,k_analytic,failed\n";
        for (const auto& point : result.points) {
            out << cli::format_double(point.threshold) << ","
                << cli::format_double(point.fitted_wavenumber) << ","
                << cli::format_double(point.fitted_uncertainty) << ","
                << cli::format_double(point.analytic) << ","
                << (point.failed ? 1 : 0) << "\n";
        }
    }

    ordered_json root = scenario_echo(sf, control);
    ordered_json points = ordered_json::array();
    for (const auto& point : result.points) {
        ordered_json entry;
        entry["threshold"] = point.threshold;
        entry["k_fit"] = point.fitted_wavenumber;
        entry["k_uncertainty"] = point.fitted_uncertainty;
        entry["k_analytic"] = point.analytic;
        entry["failed"] = point.failed;
        if (point.failed) {
            entry["error"] = point.error;
        }
        points.push_back(entry);
    }
    ordered_json scan;
    scan["points"] = points;
    scan["slope"] =
        result.slope ? ordered_json(*result.slope) : ordered_json(nullptr);
    scan["analytic_slope"] = result.analytic_slope;
    scan["partial"] = result.partial;
    root["scan"] = scan;
    write_summary(out_dir / sf.output.summary, root);
    std::cerr << "wrote " << (out_dir / sf.output.scan).string() << ", "
              << (out_dir / sf.output.summary).string() << "\n";

    for (const auto& point : result.points) {
        if (point.failed) {
            std::cerr << "scan eps = " << cli::format_double(point.threshold)
                      << " failed: " << point.error << "\n";
        } else {
            std::cout << "eps = " << cli::format_double(point.threshold)
                      << ": k_fit = "
                      << cli::format_double(point.fitted_wavenumber)
                      << " (analytic "
                      << cli::format_double(point.analytic) << ")\n";
        }
    }
    if (result.slope) {
        std::cout << "slope = " << cli::format_double(*result.slope)
                  << " (analytic "
                  << cli::format_double(result.analytic_slope) << ")\n";
    }
    if (result.partial) {
        std::cerr << "scan is partial: at least one threshold failed\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{
        "oscidet — detection-time-summed oscillation probabilities: "
        "densities, baselines, wavenumber fits, threshold scans"};
    app.require_subcommand(1);

    Options options;
    app.add_option("--scenario", options.scenario_path,
                   "Scenario JSON file")
        ->required();
    app.add_option("--out", options.out_dir,
                   "Output directory (created if missing)");
    app.add_option("--threads", options.threads,
                   "Worker threads across the L grid")
        ->check(CLI::PositiveNumber);
    app.add_option("--quadrature-tol", options.quadrature_tol,
                   "Relative curve tolerance of the adaptive quadrature")
        ->check(CLI::PositiveNumber);

    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Parse and validate the scenario file");
    CLI::App* cmd_density = app.add_subcommand(
        "density", "Detection densities for the configured methods");
    CLI::App* cmd_baselines = app.add_subcommand(
        "baselines", "Amplitude-sum density plus all three baselines");
    CLI::App* cmd_fit = app.add_subcommand(
        "fit", "Amplitude-sum density and its wavenumber fit");
    CLI::App* cmd_scan = app.add_subcommand(
        "scan", "Wavenumber fit across the configured thresholds");
    for (CLI::App* sub :
         {cmd_validate, cmd_density, cmd_baselines, cmd_fit, cmd_scan}) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const cli::ScenarioFile sf = cli::load_scenario(options.scenario_path);
        emit_warnings(sf);
        if (cmd_validate->parsed()) {
            run_validate(sf);
        } else if (cmd_density->parsed()) {
            run_curves(sf, options, sf.run.methods, false);
        } else if (cmd_baselines->parsed()) {
            run_curves(sf, options,
                       {engine::Method::amplitude_sum,
                        engine::Method::equal_time,
                        engine::Method::component_arrival,
                        engine::Method::time_averaged},
                       false);
        } else if (cmd_fit->parsed()) {
            run_curves(sf, options, {engine::Method::amplitude_sum}, true);
        } else if (cmd_scan->parsed()) {
            run_scan(sf, options);
        }
    } catch (const ValidationError& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return 1;
    } catch (const AccuracyError& err) {
        std::cerr << "accuracy error: " << err.what() << "\n";
        return 2;
    } catch (const FitError& err) {
        std::cerr << "fit error: " << err.what() << "\n";
        return 3;
    }
    return 0;
}
