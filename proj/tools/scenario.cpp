// scenario.cpp — JSON scenario parsing with exhaustive error collection

#include "scenario.hpp"

#include <json.hpp>

#include <complex>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "oscidet/errors.hpp"

namespace oscidet::cli {

namespace {

using nlohmann::json;

struct ErrorList {
    std::vector<std::string> items;

    void add(const std::string& path, const std::string& message) {
        items.push_back(path + ": " + message);
    }

    void throw_if_any() const {
        if (items.empty()) {
            return;
        }
        std::ostringstream msg;
        msg << "scenario file validation failed:";
        for (const auto& item : items) {
            msg << "\n  - " << item;
        }
        throw ValidationError(msg.str());
    }
};

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed,
                    ErrorList& errors) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            errors.add(join(path, item.key()), "unknown key");
        }
    }
}

const json* need(const json& obj, const std::string& path, const char* key,
                 ErrorList& errors) {
    if (!obj.contains(key)) {
        errors.add(join(path, key), "missing required key");
        return nullptr;
    }
    return &obj.at(key);
}

bool get_double(const json& j, const std::string& path, double& out,
                ErrorList& errors) {
    if (!j.is_number()) {
        errors.add(path, "expected a number");
        return false;
    }
    out = j.get<double>();
    return true;
}

bool get_int(const json& j, const std::string& path, int& out,
             ErrorList& errors) {
    if (!j.is_number_integer()) {
        errors.add(path, "expected an integer");
        return false;
    }
    out = j.get<int>();
    return true;
}

bool get_string(const json& j, const std::string& path, std::string& out,
                ErrorList& errors) {
    if (!j.is_string()) {
        errors.add(path, "expected a string");
        return false;
    }
    out = j.get<std::string>();
    return true;
}

bool get_double_array(const json& j, const std::string& path,
                      std::vector<double>& out, ErrorList& errors) {
    if (!j.is_array()) {
        errors.add(path, "expected an array of numbers");
        return false;
    }
    out.clear();
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
        double value = 0.0;
        if (get_double(j[i], path + "[" + std::to_string(i) + "]", value,
                       errors)) {
            out.push_back(value);
        } else {
            ok = false;
        }
    }
    return ok;
}

// Matrix entry: plain number (real) or [re, im].
bool get_complex(const json& j, const std::string& path,
                 std::complex<double>& out, ErrorList& errors) {
    if (j.is_number()) {
        out = {j.get<double>(), 0.0};
        return true;
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        out = {j[0].get<double>(), j[1].get<double>()};
        return true;
    }
    errors.add(path, "expected a number or a [re, im] pair");
    return false;
}

void parse_mixing(const json& j, osc::MixingMatrix& mixing,
                  ErrorList& errors) {
    const std::string path = "scenario.mixing";
    if (!j.is_object()) {
        errors.add(path, "expected an object with \"angle\" or \"matrix\"");
        return;
    }
    reject_unknown(j, path, {"angle", "matrix"}, errors);
    const bool has_angle = j.contains("angle");
    const bool has_matrix = j.contains("matrix");
    if (has_angle == has_matrix) {
        errors.add(path, "give exactly one of \"angle\" or \"matrix\"");
        return;
    }
    if (has_angle) {
        double theta = 0.0;
        if (get_double(j.at("angle"), path + ".angle", theta, errors)) {
            mixing = osc::MixingMatrix::rotation_2f(theta);
        }
        return;
    }
    const json& rows = j.at("matrix");
    if (!rows.is_array() || rows.empty()) {
        errors.add(path + ".matrix", "expected a nonempty array of rows");
        return;
    }
    const std::size_t n = rows.size();
    Eigen::MatrixXcd u(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::string row_path =
            path + ".matrix[" + std::to_string(r) + "]";
        if (!rows[r].is_array() || rows[r].size() != n) {
            errors.add(row_path, "expected a row of " + std::to_string(n) +
                                     " entries (matrix must be square)");
            return;
        }
        for (std::size_t c = 0; c < n; ++c) {
            std::complex<double> entry;
            if (!get_complex(rows[r][c],
                             row_path + "[" + std::to_string(c) + "]", entry,
                             errors)) {
                return;
            }
            u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                entry;
        }
    }
    mixing.u = std::move(u);
}

void parse_scenario_block(const json& block, osc::OscillationScenario& out,
                          ErrorList& errors) {
    reject_unknown(block, "scenario",
                   {"masses", "momenta", "widths", "mixing", "sigma",
                    "initial_flavor"},
                   errors);
    std::vector<double> masses;
    std::vector<double> momenta;
    std::vector<double> widths;
    bool have = true;
    if (const json* j = need(block, "scenario", "masses", errors)) {
        have = get_double_array(*j, "scenario.masses", masses, errors) && have;
    } else {
        have = false;
    }
    if (const json* j = need(block, "scenario", "momenta", errors)) {
        have =
            get_double_array(*j, "scenario.momenta", momenta, errors) && have;
    } else {
        have = false;
    }
    if (const json* j = need(block, "scenario", "widths", errors)) {
        have = get_double_array(*j, "scenario.widths", widths, errors) && have;
    } else {
        have = false;
    }
    if (have) {
        if (momenta.size() != masses.size()) {
            errors.add("scenario.momenta", "length must match masses");
        } else if (widths.size() != masses.size()) {
            errors.add("scenario.widths", "length must match masses");
        } else {
            for (std::size_t i = 0; i < masses.size(); ++i) {
                out.states.push_back({masses[i], momenta[i], widths[i]});
            }
        }
    }
    if (const json* j = need(block, "scenario", "sigma", errors)) {
        get_double(*j, "scenario.sigma", out.sigma, errors);
    }
    if (const json* j = need(block, "scenario", "initial_flavor", errors)) {
        get_int(*j, "scenario.initial_flavor", out.initial_flavor, errors);
    }
    if (const json* j = need(block, "scenario", "mixing", errors)) {
        parse_mixing(*j, out.mixing, errors);
    }
}

void parse_detection_block(const json& block, osc::DetectionModel& out,
                           ErrorList& errors) {
    reject_unknown(
        block, "detection",
        {"threshold", "product_masses", "localization", "overall_constant"},
        errors);
    if (const json* j = need(block, "detection", "threshold", errors)) {
        get_double(*j, "detection.threshold", out.threshold, errors);
    }
    if (const json* j = need(block, "detection", "product_masses", errors)) {
        get_double_array(*j, "detection.product_masses", out.product_masses,
                         errors);
    }
    if (const json* j = need(block, "detection", "localization", errors)) {
        get_double(*j, "detection.localization", out.localization, errors);
    }
    if (block.contains("overall_constant")) {
        get_double(block.at("overall_constant"), "detection.overall_constant",
                   out.overall_constant, errors);
    }
}

bool method_from_tag(const std::string& tag, engine::Method& out) {
    if (tag == "amplitude_sum") {
        out = engine::Method::amplitude_sum;
    } else if (tag == "equal_time") {
        out = engine::Method::equal_time;
    } else if (tag == "component_arrival") {
        out = engine::Method::component_arrival;
    } else if (tag == "time_averaged") {
        out = engine::Method::time_averaged;
    } else {
        return false;
    }
    return true;
}

void parse_run_block(const json& block, RunSpec& out, ErrorList& errors) {
    reject_unknown(block, "run",
                   {"l_grid", "flavor", "methods", "thresholds", "window"},
                   errors);
    if (const json* j = need(block, "run", "l_grid", errors)) {
        if (!j->is_object()) {
            errors.add("run.l_grid", "expected an object {start, stop, count}");
        } else {
            reject_unknown(*j, "run.l_grid", {"start", "stop", "count"},
                           errors);
            if (const json* f = need(*j, "run.l_grid", "start", errors)) {
                get_double(*f, "run.l_grid.start", out.l_grid.start, errors);
            }
            if (const json* f = need(*j, "run.l_grid", "stop", errors)) {
                get_double(*f, "run.l_grid.stop", out.l_grid.stop, errors);
            }
            if (const json* f = need(*j, "run.l_grid", "count", errors)) {
                get_int(*f, "run.l_grid.count", out.l_grid.count, errors);
            }
        }
    }
    if (const json* j = need(block, "run", "flavor", errors)) {
        get_int(*j, "run.flavor", out.flavor, errors);
    }
    if (block.contains("methods")) {
        const json& methods = block.at("methods");
        if (!methods.is_array()) {
            errors.add("run.methods", "expected an array of method tags");
        } else {
            for (std::size_t i = 0; i < methods.size(); ++i) {
                const std::string path =
                    "run.methods[" + std::to_string(i) + "]";
                std::string tag;
                engine::Method method{};
                if (get_string(methods[i], path, tag, errors)) {
                    if (method_from_tag(tag, method)) {
                        out.methods.push_back(method);
                    } else {
                        errors.add(path,
                                   "unknown method \"" + tag +
                                       "\"; valid: amplitude_sum, equal_time, "
                                       "component_arrival, time_averaged");
                    }
                }
            }
            if (methods.empty()) {
                errors.add("run.methods", "method list must be nonempty");
            }
        }
    } else {
        out.methods = {engine::Method::amplitude_sum};
    }
    if (block.contains("thresholds")) {
        std::vector<double> thresholds;
        if (get_double_array(block.at("thresholds"), "run.thresholds",
                             thresholds, errors)) {
            for (std::size_t i = 0; i < thresholds.size(); ++i) {
                if (thresholds[i] < 0.0) {
                    errors.add("run.thresholds[" + std::to_string(i) + "]",
                               "must be >= 0");
                }
            }
            out.thresholds = std::move(thresholds);
        }
    }
    if (block.contains("window")) {
        const json& window = block.at("window");
        if (!window.is_object()) {
            errors.add("run.window", "expected an object {mode[, t]}");
            return;
        }
        reject_unknown(window, "run.window", {"mode", "t"}, errors);
        std::string mode;
        if (const json* f = need(window, "run.window", "mode", errors)) {
            if (!get_string(*f, "run.window.mode", mode, errors)) {
                return;
            }
        } else {
            return;
        }
        if (mode == "auto") {
            if (window.contains("t")) {
                errors.add("run.window.t",
                           "not allowed in \"auto\" mode (the window is "
                           "chosen by the stability policy)");
            }
            out.window = engine::WindowPolicy::automatic();
        } else if (mode == "fixed") {
            double t_final = 0.0;
            if (const json* f = need(window, "run.window", "t", errors)) {
                if (get_double(*f, "run.window.t", t_final, errors)) {
                    if (!(t_final > 0.0)) {
                        errors.add("run.window.t", "must be > 0");
                    } else {
                        out.window = engine::WindowPolicy::fixed(t_final);
                    }
                }
            }
        } else {
            errors.add("run.window.mode",
                       "unknown mode \"" + mode + "\"; valid: auto, fixed");
        }
    }
}

void parse_output_block(const json& block, OutputSpec& out,
                        ErrorList& errors) {
    reject_unknown(block, "output",
                   {"density", "summary", "plot", "scan", "format"}, errors);
    if (block.contains("density")) {
        get_string(block.at("density"), "output.density", out.density, errors);
    }
    if (block.contains("summary")) {
        get_string(block.at("summary"), "output.summary", out.summary, errors);
    }
    if (block.contains("plot")) {
        get_string(block.at("plot"), "output.plot", out.plot, errors);
    }
    if (block.contains("scan")) {
        get_string(block.at("scan"), "output.scan", out.scan, errors);
    }
    if (block.contains("format")) {
        if (get_string(block.at("format"), "output.format", out.format,
                       errors) &&
            out.format != "csv") {
            errors.add("output.format",
                       "unsupported format \"" + out.format +
                           "\"; this build writes csv");
        }
    }
}

}  // namespace

std::vector<double> LGridSpec::points() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] =
            start + (stop - start) * i / static_cast<double>(count - 1);
    }
    return out;
}

ScenarioFile parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ValidationError(std::string("scenario file is not valid JSON: ") +
                              err.what());
    }

    ErrorList errors;
    ScenarioFile out;
    if (!doc.is_object()) {
        errors.add("(top level)", "must be a JSON object");
        errors.throw_if_any();
    }
    reject_unknown(doc, "",
                   {"schema_version", "scenario", "detection", "run", "output"},
                   errors);

    if (const json* j = need(doc, "", "schema_version", errors)) {
        int version = 0;
        if (get_int(*j, "schema_version", version, errors)) {
            if (version != kSchemaVersion) {
                errors.add("schema_version",
                           "unsupported version " + std::to_string(version) +
                               "; this build reads version " +
                               std::to_string(kSchemaVersion));
            }
            out.schema_version = version;
        }
    }
    if (const json* j = need(doc, "", "scenario", errors)) {
        if (!j->is_object()) {
            errors.add("scenario", "expected an object");
        } else {
            parse_scenario_block(*j, out.scenario, errors);
        }
    }
    if (const json* j = need(doc, "", "detection", errors)) {
        if (!j->is_object()) {
            errors.add("detection", "expected an object");
        } else {
            parse_detection_block(*j, out.detection, errors);
        }
    }
    if (const json* j = need(doc, "", "run", errors)) {
        if (!j->is_object()) {
            errors.add("run", "expected an object");
        } else {
            parse_run_block(*j, out.run, errors);
        }
    }
    if (doc.contains("output")) {
        const json& j = doc.at("output");
        if (!j.is_object()) {
            errors.add("output", "expected an object");
        } else {
            parse_output_block(j, out.output, errors);
        }
    }

    // Semantic validation once the structure is complete; module-level
    // validators produce their own itemized messages.
    if (errors.items.empty()) {
        try {
            out.scenario.validate();
        } catch (const ValidationError& err) {
            errors.add("scenario", err.what());
        }
        try {
            out.detection.validate();
        } catch (const ValidationError& err) {
            errors.add("detection", err.what());
        }
        if (out.run.l_grid.count < 2) {
            errors.add("run.l_grid.count", "must be >= 2");
        }
        if (!(out.run.l_grid.start >= 0.0)) {
            errors.add("run.l_grid.start", "must be >= 0");
        }
        if (!(out.run.l_grid.stop > out.run.l_grid.start)) {
            errors.add("run.l_grid.stop", "must be > start");
        }
        if (out.run.flavor < 0 ||
            out.run.flavor >= out.scenario.mixing.dim()) {
            errors.add("run.flavor",
                       "detected flavor " + std::to_string(out.run.flavor) +
                           " out of range for mixing dimension " +
                           std::to_string(out.scenario.mixing.dim()));
        }
    }
    errors.throw_if_any();
    return out;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open scenario file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

}  // namespace oscidet::cli
