// report.cpp — CSV writers/readers shared by the CLI subcommands

#include "report.hpp"

#include <cstdio>
#include <string_view>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "oscidet/errors.hpp"

namespace oscidet::cli {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path);
    }
    return out;
}

void check_shared_grid(const std::vector<engine::DetectionCurve>& curves) {
    for (std::size_t i = 1; i < curves.size(); ++i) {
        if (curves[i].l_values != curves[0].l_values) {
            throw ValidationError(
                "write_density_csv: curves do not share one L grid");
        }
    }
}

}  // namespace

void write_density_csv(const std::string& path,
                       const std::vector<engine::DetectionCurve>& curves) {
    check_shared_grid(curves);
    std::ofstream out = open_out(path);
    out << "L";
    for (const auto& curve : curves) {
        out << "," << engine::method_name(curve.method);
    }
    out << "\n";
    if (curves.empty()) {
        return;
    }
    for (std::size_t row = 0; row < curves[0].l_values.size(); ++row) {
        out << format_double(curves[0].l_values[row]);
        for (const auto& curve : curves) {
            out << "," << format_double(curve.values[row]);
        }
        out << "\n";
    }
}

void write_plot_csv(const std::string& path,
                    const std::vector<engine::DetectionCurve>& curves) {
    std::ofstream out = open_out(path);
    out << "L,method,value\n";
    for (const auto& curve : curves) {
        const std::string_view tag = engine::method_name(curve.method);
        for (std::size_t i = 0; i < curve.l_values.size(); ++i) {
            out << format_double(curve.l_values[i]) << "," << tag << ","
                << format_double(curve.values[i]) << "\n";
        }
    }
}

std::vector<PlotRow> read_plot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open plot file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != "L,method,value") {
        throw ValidationError("read_plot_csv: missing \"L,method,value\" "
                              "header in " +
                              path);
    }
    std::vector<PlotRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::size_t c1 = line.find(',');
        const std::size_t c2 =
            c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw ValidationError("read_plot_csv: malformed row at line " +
                                  std::to_string(line_no) + " of " + path);
        }
        PlotRow row;
        row.l = std::strtod(line.substr(0, c1).c_str(), nullptr);
        row.method = line.substr(c1 + 1, c2 - c1 - 1);
        row.value = std::strtod(line.substr(c2 + 1).c_str(), nullptr);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace oscidet::cli
