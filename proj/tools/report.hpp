// report.hpp — deterministic CSV emission for detection curves

#pragma once

#include <string>
#include <vector>

#include "oscidet/engine.hpp"

namespace oscidet::cli {

// %.17g with the C numeric conventions: enough digits for exact double
// round-trip, byte-identical across runs.
std::string format_double(double value);

// Wide format: header "L,<tag>[,<tag>...]", one row per grid point.  All
// curves must share the same L grid.
void write_density_csv(const std::string& path,
                       const std::vector<engine::DetectionCurve>& curves);

// Long format: header "L,method,value"; curves concatenated in order.  An
// empty curve list produces a header-only file.
void write_plot_csv(const std::string& path,
                    const std::vector<engine::DetectionCurve>& curves);

struct PlotRow {
    double l{0.0};
    std::string method;
    double value{0.0};
};

// Inverse of write_plot_csv; values recovered exactly.
std::vector<PlotRow> read_plot_csv(const std::string& path);

}  // namespace oscidet::cli
