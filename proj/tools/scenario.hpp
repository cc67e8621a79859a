// scenario.hpp — JSON scenario files for the oscidet CLI
//
// A scenario file is one JSON document with four blocks:
//   scenario:  masses, momenta, widths, mixing (angle or explicit matrix),
//              sigma, initial_flavor
//   detection: threshold, product_masses, localization, overall_constant
//   run:       l_grid {start, stop, count}, flavor, methods, thresholds,
//              window ({"mode":"auto"} or {"mode":"fixed","t":...})
//   output:    density / summary / plot file names, format ("csv")
// plus a top-level integer schema_version (currently 1).  Unknown keys are
// rejected everywhere; validation collects every problem (with its JSON path)
// before throwing, instead of stopping at the first.

#pragma once

#include <string>
#include <vector>

#include "oscidet/engine.hpp"
#include "oscidet/oscillation.hpp"

namespace oscidet::cli {

inline constexpr int kSchemaVersion = 1;

struct LGridSpec {
    double start{0.0};
    double stop{0.0};
    int count{0};

    std::vector<double> points() const;
};

struct RunSpec {
    LGridSpec l_grid;
    int flavor{0};                        // detected flavor alpha
    std::vector<engine::Method> methods;  // default: amplitude_sum
    std::vector<double> thresholds;       // scan command only
    engine::WindowPolicy window{};        // default: automatic
};

struct OutputSpec {
    std::string density{"density.csv"};
    std::string summary{"summary.json"};
    std::string plot{"plot_data.csv"};
    std::string scan{"scan.csv"};
    std::string format{"csv"};
};

struct ScenarioFile {
    int schema_version{kSchemaVersion};
    osc::OscillationScenario scenario;
    osc::DetectionModel detection;
    RunSpec run;
    OutputSpec output;
};

// Parse and fully validate a scenario document.  Throws ValidationError whose
// message lists every violation as "path: problem".
ScenarioFile parse_scenario(const std::string& text);

// Read the file and parse_scenario its contents.
ScenarioFile load_scenario(const std::string& path);

}  // namespace oscidet::cli
