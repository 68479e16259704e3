#pragma once

// Run harness: takes a JSON run configuration, executes one of the lab
// commands, and produces a Report (named checks against named tolerances)
// plus optional CSV output. Runs are deterministic: a fixed config and seed
// give byte-identical CSV bytes.

#include <map>
#include <string>
#include <vector>

#include "density.hpp"
#include "errors.hpp"

namespace epsteinlab {

struct ToleranceSet {
    std::map<std::string, double> values;

    static ToleranceSet defaults();
    double get(const std::string& name) const;
    void set(const std::string& name, double v);
};

struct CheckRecord {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string note;
};

struct Report {
    std::string command;
    unsigned long long seed = 0;
    ToleranceSet tolerances;
    std::vector<CheckRecord> checks;
    std::vector<std::string> outputs;
    int degenerate_samples = 0;

    // A report with no checks is a failed run by definition.
    bool all_pass() const;
    std::string to_json_text() const;
    std::string text() const;
};

struct RunConfig {
    std::string command;          // verify-identities | epstein-sample | dome |
                                  // bounds | sweep
    std::string scene_json;       // inline scene JSON text ("" if none)
    std::string scene_path;       // or a path; inline wins if both set
    std::string descriptors_json; // inline descriptor array text
    std::string descriptors_path;
    int grid = 8;
    unsigned long long seed = 1;
    std::vector<double> times{0.0, 0.3, 0.7};
    std::map<std::string, double> tol_overrides;
    std::string out; // CSV path ("" = no file output)
    int chi = -2;    // sweep
    double lrange[3] = {0.0, 4.0, 9};   // lo, hi, count
    double prange[3] = {0.0, 1.5, 7};
    std::vector<cplx> points; // dome probes; empty = scene defaults

    static RunConfig from_json_text(const std::string& text);
};

Report run(const RunConfig& config);

} // namespace epsteinlab
