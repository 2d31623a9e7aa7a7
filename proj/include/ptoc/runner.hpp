#pragma once

#include <string>
#include <vector>

#include "ptoc/adapt.hpp"

namespace ptoc {

/// Experiment configuration, fillable from a key=value file plus command-line
/// overrides.
struct RunConfig {
    int example = 2;
    double alpha = 1.5;
    std::string marking = "maximum";  // maximum | bulk | average
    double theta = 0.5;
    int max_iters = 30;
    long long ndof_budget = 20000;
    bool uniform = false;
    std::string out = ".";
    int initial_subdivisions = 4;
    int prerefine_rounds = 30;
    int quad_degree = 7;
    int error_subdiv_depth = 4;
    double cg_tol = 1e-10;
    double pdas_tol = 1e-9;
    int pdas_max_outer = 100;
    unsigned long seed = 0;  // reserved for randomized diagnostics
    int slope_window = 8;
};

/// Parse a flat key=value file (one pair per line, '#' comments).
RunConfig parse_config_file(const std::string& path);
/// Apply "key=value" assignments on top of an existing configuration.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);
/// Throws std::invalid_argument with an explanatory message on bad settings.
void validate_config(const RunConfig& cfg);

MarkingStrategy marking_from_config(const RunConfig& cfg);

/// Least-squares slope of log(values) against log(ndof) over the last k
/// records.  Requires k >= 3 and positive values in the window.
double fit_slope_loglog(const std::vector<double>& ndof, const std::vector<double>& values, int k);
double fit_slope(const std::vector<ConvergenceRecord>& records, const std::string& column, int k);
std::vector<double> record_column(const std::vector<ConvergenceRecord>& records,
                                  const std::string& column);

/// Execute the configured adaptive run and write convergence.csv, slopes.txt
/// and the final mesh/fields/indicator dumps into cfg.out.  Deterministic:
/// identical configurations produce byte-identical outputs.
LoopResult run(const RunConfig& cfg);

} // namespace ptoc
