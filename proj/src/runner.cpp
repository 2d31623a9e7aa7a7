#include "ptoc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ptoc/io.hpp"
#include "ptoc/problem.hpp"

namespace ptoc {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v)
{
    if (v == "1" || v == "true" || v == "on" || v == "yes")
        return true;
    if (v == "0" || v == "false" || v == "off" || v == "no")
        return false;
    throw std::invalid_argument("config: cannot parse boolean value '" + v + "'");
}

} // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value)
{
    try {
        if (key == "example")
            cfg.example = std::stoi(value);
        else if (key == "alpha")
            cfg.alpha = std::stod(value);
        else if (key == "marking")
            cfg.marking = value;
        else if (key == "theta")
            cfg.theta = std::stod(value);
        else if (key == "max_iters")
            cfg.max_iters = std::stoi(value);
        else if (key == "ndof_budget")
            cfg.ndof_budget = std::stoll(value);
        else if (key == "uniform")
            cfg.uniform = parse_bool(value);
        else if (key == "out")
            cfg.out = value;
        else if (key == "initial_subdivisions")
            cfg.initial_subdivisions = std::stoi(value);
        else if (key == "prerefine_rounds")
            cfg.prerefine_rounds = std::stoi(value);
        else if (key == "quad_degree")
            cfg.quad_degree = std::stoi(value);
        else if (key == "error_subdiv_depth")
            cfg.error_subdiv_depth = std::stoi(value);
        else if (key == "cg_tol")
            cfg.cg_tol = std::stod(value);
        else if (key == "pdas_tol")
            cfg.pdas_tol = std::stod(value);
        else if (key == "pdas_max_outer")
            cfg.pdas_max_outer = std::stoi(value);
        else if (key == "seed")
            cfg.seed = std::stoul(value);
        else if (key == "slope_window")
            cfg.slope_window = std::stoi(value);
        else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: cannot parse value '" + value + "' for key '" + key +
                                    "'");
    }
}

RunConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void validate_config(const RunConfig& cfg)
{
    if (cfg.example < 1 || cfg.example > 4)
        throw std::invalid_argument("config: example must be one of 1, 2, 3, 4");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0))
        throw std::invalid_argument("config: alpha must lie in the open interval (0,2)");
    if (cfg.marking != "maximum" && cfg.marking != "bulk" && cfg.marking != "average")
        throw std::invalid_argument("config: marking must be maximum, bulk or average");
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0))
        throw std::invalid_argument("config: theta must lie in (0,1]");
    if (cfg.max_iters < 0)
        throw std::invalid_argument("config: max_iters must be nonnegative");
    if (cfg.ndof_budget < 1)
        throw std::invalid_argument("config: ndof_budget must be positive");
    if (cfg.initial_subdivisions < 1)
        throw std::invalid_argument("config: initial_subdivisions must be positive");
    if (cfg.quad_degree < 2)
        throw std::invalid_argument("config: quad_degree must be at least 2");
    if (!(cfg.cg_tol > 0.0 && cfg.cg_tol < 1.0))
        throw std::invalid_argument("config: cg_tol must lie in (0,1)");
    if (!(cfg.pdas_tol > 0.0))
        throw std::invalid_argument("config: pdas_tol must be positive");
    if (cfg.slope_window < 3)
        throw std::invalid_argument("config: slope_window must be at least 3");
}

MarkingStrategy marking_from_config(const RunConfig& cfg)
{
    MarkingStrategy s;
    s.theta = cfg.theta;
    if (cfg.marking == "maximum")
        s.kind = Marking::Maximum;
    else if (cfg.marking == "bulk")
        s.kind = Marking::Bulk;
    else if (cfg.marking == "average")
        s.kind = Marking::Average;
    else
        throw std::invalid_argument("config: marking must be maximum, bulk or average");
    return s;
}

double fit_slope_loglog(const std::vector<double>& ndof, const std::vector<double>& values, int k)
{
    if (k < 3)
        throw std::invalid_argument("fit_slope: window must hold at least 3 records");
    if (ndof.size() != values.size() || static_cast<int>(ndof.size()) < k)
        throw std::invalid_argument("fit_slope: not enough records");
    const int n = static_cast<int>(ndof.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = n - k; i < n; ++i) {
        if (!(ndof[i] > 0.0) || !(values[i] > 0.0))
            throw std::invalid_argument("fit_slope: records in the window must be positive");
        const double x = std::log(ndof[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = k * sxx - sx * sx;
    if (denom == 0.0)
        throw std::invalid_argument("fit_slope: degenerate abscissae");
    return (k * sxy - sx * sy) / denom;
}

std::vector<double> record_column(const std::vector<ConvergenceRecord>& records,
                                  const std::string& column)
{
    auto opt = [&](const std::optional<double>& v) {
        if (!v)
            throw std::invalid_argument("record_column: column '" + column +
                                        "' is absent for this run");
        return *v;
    };
    std::vector<double> out;
    out.reserve(records.size());
    for (const ConvergenceRecord& r : records) {
        if (column == "ndof")
            out.push_back(static_cast<double>(r.ndof));
        else if (column == "est_state")
            out.push_back(r.est_state);
        else if (column == "est_adjoint")
            out.push_back(r.est_adjoint);
        else if (column == "est_control")
            out.push_back(r.est_control);
        else if (column == "est_total")
            out.push_back(r.est_total);
        else if (column == "osc")
            out.push_back(r.osc);
        else if (column == "cost")
            out.push_back(r.cost);
        else if (column == "err_state_inf")
            out.push_back(opt(r.err_state_inf));
        else if (column == "err_adjoint")
            out.push_back(opt(r.err_adjoint));
        else if (column == "err_control")
            out.push_back(opt(r.err_control));
        else if (column == "err_total")
            out.push_back(opt(r.err_total));
        else if (column == "effectivity")
            out.push_back(opt(r.effectivity));
        else
            throw std::invalid_argument("record_column: unknown column '" + column + "'");
    }
    return out;
}

double fit_slope(const std::vector<ConvergenceRecord>& records, const std::string& column, int k)
{
    return fit_slope_loglog(record_column(records, "ndof"), record_column(records, column), k);
}

LoopResult run(const RunConfig& cfg)
{
    validate_config(cfg);
    ProblemSpec spec = make_example(cfg.example);
    spec.alpha = cfg.alpha;
    validate_problem(spec);

    Mesh mesh = build_initial_mesh(spec.domain, cfg.initial_subdivisions);
    mesh = prerefine_for_observations(mesh, spec.obs_points, cfg.prerefine_rounds);

    LoopConfig loop;
    loop.max_iterations = cfg.max_iters;
    loop.ndof_budget = cfg.ndof_budget;
    loop.strategy = marking_from_config(cfg);
    loop.uniform = cfg.uniform;
    loop.quad_degree = cfg.quad_degree;
    loop.error_subdiv_depth = cfg.error_subdiv_depth;
    loop.pdas.outer_tol = cfg.pdas_tol;
    loop.pdas.max_outer = cfg.pdas_max_outer;
    loop.pdas.linear_tol = cfg.cg_tol;
    loop.pdas.quad_degree = cfg.quad_degree;

    const LoopResult res = adaptive_loop(spec, mesh, loop);

    std::filesystem::create_directories(cfg.out);
    const auto path = [&](const std::string& name) {
        return (std::filesystem::path(cfg.out) / name).string();
    };
    write_convergence_csv(res.records, path("convergence.csv"));

    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "%04d", res.records.back().iteration);
    write_mesh_text(res.mesh, path(std::string("mesh_") + suffix + ".txt"));
    write_vtk(res.mesh,
              {{"state", &res.solution.state}, {"adjoint", &res.solution.adjoint}},
              {{"control", &res.solution.control}, {"multiplier", &res.solution.multiplier}},
              path(std::string("fields_") + suffix + ".vtk"));
    write_indicator_csv(res.indicators, path(std::string("indicators_") + suffix + ".csv"));

    std::ofstream slopes(path("slopes.txt"));
    if (!slopes)
        throw std::runtime_error("run: cannot open slopes.txt");
    const int k = std::min<int>(cfg.slope_window, static_cast<int>(res.records.size()));
    auto slope_line = [&](const std::string& column) {
        if (k >= 3) {
            try {
                slopes << column << " " << format_double(fit_slope(res.records, column, k))
                       << "\n";
                return;
            } catch (const std::invalid_argument&) {
                // fall through: column absent or nonpositive values
            }
        }
        slopes << column << " unavailable\n";
    };
    slope_line("est_total");
    slope_line("err_total");
    return res;
}

} // namespace ptoc
