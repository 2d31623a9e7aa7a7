#include "ptoc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ptoc {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_vtk(const Mesh& mesh, const NamedNodeFields& node_fields,
               const NamedCellFields& cell_fields, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_vtk: cannot open " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "triangulation\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Point2& v : mesh.vertices)
        out << format_double(v.x) << " " << format_double(v.y) << " 0\n";
    out << "CELLS " << mesh.num_elements() << " " << 4 * mesh.num_elements() << "\n";
    for (const auto& e : mesh.elements)
        out << "3 " << e[0] << " " << e[1] << " " << e[2] << "\n";
    out << "CELL_TYPES " << mesh.num_elements() << "\n";
    for (int t = 0; t < mesh.num_elements(); ++t)
        out << "5\n";

    if (!node_fields.empty()) {
        out << "POINT_DATA " << mesh.num_vertices() << "\n";
        for (const auto& [name, field] : node_fields) {
            out << "SCALARS " << name << " double 1\n";
            out << "LOOKUP_TABLE default\n";
            for (double v : field->values)
                out << format_double(v) << "\n";
        }
    }
    if (!cell_fields.empty()) {
        out << "CELL_DATA " << mesh.num_elements() << "\n";
        for (const auto& [name, field] : cell_fields) {
            out << "SCALARS " << name << " double 1\n";
            out << "LOOKUP_TABLE default\n";
            for (double v : field->values)
                out << format_double(v) << "\n";
        }
    }
}

void write_indicator_csv(const IndicatorField& indicators, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_indicator_csv: cannot open " + path);
    out << "element,est_state,est_adjoint,est_control,combined\n";
    for (std::size_t t = 0; t < indicators.combined_sq.size(); ++t) {
        out << t << "," << format_double(indicators.state[t]) << ","
            << format_double(indicators.adjoint[t]) << ","
            << format_double(indicators.control[t]) << ","
            << format_double(std::sqrt(indicators.combined_sq[t])) << "\n";
    }
}

void write_convergence_csv(const std::vector<ConvergenceRecord>& records, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_convergence_csv: cannot open " + path);
    out << "iteration,ndof,elements,est_state,est_adjoint,est_control,est_total,osc,log_factor,"
           "err_state_inf,err_adjoint,err_control,err_total,effectivity,cost\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const ConvergenceRecord& r : records) {
        out << r.iteration << "," << r.ndof << "," << r.elements << ","
            << format_double(r.est_state) << "," << format_double(r.est_adjoint) << ","
            << format_double(r.est_control) << "," << format_double(r.est_total) << ","
            << format_double(r.osc) << "," << format_double(r.log_factor) << ","
            << opt(r.err_state_inf) << "," << opt(r.err_adjoint) << "," << opt(r.err_control)
            << "," << opt(r.err_total) << "," << opt(r.effectivity) << ","
            << format_double(r.cost) << "\n";
    }
}

} // namespace ptoc
