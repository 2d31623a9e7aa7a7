#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ptoc/adapt.hpp"
#include "ptoc/estimator.hpp"
#include "ptoc/fem.hpp"
#include "ptoc/mesh.hpp"

namespace ptoc {

/// Full-precision (17 significant digits) formatting used by every writer.
std::string format_double(double v);

using NamedNodeFields = std::vector<std::pair<std::string, const P1Field*>>;
using NamedCellFields = std::vector<std::pair<std::string, const P0Field*>>;

/// Legacy-VTK unstructured grid with optional point/cell scalars.
void write_vtk(const Mesh& mesh, const NamedNodeFields& node_fields,
               const NamedCellFields& cell_fields, const std::string& path);

/// Per-element indicator table: element id, the three components, combined.
void write_indicator_csv(const IndicatorField& indicators, const std::string& path);

void write_convergence_csv(const std::vector<ConvergenceRecord>& records, const std::string& path);

} // namespace ptoc
