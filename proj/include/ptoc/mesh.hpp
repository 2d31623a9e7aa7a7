#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ptoc/geometry.hpp"

namespace ptoc {

enum class Domain { UnitSquare, LShape };

/// Corners of the polygonal domain, counter-clockwise.
std::vector<Point2> domain_boundary_polygon(Domain d);
/// Distance from p to the boundary of the domain polygon.
double domain_boundary_distance(Domain d, Point2 p);
double domain_area(Domain d);

struct Side {
    int v0 = -1, v1 = -1;  // endpoint vertex ids, v0 < v1
    int left = -1;         // first incident element
    int right = -1;        // second incident element, -1 on the boundary
};

/// Conforming triangle mesh.  Everything below `vertices`/`elements` is
/// derived connectivity rebuilt by make_mesh(); treat instances as immutable.
struct Mesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> elements;  // vertex ids, counter-clockwise
    std::vector<Side> sides;
    std::vector<std::array<int, 3>> element_sides;  // side opposite local vertex k
    std::vector<char> boundary_vertex;
    std::vector<int> refinement_edge;  // local edge index (edge k is opposite vertex k)
    std::vector<int> vertex_element;   // one incident element per vertex

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }
    int num_interior_vertices() const;

    std::array<Point2, 3> element_points(int t) const
    {
        const auto& e = elements[t];
        return {vertices[e[0]], vertices[e[1]], vertices[e[2]]};
    }
    double element_area(int t) const;
    double element_diameter(int t) const;  // longest edge
    Point2 element_barycenter(int t) const;
    double side_length(int s) const { return dist(vertices[sides[s].v0], vertices[sides[s].v1]); }
};

/// Build the derived connectivity for a vertex/element soup and validate it
/// (positive areas, at most two elements per edge).
Mesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> elements);

/// Criss-cross initial mesh: each grid cell is split into four triangles by
/// its center.  `subdivisions` is the number of cells per unit length.
Mesh build_initial_mesh(Domain domain, int subdivisions);

/// Structural invariants (orientation, side bookkeeping, boundary flags).
/// Throws std::runtime_error on violation.
void validate_mesh(const Mesh& mesh);

struct ElementGeometry {
    double diameter = 0.0;  // longest edge
    double area = 0.0;
    double d_obs = 0.0;  // min over observation points of the farthest point of the element
    Point2 barycenter;
};

/// Per-element geometric data.  With no observation points d_obs is +inf.
std::vector<ElementGeometry> compute_geometry(const Mesh& mesh, const std::vector<Point2>& obs);

/// patches[t] = ids of elements sharing at least one vertex with t (including t).
using PatchIndex = std::vector<std::vector<int>>;
PatchIndex build_patches(const Mesh& mesh);

/// All elements whose closure contains p (points on shared sides/vertices
/// belong to every incident element).
std::vector<int> elements_containing(const Mesh& mesh, Point2 p);

/// True iff every element's vertex patch meets at most one observation point.
bool check_patch_assumption(const Mesh& mesh, const std::vector<Point2>& obs);
/// Elements violating the patch condition (patch meets >= 2 observation points).
std::vector<int> patch_violations(const Mesh& mesh, const std::vector<Point2>& obs);

/// Longest-edge bisection of the marked elements plus recursive conformity
/// closure.  Unaffected elements are carried over unchanged.
Mesh refine(const Mesh& mesh, const std::vector<int>& marked);
/// Same, also reporting for each new element its ancestor in the input mesh.
Mesh refine(const Mesh& mesh, const std::vector<int>& marked, std::vector<int>& ancestor);

/// Refine until the patch condition holds; throws if max_rounds is exceeded.
Mesh prerefine_for_observations(const Mesh& mesh, const std::vector<Point2>& obs, int max_rounds);

struct PointLocation {
    int element = -1;
    std::array<double, 3> bary{};  // barycentric coordinates w.r.t. element vertices
};

/// Locate a point by walking from the nearest vertex; falls back to a full
/// scan near the boundary.  Empty result if p lies outside the mesh.
std::optional<PointLocation> locate_point(const Mesh& mesh, Point2 p, double tol = 1e-12);

void write_mesh_text(const Mesh& mesh, const std::string& path);
Mesh read_mesh_text(const std::string& path);

} // namespace ptoc
