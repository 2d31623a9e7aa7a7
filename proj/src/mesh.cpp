#include "ptoc/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ptoc {

namespace {

double signed_area(Point2 a, Point2 b, Point2 c)
{
    return 0.5 * cross(b - a, c - a);
}

std::array<double, 3> barycentric(const std::array<Point2, 3>& p, Point2 x)
{
    const double a = signed_area(p[0], p[1], p[2]);
    return {signed_area(x, p[1], p[2]) / a,
            signed_area(p[0], x, p[2]) / a,
            signed_area(p[0], p[1], x) / a};
}

// Longest edge of (p0,p1,p2); ties resolved by the smallest opposite-vertex
// global id.  Edge k is opposite vertex k.
int pick_refinement_edge(const std::array<Point2, 3>& p, const std::array<int, 3>& verts)
{
    std::array<double, 3> len{};
    for (int k = 0; k < 3; ++k)
        len[k] = dist(p[(k + 1) % 3], p[(k + 2) % 3]);
    const double max_len = std::max({len[0], len[1], len[2]});
    int best = -1;
    for (int k = 0; k < 3; ++k) {
        if (len[k] < max_len * (1.0 - 1e-12))
            continue;
        if (best < 0 || verts[k] < verts[best])
            best = k;
    }
    return best;
}

} // namespace

int Mesh::num_interior_vertices() const
{
    int n = 0;
    for (char b : boundary_vertex)
        if (!b)
            ++n;
    return n;
}

double Mesh::element_area(int t) const
{
    const auto p = element_points(t);
    return signed_area(p[0], p[1], p[2]);
}

double Mesh::element_diameter(int t) const
{
    const auto p = element_points(t);
    return std::max({dist(p[0], p[1]), dist(p[1], p[2]), dist(p[2], p[0])});
}

Point2 Mesh::element_barycenter(int t) const
{
    const auto p = element_points(t);
    return {(p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0};
}

std::vector<Point2> domain_boundary_polygon(Domain d)
{
    switch (d) {
    case Domain::UnitSquare:
        return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    case Domain::LShape:
        return {{-1, -1}, {0, -1}, {0, 0}, {1, 0}, {1, 1}, {-1, 1}};
    }
    throw std::invalid_argument("unknown domain");
}

double domain_boundary_distance(Domain d, Point2 p)
{
    const auto poly = domain_boundary_polygon(d);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        best = std::min(best, segment_distance(p, a, b));
    }
    return best;
}

double domain_area(Domain d)
{
    return d == Domain::UnitSquare ? 1.0 : 3.0;
}

Mesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> elements)
{
    Mesh m;
    m.vertices = std::move(vertices);
    m.elements = std::move(elements);
    const int nv = m.num_vertices();
    const int ne = m.num_elements();

    m.element_sides.assign(ne, {-1, -1, -1});
    m.refinement_edge.assign(ne, -1);
    m.vertex_element.assign(nv, -1);

    std::map<std::pair<int, int>, int> side_of_edge;
    for (int t = 0; t < ne; ++t) {
        for (int k = 0; k < 3; ++k) {
            const int v = m.elements[t][k];
            if (v < 0 || v >= nv)
                throw std::runtime_error("make_mesh: vertex id out of range");
            if (m.vertex_element[v] < 0)
                m.vertex_element[v] = t;
        }
        if (m.element_area(t) <= 0.0)
            throw std::runtime_error("make_mesh: element with nonpositive area");
        for (int k = 0; k < 3; ++k) {
            const int a = m.elements[t][(k + 1) % 3];
            const int b = m.elements[t][(k + 2) % 3];
            const auto key = std::minmax(a, b);
            auto it = side_of_edge.find(key);
            if (it == side_of_edge.end()) {
                Side s;
                s.v0 = key.first;
                s.v1 = key.second;
                s.left = t;
                side_of_edge.emplace(key, static_cast<int>(m.sides.size()));
                m.element_sides[t][k] = static_cast<int>(m.sides.size());
                m.sides.push_back(s);
            } else {
                Side& s = m.sides[it->second];
                if (s.right != -1)
                    throw std::runtime_error("make_mesh: edge shared by more than two elements");
                s.right = t;
                m.element_sides[t][k] = it->second;
            }
        }
        m.refinement_edge[t] = pick_refinement_edge(m.element_points(t), m.elements[t]);
    }

    m.boundary_vertex.assign(nv, 0);
    for (const Side& s : m.sides) {
        if (s.right == -1) {
            m.boundary_vertex[s.v0] = 1;
            m.boundary_vertex[s.v1] = 1;
        }
    }
    return m;
}

Mesh build_initial_mesh(Domain domain, int subdivisions)
{
    if (subdivisions < 1)
        throw std::invalid_argument("build_initial_mesh: subdivisions must be >= 1");
    const int s = subdivisions;

    std::vector<Point2> verts;
    std::vector<std::array<int, 3>> tris;

    // Lattice extent and inclusion predicate per domain.  Cells are indexed by
    // their lower-left grid corner.
    const int n = (domain == Domain::UnitSquare) ? s : 2 * s;
    const double x0 = (domain == Domain::UnitSquare) ? 0.0 : -1.0;
    const double h = 1.0 / s;
    auto grid_included = [&](int i, int j) {
        if (domain == Domain::UnitSquare)
            return true;
        return i <= s || j >= s;  // x <= 0 or y >= 0
    };
    auto cell_included = [&](int i, int j) {
        if (domain == Domain::UnitSquare)
            return true;
        return i + 1 <= s || j >= s;
    };

    std::map<std::pair<int, int>, int> grid_id;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (grid_included(i, j)) {
                grid_id[{i, j}] = static_cast<int>(verts.size());
                verts.push_back({x0 + i * h, x0 + j * h});
            }

    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (!cell_included(i, j))
                continue;
            const int c = static_cast<int>(verts.size());
            verts.push_back({x0 + (i + 0.5) * h, x0 + (j + 0.5) * h});
            const int g00 = grid_id.at({i, j});
            const int g10 = grid_id.at({i + 1, j});
            const int g11 = grid_id.at({i + 1, j + 1});
            const int g01 = grid_id.at({i, j + 1});
            tris.push_back({g00, g10, c});
            tris.push_back({g10, g11, c});
            tris.push_back({g11, g01, c});
            tris.push_back({g01, g00, c});
        }

    return make_mesh(std::move(verts), std::move(tris));
}

void validate_mesh(const Mesh& m)
{
    for (int t = 0; t < m.num_elements(); ++t) {
        if (m.element_area(t) <= 0.0)
            throw std::runtime_error("validate_mesh: nonpositive element area");
        for (int k = 0; k < 3; ++k) {
            const int s = m.element_sides[t][k];
            const Side& side = m.sides[s];
            if (side.left != t && side.right != t)
                throw std::runtime_error("validate_mesh: element/side link broken");
            const int a = m.elements[t][(k + 1) % 3];
            const int b = m.elements[t][(k + 2) % 3];
            if (std::min(a, b) != side.v0 || std::max(a, b) != side.v1)
                throw std::runtime_error("validate_mesh: side endpoints disagree");
        }
        const int e = m.refinement_edge[t];
        const auto p = m.element_points(t);
        const double len = dist(p[(e + 1) % 3], p[(e + 2) % 3]);
        if (len < m.element_diameter(t) * (1.0 - 1e-12))
            throw std::runtime_error("validate_mesh: refinement edge is not a longest edge");
    }
    for (const Side& s : m.sides) {
        const bool boundary = (s.right == -1);
        if (boundary && (!m.boundary_vertex[s.v0] || !m.boundary_vertex[s.v1]))
            throw std::runtime_error("validate_mesh: boundary flag missing");
    }
}

std::vector<ElementGeometry> compute_geometry(const Mesh& mesh, const std::vector<Point2>& obs)
{
    std::vector<ElementGeometry> geo(mesh.num_elements());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto p = mesh.element_points(t);
        ElementGeometry g;
        g.diameter = mesh.element_diameter(t);
        g.area = mesh.element_area(t);
        g.barycenter = mesh.element_barycenter(t);
        if (obs.empty()) {
            g.d_obs = std::numeric_limits<double>::infinity();
        } else {
            // max_x over a triangle of |x - z| is attained at a vertex
            double dmin = std::numeric_limits<double>::infinity();
            for (const Point2& z : obs) {
                const double far = std::max({dist(p[0], z), dist(p[1], z), dist(p[2], z)});
                dmin = std::min(dmin, far);
            }
            g.d_obs = dmin;
        }
        geo[t] = g;
    }
    return geo;
}

PatchIndex build_patches(const Mesh& mesh)
{
    std::vector<std::vector<int>> incident(mesh.num_vertices());
    for (int t = 0; t < mesh.num_elements(); ++t)
        for (int v : mesh.elements[t])
            incident[v].push_back(t);

    PatchIndex patches(mesh.num_elements());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        std::vector<int>& p = patches[t];
        for (int v : mesh.elements[t])
            p.insert(p.end(), incident[v].begin(), incident[v].end());
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    return patches;
}

std::vector<int> elements_containing(const Mesh& mesh, Point2 p)
{
    std::vector<int> out;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto b = barycentric(mesh.element_points(t), p);
        if (b[0] >= -1e-12 && b[1] >= -1e-12 && b[2] >= -1e-12)
            out.push_back(t);
    }
    return out;
}

std::vector<int> patch_violations(const Mesh& mesh, const std::vector<Point2>& obs)
{
    const PatchIndex patches = build_patches(mesh);
    std::vector<int> count(mesh.num_elements(), 0);
    std::vector<int> last(mesh.num_elements(), -1);
    for (std::size_t zi = 0; zi < obs.size(); ++zi) {
        // an element sees z iff its patch contains an element whose closure
        // contains z; patches are symmetric, so expand around the containers
        for (int holder : elements_containing(mesh, obs[zi])) {
            for (int t : patches[holder]) {
                if (last[t] != static_cast<int>(zi)) {
                    last[t] = static_cast<int>(zi);
                    ++count[t];
                }
            }
        }
    }
    std::vector<int> bad;
    for (int t = 0; t < mesh.num_elements(); ++t)
        if (count[t] > 1)
            bad.push_back(t);
    return bad;
}

bool check_patch_assumption(const Mesh& mesh, const std::vector<Point2>& obs)
{
    return patch_violations(mesh, obs).empty();
}

namespace {

// Mutable scratch state for longest-edge bisection with conformity closure.
struct RefineScratch {
    std::vector<Point2> verts;
    std::vector<std::array<int, 3>> tris;
    std::vector<std::array<int, 3>> nbr;  // neighbor across edge k (opposite vertex k)
    std::vector<int> refedge;
    std::vector<int> root;  // ancestor element id in the input mesh
    std::vector<char> alive;
    std::map<std::pair<int, int>, int> midpoint;
    long steps = 0;

    int midpoint_of(int a, int b)
    {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end())
            return it->second;
        const int id = static_cast<int>(verts.size());
        verts.push_back(ptoc::midpoint(verts[a], verts[b]));
        midpoint.emplace(key, id);
        return id;
    }

    int local_edge_to(int t, int other) const
    {
        for (int k = 0; k < 3; ++k)
            if (nbr[t][k] == other)
                return k;
        throw std::runtime_error("refine: adjacency out of sync");
    }

    void replace_neighbor(int t, int from, int to)
    {
        if (t == -1)
            return;
        nbr[t][local_edge_to(t, from)] = to;
    }

    int push_child(const std::array<int, 3>& v, const std::array<int, 3>& n, int root_id)
    {
        const int id = static_cast<int>(tris.size());
        tris.push_back(v);
        nbr.push_back(n);
        std::array<Point2, 3> pts{verts[v[0]], verts[v[1]], verts[v[2]]};
        refedge.push_back(pick_refinement_edge(pts, v));
        root.push_back(root_id);
        alive.push_back(1);
        return id;
    }

    // Bisect t through its refinement edge; the caller guarantees the
    // neighbor across that edge (if any) is split in the same step.  Returns
    // {child holding v_i, child holding v_j}; slot 0 of each child (the half
    // of the split edge) is wired afterwards.
    std::pair<int, int> split_one(int t, int m)
    {
        const int e = refedge[t];
        const int i = (e + 1) % 3, j = (e + 2) % 3;
        const int vk = tris[t][e], vi = tris[t][i], vj = tris[t][j];
        const int qi = nbr[t][i], qj = nbr[t][j];
        alive[t] = 0;
        const int c1 = push_child({vk, vi, m}, {-1, -1, qj}, root[t]);
        const int c2 = push_child({vk, m, vj}, {-1, qi, c1}, root[t]);
        nbr[c1][1] = c2;
        replace_neighbor(qj, t, c1);
        replace_neighbor(qi, t, c2);
        return {c1, c2};
    }

    void split_pair(int t, int n)
    {
        const int e = refedge[t];
        const int vi = tris[t][(e + 1) % 3], vj = tris[t][(e + 2) % 3];
        const int m = midpoint_of(vi, vj);
        const auto [c1, c2] = split_one(t, m);
        if (n == -1) {
            nbr[c1][0] = -1;
            nbr[c2][0] = -1;
            return;
        }
        const auto [d1, d2] = split_one(n, m);  // d1 holds vj, d2 holds vi
        nbr[c1][0] = d2;
        nbr[d2][0] = c1;
        nbr[c2][0] = d1;
        nbr[d1][0] = c2;
    }

    // Iterative closure: keep refining the neighbor across the refinement
    // edge until it shares that edge as its own refinement edge.
    void ensure_bisected(int t0)
    {
        std::vector<int> stack{t0};
        while (!stack.empty()) {
            if (++steps > 200 * static_cast<long>(tris.size()) + 1000)
                throw std::runtime_error("refine: conformity closure did not terminate");
            const int t = stack.back();
            if (!alive[t]) {
                stack.pop_back();
                continue;
            }
            const int n = nbr[t][refedge[t]];
            if (n != -1 && refedge[n] != local_edge_to(n, t)) {
                stack.push_back(n);
                continue;
            }
            split_pair(t, n);
            stack.pop_back();
        }
    }
};

} // namespace

Mesh refine(const Mesh& mesh, const std::vector<int>& marked, std::vector<int>& ancestor)
{
    RefineScratch rs;
    rs.verts = mesh.vertices;
    rs.tris = mesh.elements;
    rs.refedge = mesh.refinement_edge;
    rs.alive.assign(mesh.num_elements(), 1);
    rs.root.resize(mesh.num_elements());
    rs.nbr.assign(mesh.num_elements(), {-1, -1, -1});
    for (int t = 0; t < mesh.num_elements(); ++t) {
        rs.root[t] = t;
        for (int k = 0; k < 3; ++k) {
            const Side& s = mesh.sides[mesh.element_sides[t][k]];
            rs.nbr[t][k] = (s.left == t) ? s.right : s.left;
        }
    }

    std::vector<int> order(marked);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    for (int t : order) {
        if (t < 0 || t >= mesh.num_elements())
            throw std::invalid_argument("refine: marked element id out of range");
        if (rs.alive[t])  // may already have been split by closure
            rs.ensure_bisected(t);
    }

    // Emit survivors grouped by their input-mesh ancestor, ancestors in id
    // order: descendants take over their parent's rank, so an element that
    // was the lowest-id carrier of some point keeps that role after a split.
    std::vector<std::vector<int>> by_root(mesh.num_elements());
    for (std::size_t t = 0; t < rs.tris.size(); ++t)
        if (rs.alive[t])
            by_root[rs.root[t]].push_back(static_cast<int>(t));

    std::vector<std::array<int, 3>> tris;
    ancestor.clear();
    for (int r = 0; r < mesh.num_elements(); ++r)
        for (int t : by_root[r]) {
            tris.push_back(rs.tris[t]);
            ancestor.push_back(r);
        }
    return make_mesh(std::move(rs.verts), std::move(tris));
}

Mesh refine(const Mesh& mesh, const std::vector<int>& marked)
{
    std::vector<int> ancestor;
    return refine(mesh, marked, ancestor);
}

Mesh prerefine_for_observations(const Mesh& mesh, const std::vector<Point2>& obs, int max_rounds)
{
    Mesh m = mesh;
    for (int round = 0; round < max_rounds; ++round) {
        const std::vector<int> bad = patch_violations(m, obs);
        if (bad.empty())
            return m;
        m = refine(m, bad);
    }
    if (patch_violations(m, obs).empty())
        return m;
    throw std::runtime_error("prerefine_for_observations: patch condition still violated after max_rounds");
}

std::optional<PointLocation> locate_point(const Mesh& mesh, Point2 p, double tol)
{
    // nearest vertex as the walk seed
    int seed = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const double d = dist(mesh.vertices[v], p);
        if (d < best) {
            best = d;
            seed = v;
        }
    }

    int t = mesh.vertex_element[seed];
    for (int step = 0; step <= mesh.num_elements() && t != -1; ++step) {
        const auto b = barycentric(mesh.element_points(t), p);
        const int worst = static_cast<int>(std::min_element(b.begin(), b.end()) - b.begin());
        if (b[worst] >= -tol)
            return PointLocation{t, b};
        const Side& s = mesh.sides[mesh.element_sides[t][worst]];
        t = (s.left == t) ? s.right : s.left;
    }

    // walk left the mesh (or cycled): exhaustive fallback
    int arg = -1;
    double best_min = -std::numeric_limits<double>::infinity();
    std::array<double, 3> arg_b{};
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto b = barycentric(mesh.element_points(e), p);
        const double mn = std::min({b[0], b[1], b[2]});
        if (mn > best_min) {
            best_min = mn;
            arg = e;
            arg_b = b;
        }
    }
    if (arg >= 0 && best_min >= -tol)
        return PointLocation{arg, arg_b};
    return std::nullopt;
}

void write_mesh_text(const Mesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_mesh_text: cannot open " + path);
    out << mesh.num_vertices() << " " << mesh.num_elements() << "\n";
    char buf[80];
    for (const Point2& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        out << buf;
    }
    for (const auto& e : mesh.elements)
        out << e[0] << " " << e[1] << " " << e[2] << "\n";
}

Mesh read_mesh_text(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_mesh_text: cannot open " + path);
    int nv = 0, ne = 0;
    if (!(in >> nv >> ne))
        throw std::runtime_error("read_mesh_text: bad header");
    std::vector<Point2> verts(nv);
    for (Point2& v : verts)
        if (!(in >> v.x >> v.y))
            throw std::runtime_error("read_mesh_text: bad vertex line");
    std::vector<std::array<int, 3>> tris(ne);
    for (auto& t : tris)
        if (!(in >> t[0] >> t[1] >> t[2]))
            throw std::runtime_error("read_mesh_text: bad element line");
    return make_mesh(std::move(verts), std::move(tris));
}

} // namespace ptoc
