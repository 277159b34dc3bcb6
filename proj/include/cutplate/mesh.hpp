#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cutplate/geometry.hpp"

namespace cutplate {

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Conforming triangulation of a polygonal domain. Triangles are stored
// counter-clockwise; construction helpers enforce this.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    double area(int t) const {
        const auto& tri = triangles[t];
        return triangle_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    }

    // h_T: longest edge of triangle t.
    double diameter(int t) const {
        const auto& tri = triangles[t];
        const Vec2& a = vertices[tri[0]];
        const Vec2& b = vertices[tri[1]];
        const Vec2& c = vertices[tri[2]];
        return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    }

    // h = max_T h_T.
    double max_diameter() const {
        double h = 0.0;
        for (int t = 0; t < num_triangles(); ++t) h = std::max(h, diameter(t));
        return h;
    }

    // Index of a triangle containing p (barycentric tolerance), lowest index
    // wins ties; -1 if p lies outside the mesh.
    int locate(const Vec2& p, double tol = 1e-12) const {
        for (int t = 0; t < num_triangles(); ++t) {
            const auto& tri = triangles[t];
            const auto lambda =
                barycentric(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]], p);
            if (barycentric_inside(lambda, tol)) return t;
        }
        return -1;
    }
};

// Quality metrics reported by validate_mesh.
struct MeshQuality {
    double max_radius_ratio = 0.0;  // circumradius / inradius, worst triangle
    double min_area = std::numeric_limits<double>::max();
    double max_diameter = 0.0;
};

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace detail

// Validates the Mesh invariants: positive areas, conforming edges (at most two
// adjacent triangles), no duplicated triangles. Returns quality metrics.
inline MeshQuality validate_mesh(const Mesh& mesh) {
    if (mesh.vertices.empty() || mesh.triangles.empty())
        throw MeshError("mesh validation: empty mesh");
    for (const Vec2& v : mesh.vertices)
        if (!v.allFinite()) throw MeshError("mesh validation: non-finite vertex coordinate");

    MeshQuality q;
    const int nv = mesh.num_vertices();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= nv)
                throw MeshError("mesh validation: vertex index out of range in triangle " +
                                std::to_string(t));
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0])
            throw MeshError("mesh validation: repeated vertex in triangle " + std::to_string(t));

        const Vec2& a = mesh.vertices[tri[0]];
        const Vec2& b = mesh.vertices[tri[1]];
        const Vec2& c = mesh.vertices[tri[2]];
        const double area = triangle_area(a, b, c);
        const double scale = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        if (!(area > 1e-14 * scale * scale))
            throw MeshError("mesh validation: degenerate or negatively oriented triangle " +
                            std::to_string(t));

        const double la = (c - b).norm(), lb = (a - c).norm(), lc = (b - a).norm();
        const double s = 0.5 * (la + lb + lc);
        const double inradius = area / s;
        const double circumradius = la * lb * lc / (4.0 * area);
        q.max_radius_ratio = std::max(q.max_radius_ratio, circumradius / inradius);
        q.min_area = std::min(q.min_area, area);
        q.max_diameter = std::max(q.max_diameter, scale);
    }

    // Conformity: an edge may be shared by at most two triangles, and a pair of
    // triangles may share at most one edge.
    std::unordered_map<std::uint64_t, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const int count = ++edge_count[detail::edge_key(tri[k], tri[(k + 1) % 3])];
            if (count > 2) throw MeshError("mesh validation: non-manifold edge");
        }
    return q;
}

// Structured triangulation of the unit square: (n+1)^2 vertices, 2n^2
// triangles, each grid cell split by the diagonal from its lower-left to
// upper-right corner.
inline Mesh generate_structured_unit_square(int n) {
    if (n < 1) throw MeshError("generate_structured_unit_square: n must be >= 1");
    Mesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

    const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int ll = vid(i, j), lr = vid(i + 1, j);
            const int ur = vid(i + 1, j + 1), ul = vid(i, j + 1);
            mesh.triangles.push_back({ll, lr, ur});
            mesh.triangles.push_back({ll, ur, ul});
        }
    return mesh;
}

// Parses the ASCII mesh format: line 1 "nv nt"; nv lines "x y"; nt lines
// "i j k" (0-based). '#' starts a comment. Clockwise triangles are reoriented;
// degenerate ones are rejected by validation.
inline Mesh load_mesh(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    const auto next_tokens = [&](int expected) {
        std::vector<double> values;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            double v;
            while (ls >> v) values.push_back(v);
            if (!ls.eof()) {
                std::string junk;
                ls.clear();
                ls >> junk;
                throw MeshError("mesh parse error, line " + std::to_string(lineno) +
                                ": unexpected token '" + junk + "'");
            }
            if (!values.empty()) break;
        }
        if (static_cast<int>(values.size()) != expected)
            throw MeshError("mesh parse error, line " + std::to_string(lineno) + ": expected " +
                            std::to_string(expected) + " values");
        return values;
    };

    const auto header = next_tokens(2);
    const int nv = static_cast<int>(header[0]);
    const int nt = static_cast<int>(header[1]);
    if (nv < 3 || nt < 1) throw MeshError("mesh parse error: header counts out of range");

    Mesh mesh;
    mesh.vertices.reserve(nv);
    for (int i = 0; i < nv; ++i) {
        const auto xy = next_tokens(2);
        mesh.vertices.emplace_back(xy[0], xy[1]);
    }
    mesh.triangles.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const auto ijk = next_tokens(3);
        std::array<int, 3> tri = {static_cast<int>(ijk[0]), static_cast<int>(ijk[1]),
                                  static_cast<int>(ijk[2])};
        for (int k = 0; k < 3; ++k)
            if (ijk[k] != tri[k])
                throw MeshError("mesh parse error, line " + std::to_string(lineno) +
                                ": non-integer vertex index");
        // normalize orientation to counter-clockwise
        if (tri[0] >= 0 && tri[1] >= 0 && tri[2] >= 0 && tri[0] < nv && tri[1] < nv &&
            tri[2] < nv) {
            if (orient2d(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) <
                0.0)
                std::swap(tri[1], tri[2]);
        }
        mesh.triangles.push_back(tri);
    }
    validate_mesh(mesh);
    return mesh;
}

}  // namespace cutplate
