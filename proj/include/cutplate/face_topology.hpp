#pragma once

#include <unordered_map>
#include <vector>

#include "cutplate/mesh.hpp"

namespace cutplate {

// Oriented mesh face (edge). The fixed unit normal points from tri_plus into
// tri_minus; for boundary faces it is the exterior normal of tri_plus.
struct Face {
    int v0 = -1, v1 = -1;        // v0 -> v1 is counter-clockwise within tri_plus
    int tri_plus = -1;           // first adjacent triangle
    int tri_minus = -1;          // second adjacent triangle, -1 on the boundary
    Vec2 normal = Vec2::Zero();  // unit, plus -> minus
    double length = 0.0;
    double h_f = 0.0;

    bool boundary() const { return tri_minus < 0; }
};

struct FaceTopology {
    std::vector<Face> faces;
    std::vector<std::array<int, 3>> triangle_faces;  // per triangle: local edges (0,1),(1,2),(2,0)
    int num_interior = 0;
    int num_boundary = 0;
    double mesh_size = 0.0;  // h = max_T h_T

    int num_faces() const { return static_cast<int>(faces.size()); }
};

// Enumerates faces deterministically: triangles in index order, local edges in
// order (0,1),(1,2),(2,0); the first triangle that touches an edge becomes
// tri_plus. This same enumeration fixes the edge-DOF numbering of FESpace.
inline FaceTopology build_face_topology(const Mesh& mesh) {
    FaceTopology topo;
    topo.triangle_faces.resize(mesh.num_triangles());
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(mesh.triangles.size() * 2);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            const auto key = detail::edge_key(a, b);
            auto it = index.find(key);
            if (it == index.end()) {
                Face f;
                f.v0 = a;
                f.v1 = b;
                f.tri_plus = t;
                index.emplace(key, static_cast<int>(topo.faces.size()));
                topo.triangle_faces[t][k] = static_cast<int>(topo.faces.size());
                topo.faces.push_back(f);
            } else {
                Face& f = topo.faces[it->second];
                if (f.tri_minus >= 0)
                    throw MeshError("face topology: non-manifold edge (3+ adjacent triangles)");
                f.tri_minus = t;
                topo.triangle_faces[t][k] = it->second;
            }
        }
    }

    for (Face& f : topo.faces) {
        const Vec2 d = mesh.vertices[f.v1] - mesh.vertices[f.v0];
        f.length = d.norm();
        f.normal = Vec2(d.y(), -d.x()) / f.length;  // outward of tri_plus
        if (f.boundary()) {
            f.h_f = mesh.area(f.tri_plus) / f.length;
            ++topo.num_boundary;
        } else {
            f.h_f = (mesh.area(f.tri_plus) + mesh.area(f.tri_minus)) / (2.0 * f.length);
            ++topo.num_interior;
        }
    }
    topo.mesh_size = mesh.max_diameter();
    return topo;
}

}  // namespace cutplate
