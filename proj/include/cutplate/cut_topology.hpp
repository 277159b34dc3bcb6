#pragma once

#include <algorithm>
#include <vector>

#include "cutplate/face_topology.hpp"

namespace cutplate {

struct CutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Piece of the beam inside one triangle, as a parameter interval of [p0,p1].
struct SubSegment {
    int triangle = -1;
    double s0 = 0.0, s1 = 0.0;
};

// Point where the beam crosses a mesh face, between two consecutive
// sub-segments.
struct CrossingPoint {
    double s = 0.0;
    int face = -1;
    int tri_before = -1;
    int tri_after = -1;
};

// Geometry of one beam cut through the background mesh: active elements, the
// ordered sub-segments covering [p0,p1], the crossing points, and the interior
// faces of the active mesh.
struct CutTopology {
    Vec2 p0 = Vec2::Zero(), p1 = Vec2::Zero();
    Vec2 tangent = Vec2::Zero();  // unit, p0 -> p1
    Vec2 normal = Vec2::Zero();   // tangent rotated +90 degrees
    double length = 0.0;
    std::vector<SubSegment> segments;
    std::vector<CrossingPoint> points;
    std::vector<int> active_elements;  // sorted
    std::vector<int> active_faces;     // interior faces with both neighbors active

    Vec2 at(double s) const { return p0 + s * (p1 - p0); }
};

inline CutTopology compute_cut_topology(const Mesh& mesh, const FaceTopology& topo,
                                        const Vec2& p0, const Vec2& p1) {
    CutTopology cut;
    cut.p0 = p0;
    cut.p1 = p1;
    const Vec2 d = p1 - p0;
    cut.length = d.norm();
    if (!(cut.length > 0.0)) throw CutError("cut topology: beam endpoints coincide");
    cut.tangent = d / cut.length;
    cut.normal = perp(cut.tangent);

    if (mesh.locate(p0) < 0 || mesh.locate(p1) < 0)
        throw CutError("cut topology: beam endpoint outside mesh");

    const double h = topo.mesh_size;
    const double merge_tol = 1e-10 * h / cut.length;  // parameter distance
    const double drop_tol = 1e-12 * h / cut.length;

    // candidate crossings: beam parameter + crossed face
    struct Hit {
        double s;
        int face;
    };
    std::vector<Hit> hits;
    for (int f = 0; f < topo.num_faces(); ++f) {
        const Face& face = topo.faces[f];
        const Vec2 a = mesh.vertices[face.v0];
        const Vec2 e = mesh.vertices[face.v1] - mesh.vertices[face.v0];
        const double denom = cross2(d, e);
        if (std::abs(cross2(cut.tangent, e / face.length)) <= 1e-12) {
            // parallel: reject only a genuine overlap of positive length
            if (std::abs(cross2(cut.tangent, a - p0)) <= 1e-12 * std::max(h, cut.length)) {
                const double sa = cut.tangent.dot(a - p0) / cut.length;
                const double sb = cut.tangent.dot(a + e - p0) / cut.length;
                const double lo = std::max(0.0, std::min(sa, sb));
                const double hi = std::min(1.0, std::max(sa, sb));
                if (hi - lo > drop_tol)
                    throw CutError("cut topology: beam is collinear with mesh face " +
                                   std::to_string(f) +
                                   " (intersection points must form a discrete set)");
            }
            continue;
        }
        const double s = cross2(a - p0, e) / denom;
        const double tau = cross2(a - p0, d) / denom;
        if (tau < -1e-10 || tau > 1.0 + 1e-10) continue;
        if (s <= merge_tol || s >= 1.0 - merge_tol) continue;  // endpoint touches are no breaks
        hits.push_back({s, f});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return a.s < b.s || (a.s == b.s && a.face < b.face);
    });

    // merge clusters (vertex crossings produce several nearby hits)
    struct Break {
        double s;
        int face;
    };
    std::vector<Break> breaks;
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i + 1;
        double s_sum = hits[i].s;
        int face = hits[i].face;
        bool face_interior = !topo.faces[face].boundary();
        while (j < hits.size() && hits[j].s - hits[j - 1].s <= merge_tol) {
            s_sum += hits[j].s;
            const bool interior = !topo.faces[hits[j].face].boundary();
            if ((interior && !face_interior) ||
                (interior == face_interior && hits[j].face < face)) {
                face = hits[j].face;
                face_interior = interior;
            }
            ++j;
        }
        breaks.push_back({s_sum / static_cast<double>(j - i), face});
        i = j;
    }

    // assemble sub-segments, dropping slivers below the length tolerance
    const auto build_segments = [&](const std::vector<Break>& bk) {
        std::vector<SubSegment> segs;
        double prev = 0.0;
        for (std::size_t i = 0; i <= bk.size(); ++i) {
            const double next = (i < bk.size()) ? bk[i].s : 1.0;
            segs.push_back({-1, prev, next});
            prev = next;
        }
        return segs;
    };

    for (bool changed = true; changed;) {
        changed = false;
        auto segs = build_segments(breaks);
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (segs[i].s1 - segs[i].s0 < drop_tol && !breaks.empty()) {
                // merge the sliver into its neighbor by removing a breakpoint
                const std::size_t kill = (i == 0) ? 0 : i - 1;
                breaks.erase(breaks.begin() + static_cast<std::ptrdiff_t>(kill));
                changed = true;
                break;
            }
        }
        if (!changed) {
            cut.segments = std::move(segs);
            break;
        }
    }

    for (auto& seg : cut.segments) {
        const Vec2 mid = cut.at(0.5 * (seg.s0 + seg.s1));
        seg.triangle = mesh.locate(mid);
        if (seg.triangle < 0) throw CutError("cut topology: beam leaves the mesh");
    }

    // a breakpoint that does not change the triangle is spurious; merge it away
    for (std::size_t i = 0; i + 1 < cut.segments.size();) {
        if (cut.segments[i].triangle == cut.segments[i + 1].triangle) {
            cut.segments[i].s1 = cut.segments[i + 1].s1;
            cut.segments.erase(cut.segments.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            breaks.erase(breaks.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }

    cut.points.reserve(breaks.size());
    for (std::size_t i = 0; i < breaks.size(); ++i)
        cut.points.push_back({breaks[i].s, breaks[i].face, cut.segments[i].triangle,
                              cut.segments[i + 1].triangle});

    cut.active_elements.reserve(cut.segments.size());
    for (const auto& seg : cut.segments) cut.active_elements.push_back(seg.triangle);
    std::sort(cut.active_elements.begin(), cut.active_elements.end());
    cut.active_elements.erase(
        std::unique(cut.active_elements.begin(), cut.active_elements.end()),
        cut.active_elements.end());

    for (int f = 0; f < topo.num_faces(); ++f) {
        const Face& face = topo.faces[f];
        if (face.boundary()) continue;
        if (std::binary_search(cut.active_elements.begin(), cut.active_elements.end(),
                               face.tri_plus) &&
            std::binary_search(cut.active_elements.begin(), cut.active_elements.end(),
                               face.tri_minus))
            cut.active_faces.push_back(f);
    }
    return cut;
}

}  // namespace cutplate
