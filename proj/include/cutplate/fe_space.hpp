#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cutplate/face_topology.hpp"
#include "cutplate/quadrature.hpp"

namespace cutplate {

struct FemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BasisEval {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Mat2 hess = Mat2::Zero();
};

using FieldCoefficients = Eigen::VectorXd;

namespace detail {

// Lagrange basis on the reference triangle, expressed in the monomial basis.
// Node order: vertices (0,0),(1,0),(0,1); then k-1 nodes per local edge
// (0,1),(1,2),(2,0) walking from the first vertex; then interior nodes.
struct ReferenceBasis {
    int degree = 0;
    int size = 0;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 2>> monomials;  // exponents (a,b)
    Eigen::MatrixXd coeffs;                     // coeffs(m,i): monomial m in basis i

    explicit ReferenceBasis(int k) : degree(k) {
        const Vec2 corners[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
        for (const auto& c : corners) nodes.push_back(c);
        const int local_edges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (const auto& e : local_edges)
            for (int i = 1; i < k; ++i)
                nodes.push_back(corners[e[0]] +
                                (static_cast<double>(i) / k) * (corners[e[1]] - corners[e[0]]));
        if (k == 3) nodes.emplace_back(1.0 / 3.0, 1.0 / 3.0);
        if (k > 3)
            for (int a = 1; a < k; ++a)
                for (int b = 1; a + b < k; ++b)
                    nodes.emplace_back(static_cast<double>(a) / k, static_cast<double>(b) / k);
        size = static_cast<int>(nodes.size());

        for (int d = 0; d <= k; ++d)
            for (int a = d; a >= 0; --a) monomials.push_back({a, d - a});

        Eigen::MatrixXd vandermonde(size, size);
        for (int i = 0; i < size; ++i)
            for (int m = 0; m < size; ++m)
                vandermonde(i, m) = std::pow(nodes[i].x(), monomials[m][0]) *
                                    std::pow(nodes[i].y(), monomials[m][1]);
        coeffs = vandermonde.fullPivLu().inverse();
    }

    static double mono_deriv(double x, double y, int a, int b, int dx, int dy) {
        if (a < dx || b < dy) return 0.0;
        double c = 1.0;
        for (int i = 0; i < dx; ++i) c *= a - i;
        for (int i = 0; i < dy; ++i) c *= b - i;
        return c * std::pow(x, a - dx) * std::pow(y, b - dy);
    }

    // value, gradient, Hessian of every basis function at a reference point
    void eval(const Vec2& p, std::vector<BasisEval>& out) const {
        out.assign(size, BasisEval{});
        for (int m = 0; m < size; ++m) {
            const int a = monomials[m][0], b = monomials[m][1];
            const double v = mono_deriv(p.x(), p.y(), a, b, 0, 0);
            const double vx = mono_deriv(p.x(), p.y(), a, b, 1, 0);
            const double vy = mono_deriv(p.x(), p.y(), a, b, 0, 1);
            const double vxx = mono_deriv(p.x(), p.y(), a, b, 2, 0);
            const double vxy = mono_deriv(p.x(), p.y(), a, b, 1, 1);
            const double vyy = mono_deriv(p.x(), p.y(), a, b, 0, 2);
            for (int i = 0; i < size; ++i) {
                const double c = coeffs(m, i);
                if (c == 0.0) continue;
                out[i].value += c * v;
                out[i].grad.x() += c * vx;
                out[i].grad.y() += c * vy;
                out[i].hess(0, 0) += c * vxx;
                out[i].hess(0, 1) += c * vxy;
                out[i].hess(1, 0) += c * vxy;
                out[i].hess(1, 1) += c * vyy;
            }
        }
    }

    // d-th directional derivative (d <= 3) of basis i along the reference
    // direction u at reference point p
    double dir_deriv(int i, const Vec2& p, const Vec2& u, int d) const {
        double sum = 0.0;
        for (int m = 0; m < size; ++m) {
            const double c = coeffs(m, i);
            if (c == 0.0) continue;
            const int a = monomials[m][0], b = monomials[m][1];
            double term = 0.0;
            // expand (u_x d/dx + u_y d/dy)^d with binomial weights
            for (int j = 0; j <= d; ++j) {
                double binom = 1.0;
                for (int r = 0; r < j; ++r) binom = binom * (d - r) / (r + 1);
                term += binom * std::pow(u.x(), d - j) * std::pow(u.y(), j) *
                        mono_deriv(p.x(), p.y(), a, b, d - j, j);
            }
            sum += c * term;
        }
        return sum;
    }

    // D3 basis_i [u, v, w]: third-derivative tensor contracted with three
    // reference directions
    double third_contraction(int i, const Vec2& p, const Vec2& u, const Vec2& v,
                             const Vec2& w) const {
        double sum = 0.0;
        for (int m = 0; m < size; ++m) {
            const double c = coeffs(m, i);
            if (c == 0.0) continue;
            const int a = monomials[m][0], b = monomials[m][1];
            const double dxxx = mono_deriv(p.x(), p.y(), a, b, 3, 0);
            const double dxxy = mono_deriv(p.x(), p.y(), a, b, 2, 1);
            const double dxyy = mono_deriv(p.x(), p.y(), a, b, 1, 2);
            const double dyyy = mono_deriv(p.x(), p.y(), a, b, 0, 3);
            sum += c * (u.x() * v.x() * w.x() * dxxx +
                        (u.x() * v.x() * w.y() + u.x() * v.y() * w.x() + u.y() * v.x() * w.x()) *
                            dxxy +
                        (u.x() * v.y() * w.y() + u.y() * v.x() * w.y() + u.y() * v.y() * w.x()) *
                            dxyy +
                        u.y() * v.y() * w.y() * dyyy);
        }
        return sum;
    }
};

inline const ReferenceBasis& reference_basis(int degree) {
    static const ReferenceBasis p2(2);
    static const ReferenceBasis p3(3);
    switch (degree) {
        case 2: return p2;
        case 3: return p3;
        default: throw FemError("reference_basis: unsupported degree " + std::to_string(degree));
    }
}

}  // namespace detail

// Continuous Lagrange space of degree k >= 2 on a triangle mesh. DOFs are
// numbered vertices first, then edge nodes in face index order, then interior
// nodes, so two builds on the same mesh give identical maps.
struct FESpace {
    const Mesh* mesh = nullptr;
    int degree = 0;
    int n_dofs = 0;
    int dofs_per_cell = 0;
    std::vector<int> cell_dofs;  // flat, dofs_per_cell per triangle
    std::vector<Vec2> dof_node;

    std::span<const int> dofs(int t) const {
        return {cell_dofs.data() + static_cast<std::size_t>(t) * dofs_per_cell,
                static_cast<std::size_t>(dofs_per_cell)};
    }
};

inline FESpace build_space(const Mesh& mesh, int degree) {
    if (degree < 2) throw FemError("build_space: the method requires degree k >= 2");
    const auto& ref = detail::reference_basis(degree);

    // canonical edge enumeration, identical to build_face_topology
    std::unordered_map<std::uint64_t, int> edge_index;
    std::vector<std::array<int, 2>> edges;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            const auto key = detail::edge_key(a, b);
            if (edge_index.emplace(key, static_cast<int>(edges.size())).second)
                edges.push_back({a, b});
        }

    FESpace space;
    space.mesh = &mesh;
    space.degree = degree;
    space.dofs_per_cell = ref.size;
    const int nv = mesh.num_vertices();
    const int ne = static_cast<int>(edges.size());
    const int per_edge = degree - 1;
    const int per_cell_interior = (degree - 1) * (degree - 2) / 2;
    space.n_dofs = nv + per_edge * ne + per_cell_interior * mesh.num_triangles();
    space.dof_node.resize(space.n_dofs);
    space.cell_dofs.resize(static_cast<std::size_t>(ref.size) * mesh.num_triangles());

    for (int v = 0; v < nv; ++v) space.dof_node[v] = mesh.vertices[v];

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        int* map = space.cell_dofs.data() + static_cast<std::size_t>(t) * ref.size;
        map[0] = tri[0];
        map[1] = tri[1];
        map[2] = tri[2];
        int local = 3;
        const int local_edges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (const auto& le : local_edges) {
            const int ga = tri[le[0]], gb = tri[le[1]];
            const int e = edge_index.at(detail::edge_key(ga, gb));
            for (int i = 1; i < degree; ++i) {
                // global edge nodes walk from the lower vertex index
                const int step = (ga < gb) ? i : degree - i;
                const int dof = nv + per_edge * e + (step - 1);
                map[local] = dof;
                space.dof_node[dof] = mesh.vertices[ga] + (static_cast<double>(i) / degree) *
                                                              (mesh.vertices[gb] -
                                                               mesh.vertices[ga]);
                ++local;
            }
        }
        for (int i = 0; i < per_cell_interior; ++i) {
            const int dof = nv + per_edge * ne + per_cell_interior * t + i;
            map[local] = dof;
            const Vec2 ref_node = ref.nodes[local];
            const Vec2& a = mesh.vertices[tri[0]];
            space.dof_node[dof] = a + ref_node.x() * (mesh.vertices[tri[1]] - a) +
                                  ref_node.y() * (mesh.vertices[tri[2]] - a);
            ++local;
        }
    }
    return space;
}

// Per-element basis evaluator: maps reference derivatives through the affine
// element map (constant Jacobian, so physical Hessians are exact).
class ElementBasis {
public:
    ElementBasis(const FESpace& space, int tri)
        : ref_(&detail::reference_basis(space.degree)), space_(&space), tri_(tri) {
        const auto& t = space.mesh->triangles[tri];
        origin_ = space.mesh->vertices[t[0]];
        jac_.col(0) = space.mesh->vertices[t[1]] - origin_;
        jac_.col(1) = space.mesh->vertices[t[2]] - origin_;
        det_ = jac_(0, 0) * jac_(1, 1) - jac_(0, 1) * jac_(1, 0);
        jac_inv_ = jac_.inverse();
    }

    int size() const { return ref_->size; }
    double det_jacobian() const { return det_; }
    std::span<const int> dofs() const { return space_->dofs(tri_); }

    Vec2 map(const Vec2& ref_point) const { return origin_ + jac_ * ref_point; }
    Vec2 ref_of(const Vec2& x) const { return jac_inv_ * (x - origin_); }

    // physical value/gradient/Hessian of all local basis functions
    void eval(const Vec2& ref_point, std::vector<BasisEval>& out) const {
        ref_->eval(ref_point, out);
        for (auto& b : out) {
            b.grad = jac_inv_.transpose() * b.grad;
            b.hess = jac_inv_.transpose() * b.hess * jac_inv_;
        }
    }

    // d-th derivative of local basis i along the physical unit direction n
    double dir_deriv(int i, const Vec2& ref_point, const Vec2& n, int d) const {
        return ref_->dir_deriv(i, ref_point, jac_inv_ * n, d);
    }

    // mixed third derivative D3 basis_i [a, b, c] for physical directions
    double third_deriv(int i, const Vec2& ref_point, const Vec2& a, const Vec2& b,
                       const Vec2& c) const {
        return ref_->third_contraction(i, ref_point, jac_inv_ * a, jac_inv_ * b, jac_inv_ * c);
    }

private:
    const detail::ReferenceBasis* ref_;
    const FESpace* space_;
    int tri_;
    Vec2 origin_;
    Mat2 jac_;
    Mat2 jac_inv_;
    double det_ = 0.0;
};

// Basis values/derivatives at a physical point of a given triangle.
inline std::vector<BasisEval> eval_basis(const FESpace& space, int tri, const Vec2& x) {
    const auto& t = space.mesh->triangles[tri];
    const auto lambda = barycentric(space.mesh->vertices[t[0]], space.mesh->vertices[t[1]],
                                    space.mesh->vertices[t[2]], x);
    if (!barycentric_inside(lambda, 1e-12))
        throw FemError("eval_basis: point outside triangle " + std::to_string(tri));
    ElementBasis eb(space, tri);
    std::vector<BasisEval> out;
    eb.eval(eb.ref_of(x), out);
    return out;
}

// Nodal interpolant of an analytic function.
inline FieldCoefficients interpolate(const FESpace& space,
                                     const std::function<double(const Vec2&)>& f) {
    FieldCoefficients coeffs(space.n_dofs);
    for (int i = 0; i < space.n_dofs; ++i) coeffs[i] = f(space.dof_node[i]);
    return coeffs;
}

struct FieldEval {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Mat2 hess = Mat2::Zero();
};

inline FieldEval evaluate_field(const FESpace& space, const FieldCoefficients& coeffs,
                                const Vec2& x) {
    if (coeffs.size() != space.n_dofs)
        throw FemError("evaluate_field: coefficient vector has wrong length");
    const int tri = space.mesh->locate(x);
    if (tri < 0) throw FemError("evaluate_field: point outside mesh");
    const auto basis = eval_basis(space, tri, x);
    const auto dofs = space.dofs(tri);
    FieldEval result;
    for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
        const double c = coeffs[dofs[i]];
        result.value += c * basis[i].value;
        result.grad += c * basis[i].grad;
        result.hess += c * basis[i].hess;
    }
    return result;
}

}  // namespace cutplate
