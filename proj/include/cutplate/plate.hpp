#pragma once

#include <functional>

#include "cutplate/fe_space.hpp"
#include "cutplate/system.hpp"

namespace cutplate {

enum class PlateBC { clamped, simply_supported, free_edge };

// Material, geometry and boundary condition of the Kirchhoff-Love plate.
struct PlateSpec {
    double youngs_modulus = 100.0;  // E
    double poisson = 0.5;           // nu in [0, 0.5]
    double thickness = 0.1;         // t
    PlateBC bc = PlateBC::clamped;
    double beta0 = 16.0;  // gradient-jump penalty constant (dimensionless)

    void validate() const {
        if (!(youngs_modulus > 0.0)) throw FemError("PlateSpec: Young's modulus must be > 0");
        if (!(poisson >= 0.0 && poisson <= 0.5))
            throw FemError("PlateSpec: Poisson ratio must be in [0, 0.5]");
        if (!(thickness > 0.0)) throw FemError("PlateSpec: thickness must be > 0");
        if (!(beta0 > 0.0)) throw FemError("PlateSpec: penalty constant must be > 0");
    }
};

struct LoadSpec {
    std::function<double(const Vec2&)> f;  // out-of-plane load per unit area
};

// Bending stiffness constant: E t^3 / (12 (1 + nu)).
inline double plate_constant(const PlateSpec& spec) {
    return spec.youngs_modulus * std::pow(spec.thickness, 3) / (12.0 * (1.0 + spec.poisson));
}

// Plate stress (moment) tensor of a curvature tensor H.
inline Mat2 plate_stress(const Mat2& hess, const PlateSpec& spec) {
    const double nu_factor = spec.poisson / (1.0 - spec.poisson);
    return plate_constant(spec) * (hess + nu_factor * hess.trace() * Mat2::Identity());
}

struct AssemblyOptions {
    int stiffness_exactness = -1;  // default 2k
    int load_exactness = 12;
};

// Analytic scalar field with derivatives, used for consistency checks and
// error measurement against manufactured solutions.
struct AnalyticField {
    std::function<double(const Vec2&)> value;
    std::function<Vec2(const Vec2&)> grad;
    std::function<Mat2(const Vec2&)> hess;
};

namespace detail {

inline bool include_boundary_faces(PlateBC bc) { return bc == PlateBC::clamped; }

// Jump/average kinematics of all basis functions with support on a face,
// evaluated at the face quadrature points. On boundary faces the one-sided
// convention [v] = <v> = v+ applies.
struct FaceKinematics {
    std::vector<int> dofs;  // combined global DOFs of both sides
    struct Point {
        Vec2 x;
        double weight;               // includes the face length
        std::vector<Vec2> jump_grad;   // per combined DOF
        std::vector<Mat2> avg_hess;
    };
    std::vector<Point> points;
};

inline FaceKinematics face_kinematics(const FESpace& space, const Face& face, int exactness) {
    const Mesh& mesh = *space.mesh;
    FaceKinematics fk;

    struct Side {
        int tri;
        double jump_sign;
        double avg_weight;
    };
    std::vector<Side> sides;
    sides.push_back({face.tri_plus, 1.0, face.boundary() ? 1.0 : 0.5});
    if (!face.boundary()) sides.push_back({face.tri_minus, -1.0, 0.5});

    std::vector<std::vector<int>> side_to_combined(sides.size());
    for (std::size_t s = 0; s < sides.size(); ++s) {
        for (const int dof : space.dofs(sides[s].tri)) {
            int ci = -1;
            for (std::size_t k = 0; k < fk.dofs.size(); ++k)
                if (fk.dofs[k] == dof) {
                    ci = static_cast<int>(k);
                    break;
                }
            if (ci < 0) {
                ci = static_cast<int>(fk.dofs.size());
                fk.dofs.push_back(dof);
            }
            side_to_combined[s].push_back(ci);
        }
    }

    const SegmentRule rule = segment_rule(exactness);
    const Vec2 a = mesh.vertices[face.v0];
    const Vec2 b = mesh.vertices[face.v1];
    fk.points.resize(rule.points.size());
    std::vector<BasisEval> basis;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        auto& pt = fk.points[q];
        pt.x = a + rule.points[q] * (b - a);
        pt.weight = rule.weights[q] * face.length;
        pt.jump_grad.assign(fk.dofs.size(), Vec2::Zero());
        pt.avg_hess.assign(fk.dofs.size(), Mat2::Zero());
        for (std::size_t s = 0; s < sides.size(); ++s) {
            ElementBasis eb(space, sides[s].tri);
            eb.eval(eb.ref_of(pt.x), basis);
            for (std::size_t i = 0; i < basis.size(); ++i) {
                const int ci = side_to_combined[s][i];
                pt.jump_grad[ci] += sides[s].jump_sign * basis[i].grad;
                pt.avg_hess[ci] += sides[s].avg_weight * basis[i].hess;
            }
        }
    }
    return fk;
}

}  // namespace detail

// The c/dG plate bilinear form: element bending term, symmetric consistency
// terms for the bending moment across faces, and the gradient-jump penalty
// beta_0 C_P / h_F. Face sums include boundary faces only for clamped plates.
inline SparseMat assemble_plate_form(const FESpace& space, const FaceTopology& topo,
                                     const PlateSpec& spec, const AssemblyOptions& options = {}) {
    spec.validate();
    const Mesh& mesh = *space.mesh;
    const double c_p = plate_constant(spec);
    const double nu_factor = spec.poisson / (1.0 - spec.poisson);
    const double beta = spec.beta0 * c_p;
    const int exactness =
        options.stiffness_exactness > 0 ? options.stiffness_exactness : 2 * space.degree;

    std::vector<Eigen::Triplet<double>> triplets;
    const QuadratureRule cell_rule = triangle_rule(exactness);
    std::vector<BasisEval> basis;
    Eigen::MatrixXd local(space.dofs_per_cell, space.dofs_per_cell);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        ElementBasis eb(space, t);
        local.setZero();
        for (std::size_t q = 0; q < cell_rule.points.size(); ++q) {
            eb.eval(cell_rule.points[q], basis);
            const double w = cell_rule.weights[q] * eb.det_jacobian();
            for (int i = 0; i < eb.size(); ++i)
                for (int j = 0; j < eb.size(); ++j)
                    local(i, j) += w * c_p *
                                   (basis[i].hess.cwiseProduct(basis[j].hess).sum() +
                                    nu_factor * basis[i].hess.trace() * basis[j].hess.trace());
        }
        const auto dofs = space.dofs(t);
        for (int i = 0; i < eb.size(); ++i)
            for (int j = 0; j < eb.size(); ++j)
                triplets.emplace_back(dofs[i], dofs[j], local(i, j));
    }

    const bool with_boundary = detail::include_boundary_faces(spec.bc);
    for (const Face& face : topo.faces) {
        if (face.boundary() && !with_boundary) continue;
        const auto fk = detail::face_kinematics(space, face, exactness);
        const int n = static_cast<int>(fk.dofs.size());
        Eigen::MatrixXd fm = Eigen::MatrixXd::Zero(n, n);
        std::vector<Vec2> moment(n);
        for (const auto& pt : fk.points) {
            for (int i = 0; i < n; ++i) {
                const Mat2 sig = c_p * (pt.avg_hess[i] +
                                        nu_factor * pt.avg_hess[i].trace() * Mat2::Identity());
                moment[i] = sig * face.normal;
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    fm(i, j) += pt.weight * (-moment[i].dot(pt.jump_grad[j]) -
                                             pt.jump_grad[i].dot(moment[j]) +
                                             beta / face.h_f *
                                                 pt.jump_grad[i].dot(pt.jump_grad[j]));
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) triplets.emplace_back(fk.dofs[i], fk.dofs[j], fm(i, j));
    }

    SparseMat matrix(space.n_dofs, space.n_dofs);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    return matrix;
}

// Load vector (f, v)_Omega.
inline Eigen::VectorXd assemble_plate_load(const FESpace& space, const LoadSpec& load,
                                           int exactness = 12) {
    const Mesh& mesh = *space.mesh;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs);
    const QuadratureRule rule = triangle_rule(exactness);
    std::vector<BasisEval> basis;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        ElementBasis eb(space, t);
        const auto dofs = space.dofs(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            eb.eval(rule.points[q], basis);
            const double w = rule.weights[q] * eb.det_jacobian() * load.f(eb.map(rule.points[q]));
            for (int i = 0; i < eb.size(); ++i) rhs[dofs[i]] += w * basis[i].value;
        }
    }
    return rhs;
}

// DOFs sitting on the domain boundary (vertices and edge nodes of boundary
// faces). Relies on face index == edge index of the shared enumeration.
inline std::vector<int> boundary_dofs(const FESpace& space, const FaceTopology& topo) {
    std::vector<signed char> mark(space.n_dofs, 0);
    const int nv = space.mesh->num_vertices();
    const int per_edge = space.degree - 1;
    for (int f = 0; f < topo.num_faces(); ++f) {
        const Face& face = topo.faces[f];
        if (!face.boundary()) continue;
        mark[face.v0] = mark[face.v1] = 1;
        for (int i = 0; i < per_edge; ++i) mark[nv + per_edge * f + i] = 1;
    }
    std::vector<int> result;
    for (int i = 0; i < space.n_dofs; ++i)
        if (mark[i]) result.push_back(i);
    return result;
}

// Strong boundary conditions: u = 0 on all boundary DOFs for clamped and
// simply supported plates (the rotation condition of the clamped plate is
// already weak, via the boundary faces of the bilinear form).
inline void apply_plate_bc(LinearSystem& system, const FESpace& space, const FaceTopology& topo,
                           PlateBC bc) {
    system.constraints.clear();
    if (bc == PlateBC::free_edge) return;
    for (const int dof : boundary_dofs(space, topo)) system.constraints.push_back({dof, 0.0});
}

// a_plate(u*, phi_i) with the analytic field entering through its exact
// derivatives at the quadrature points.
inline Eigen::VectorXd apply_plate_form_to(const FESpace& space, const FaceTopology& topo,
                                           const PlateSpec& spec, const AnalyticField& field,
                                           int exactness) {
    const Mesh& mesh = *space.mesh;
    const double c_p = plate_constant(spec);
    const double nu_factor = spec.poisson / (1.0 - spec.poisson);
    const double beta = spec.beta0 * c_p;
    Eigen::VectorXd result = Eigen::VectorXd::Zero(space.n_dofs);

    const QuadratureRule cell_rule = triangle_rule(exactness);
    std::vector<BasisEval> basis;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        ElementBasis eb(space, t);
        const auto dofs = space.dofs(t);
        for (std::size_t q = 0; q < cell_rule.points.size(); ++q) {
            eb.eval(cell_rule.points[q], basis);
            const double w = cell_rule.weights[q] * eb.det_jacobian();
            const Mat2 h_star = field.hess(eb.map(cell_rule.points[q]));
            const Mat2 sig = c_p * (h_star + nu_factor * h_star.trace() * Mat2::Identity());
            for (int i = 0; i < eb.size(); ++i)
                result[dofs[i]] += w * sig.cwiseProduct(basis[i].hess).sum();
        }
    }

    const bool with_boundary = detail::include_boundary_faces(spec.bc);
    for (const Face& face : topo.faces) {
        if (face.boundary() && !with_boundary) continue;
        const auto fk = detail::face_kinematics(space, face, exactness);
        const int n = static_cast<int>(fk.dofs.size());
        for (const auto& pt : fk.points) {
            // interior faces: the analytic jump vanishes identically
            const Vec2 jump_star = face.boundary() ? field.grad(pt.x) : Vec2::Zero();
            const Mat2 h_star = field.hess(pt.x);
            const Vec2 moment_star =
                (c_p * (h_star + nu_factor * h_star.trace() * Mat2::Identity())) * face.normal;
            for (int i = 0; i < n; ++i) {
                const Mat2 sig_i = c_p * (pt.avg_hess[i] +
                                          nu_factor * pt.avg_hess[i].trace() * Mat2::Identity());
                result[fk.dofs[i]] +=
                    pt.weight * (-moment_star.dot(pt.jump_grad[i]) -
                                 jump_star.dot(sig_i * face.normal) +
                                 beta / face.h_f * jump_star.dot(pt.jump_grad[i]));
            }
        }
    }
    return result;
}

// Gram matrix of the plate energy norm |||v|||^2 = sum_T C_P |D2 v|^2 +
// sum_F C_P h_F |<D2 v>|^2 + sum_F C_P / h_F |[grad v]|^2, with the same face
// set as the bilinear form.
inline SparseMat plate_energy_gram(const FESpace& space, const FaceTopology& topo,
                                   const PlateSpec& spec) {
    const Mesh& mesh = *space.mesh;
    const double c_p = plate_constant(spec);
    const int exactness = 2 * space.degree;
    std::vector<Eigen::Triplet<double>> triplets;

    const QuadratureRule cell_rule = triangle_rule(exactness);
    std::vector<BasisEval> basis;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        ElementBasis eb(space, t);
        const auto dofs = space.dofs(t);
        for (std::size_t q = 0; q < cell_rule.points.size(); ++q) {
            eb.eval(cell_rule.points[q], basis);
            const double w = cell_rule.weights[q] * eb.det_jacobian();
            for (int i = 0; i < eb.size(); ++i)
                for (int j = 0; j < eb.size(); ++j)
                    triplets.emplace_back(
                        dofs[i], dofs[j],
                        w * c_p * basis[i].hess.cwiseProduct(basis[j].hess).sum());
        }
    }

    const bool with_boundary = detail::include_boundary_faces(spec.bc);
    for (const Face& face : topo.faces) {
        if (face.boundary() && !with_boundary) continue;
        const auto fk = detail::face_kinematics(space, face, exactness);
        const int n = static_cast<int>(fk.dofs.size());
        for (const auto& pt : fk.points)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    triplets.emplace_back(
                        fk.dofs[i], fk.dofs[j],
                        pt.weight * c_p *
                            (face.h_f * pt.avg_hess[i].cwiseProduct(pt.avg_hess[j]).sum() +
                             pt.jump_grad[i].dot(pt.jump_grad[j]) / face.h_f));
    }

    SparseMat gram(space.n_dofs, space.n_dofs);
    gram.setFromTriplets(triplets.begin(), triplets.end());
    return gram;
}

}  // namespace cutplate
