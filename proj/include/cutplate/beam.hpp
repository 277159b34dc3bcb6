#pragma once

#include <functional>

#include "cutplate/cut_topology.hpp"
#include "cutplate/fe_space.hpp"
#include "cutplate/system.hpp"

namespace cutplate {

enum class BeamEndCondition { free_end, simply_supported, clamped };
enum class BeamCrossSection { standard, dual_layer };

// Material, cross-section geometry, end conditions and penalty parameters of
// one straight beam. E = 0 is allowed and makes every beam term vanish.
struct BeamSpec {
    Vec2 p0 = Vec2::Zero(), p1 = Vec2::Zero();
    double youngs_modulus = 1.0e4;  // E
    double width = 0.1;             // b
    double thickness = 0.1;         // t
    BeamCrossSection cross_section = BeamCrossSection::standard;
    double plate_thickness = 0.0;  // dual_layer only: thickness of the embedding plate
    BeamEndCondition end0 = BeamEndCondition::free_end;
    BeamEndCondition end1 = BeamEndCondition::free_end;
    double beta0 = 16.0;        // slope-jump penalty at crossing points
    double beta_tilde0 = 100.0; // endpoint displacement penalty
    double gamma1 = 0.0;        // face-jump stabilization
    double gamma2 = 0.0;        // element normal-derivative stabilization
    std::function<double(const Vec2&)> line_load;  // f_Sigma, empty means zero

    void validate() const {
        if (!((p1 - p0).norm() > 0.0)) throw FemError("BeamSpec: endpoints coincide");
        if (!(youngs_modulus >= 0.0)) throw FemError("BeamSpec: Young's modulus must be >= 0");
        if (!(width > 0.0 && thickness > 0.0))
            throw FemError("BeamSpec: width and thickness must be > 0");
        if (cross_section == BeamCrossSection::dual_layer && !(thickness > plate_thickness))
            throw FemError("BeamSpec: dual_layer requires beam thickness > plate thickness");
        if (gamma1 < 0.0 || gamma2 < 0.0)
            throw FemError("BeamSpec: stabilization parameters must be >= 0");
    }
};

struct BeamConstants {
    double area = 0.0;       // a_Sigma
    double moment = 0.0;     // I_Sigma
    double stiffness = 0.0;  // C_B = E * I
};

// Cross-section area and second moment. The dual_layer variant models two
// layers of total thickness t - t_plate placed above and below the plate.
inline BeamConstants beam_constants(const BeamSpec& spec) {
    spec.validate();
    BeamConstants c;
    if (spec.cross_section == BeamCrossSection::standard) {
        c.area = spec.width * spec.thickness;
        c.moment = spec.width * std::pow(spec.thickness, 3) / 12.0;
    } else {
        c.area = spec.width * (spec.thickness - spec.plate_thickness);
        c.moment = spec.width *
                   (std::pow(spec.thickness, 3) - std::pow(spec.plate_thickness, 3)) / 12.0;
    }
    c.stiffness = spec.youngs_modulus * c.moment;
    return c;
}

namespace detail {

// Combined DOF table for the two elements meeting at a crossing point, with
// tangential derivative jumps (upstream minus downstream along the beam) and
// averages.
struct PointKinematics {
    std::vector<int> dofs;
    std::vector<double> jump_d1;  // [dt v]
    std::vector<double> avg_d2;   // <dtt v>
    std::vector<Vec2> jump_grad;  // [grad v], for the tensor route
    std::vector<Mat2> avg_hess;   // <hess v>
};

inline PointKinematics point_kinematics(const FESpace& space, const CutTopology& cut,
                                        const CrossingPoint& point) {
    PointKinematics pk;
    const Vec2 x = cut.at(point.s);
    const int tris[2] = {point.tri_before, point.tri_after};
    const double sign[2] = {1.0, -1.0};
    std::vector<BasisEval> basis;
    for (int s = 0; s < 2; ++s) {
        ElementBasis eb(space, tris[s]);
        eb.eval(eb.ref_of(x), basis);
        const auto dofs = space.dofs(tris[s]);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            int ci = -1;
            for (std::size_t k = 0; k < pk.dofs.size(); ++k)
                if (pk.dofs[k] == dofs[i]) {
                    ci = static_cast<int>(k);
                    break;
                }
            if (ci < 0) {
                ci = static_cast<int>(pk.dofs.size());
                pk.dofs.push_back(dofs[i]);
                pk.jump_d1.push_back(0.0);
                pk.avg_d2.push_back(0.0);
                pk.jump_grad.push_back(Vec2::Zero());
                pk.avg_hess.push_back(Mat2::Zero());
            }
            const double d1 = cut.tangent.dot(basis[i].grad);
            const double d2 = cut.tangent.dot(basis[i].hess * cut.tangent);
            pk.jump_d1[ci] += sign[s] * d1;
            pk.avg_d2[ci] += 0.5 * d2;
            pk.jump_grad[ci] += sign[s] * basis[i].grad;
            pk.avg_hess[ci] += 0.5 * basis[i].hess;
        }
    }
    return pk;
}

inline SparseMat from_triplets(int n, std::vector<Eigen::Triplet<double>>& triplets) {
    SparseMat m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

}  // namespace detail

// Cut c/dG beam bilinear form, 1D route: E I (dtt v, dtt w) on each
// sub-segment, symmetric consistency terms and the slope-jump penalty
// beta_0 E I / h_F at the crossing points.
inline SparseMat assemble_beam_form(const FESpace& space, const FaceTopology& topo,
                                    const CutTopology& cut, const BeamSpec& spec) {
    const double cb = beam_constants(spec).stiffness;
    std::vector<Eigen::Triplet<double>> triplets;

    const SegmentRule rule = segment_rule(2 * space.degree);
    std::vector<BasisEval> basis;
    for (const SubSegment& seg : cut.segments) {
        ElementBasis eb(space, seg.triangle);
        const auto dofs = space.dofs(seg.triangle);
        const double len = (seg.s1 - seg.s0) * cut.length;
        std::vector<double> d2(eb.size());
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = cut.at(seg.s0 + rule.points[q] * (seg.s1 - seg.s0));
            eb.eval(eb.ref_of(x), basis);
            const double w = rule.weights[q] * len;
            for (int i = 0; i < eb.size(); ++i)
                d2[i] = cut.tangent.dot(basis[i].hess * cut.tangent);
            for (int i = 0; i < eb.size(); ++i)
                for (int j = 0; j < eb.size(); ++j)
                    triplets.emplace_back(dofs[i], dofs[j], w * cb * d2[i] * d2[j]);
        }
    }

    for (const CrossingPoint& point : cut.points) {
        const auto pk = detail::point_kinematics(space, cut, point);
        const double h_pt = topo.faces[point.face].h_f;
        const int n = static_cast<int>(pk.dofs.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                triplets.emplace_back(pk.dofs[i], pk.dofs[j],
                                      cb * (-pk.avg_d2[i] * pk.jump_d1[j] -
                                            pk.jump_d1[i] * pk.avg_d2[j] +
                                            spec.beta0 / h_pt * pk.jump_d1[i] * pk.jump_d1[j]));
    }
    return detail::from_triplets(space.n_dofs, triplets);
}

// Same operator assembled through the tangential tensor calculus: the beam
// stress sigma_B = C_B (dtt v) t(x)t contracted with the strain of the
// tangential gradient. Used as an independent route for verification.
inline SparseMat assemble_beam_form_tensor(const FESpace& space, const FaceTopology& topo,
                                           const CutTopology& cut, const BeamSpec& spec) {
    const double cb = beam_constants(spec).stiffness;
    const Mat2 proj = cut.tangent * cut.tangent.transpose();
    std::vector<Eigen::Triplet<double>> triplets;

    const SegmentRule rule = segment_rule(2 * space.degree);
    std::vector<BasisEval> basis;
    for (const SubSegment& seg : cut.segments) {
        ElementBasis eb(space, seg.triangle);
        const auto dofs = space.dofs(seg.triangle);
        const double len = (seg.s1 - seg.s0) * cut.length;
        std::vector<Mat2> sigma(eb.size()), strain(eb.size());
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = cut.at(seg.s0 + rule.points[q] * (seg.s1 - seg.s0));
            eb.eval(eb.ref_of(x), basis);
            const double w = rule.weights[q] * len;
            for (int i = 0; i < eb.size(); ++i) {
                sigma[i] = cb * cut.tangent.dot(basis[i].hess * cut.tangent) * proj;
                strain[i] = 0.5 * (basis[i].hess * proj + proj * basis[i].hess);
            }
            for (int i = 0; i < eb.size(); ++i)
                for (int j = 0; j < eb.size(); ++j)
                    triplets.emplace_back(dofs[i], dofs[j],
                                          w * sigma[i].cwiseProduct(strain[j]).sum());
        }
    }

    for (const CrossingPoint& point : cut.points) {
        const auto pk = detail::point_kinematics(space, cut, point);
        const double h_pt = topo.faces[point.face].h_f;
        const int n = static_cast<int>(pk.dofs.size());
        std::vector<Vec2> flux(n), sjump(n);
        for (int i = 0; i < n; ++i) {
            const Mat2 sigma = cb * cut.tangent.dot(pk.avg_hess[i] * cut.tangent) * proj;
            flux[i] = sigma.transpose() * cut.tangent;  // t . sigma_B
            sjump[i] = proj * pk.jump_grad[i];          // [grad_Sigma v]
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                triplets.emplace_back(pk.dofs[i], pk.dofs[j],
                                      -flux[i].dot(sjump[j]) - sjump[i].dot(flux[j]) +
                                          spec.beta0 * cb / h_pt * sjump[i].dot(sjump[j]));
    }
    return detail::from_triplets(space.n_dofs, triplets);
}

// Stabilization of the cut operator: jumps of normal derivatives of order
// 1..k across the interior faces of the active mesh, plus beam-normal
// derivatives of tangential derivatives of order 0..2 over the active
// elements. Both sums are scaled by C_B so gamma stays dimensionless.
inline SparseMat assemble_beam_stabilization(const FESpace& space, const FaceTopology& topo,
                                             const CutTopology& cut, const BeamSpec& spec) {
    const double cb = beam_constants(spec).stiffness;
    std::vector<Eigen::Triplet<double>> triplets;
    const double h = topo.mesh_size;

    if (spec.gamma1 > 0.0) {
        const Mesh& mesh = *space.mesh;
        const SegmentRule rule = segment_rule(2 * space.degree);
        for (const int f : cut.active_faces) {
            const Face& face = topo.faces[f];
            const int tris[2] = {face.tri_plus, face.tri_minus};
            const double sign[2] = {1.0, -1.0};
            std::vector<int> dofs;
            std::vector<std::array<int, 2>> side_map[2];
            for (int s = 0; s < 2; ++s) {
                const auto cell = space.dofs(tris[s]);
                for (std::size_t i = 0; i < cell.size(); ++i) {
                    int ci = -1;
                    for (std::size_t k = 0; k < dofs.size(); ++k)
                        if (dofs[k] == cell[i]) {
                            ci = static_cast<int>(k);
                            break;
                        }
                    if (ci < 0) {
                        ci = static_cast<int>(dofs.size());
                        dofs.push_back(cell[i]);
                    }
                    side_map[s].push_back({static_cast<int>(i), ci});
                }
            }
            const int n = static_cast<int>(dofs.size());
            const Vec2 a = mesh.vertices[face.v0];
            const Vec2 b = mesh.vertices[face.v1];
            std::vector<double> jump(n);
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const Vec2 x = a + rule.points[q] * (b - a);
                const double w = rule.weights[q] * face.length;
                for (int order = 1; order <= space.degree; ++order) {
                    std::fill(jump.begin(), jump.end(), 0.0);
                    for (int s = 0; s < 2; ++s) {
                        ElementBasis eb(space, tris[s]);
                        const Vec2 ref = eb.ref_of(x);
                        for (const auto& [local, ci] : side_map[s])
                            jump[ci] += sign[s] * eb.dir_deriv(local, ref, face.normal, order);
                    }
                    const double weight =
                        spec.gamma1 * cb * std::pow(h, 2 * (order - 2)) * w;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            triplets.emplace_back(dofs[i], dofs[j], weight * jump[i] * jump[j]);
                }
            }
        }
    }

    if (spec.gamma2 > 0.0) {
        const QuadratureRule rule = triangle_rule(2 * space.degree);
        std::vector<BasisEval> basis;
        for (const int t : cut.active_elements) {
            ElementBasis eb(space, t);
            const auto dofs = space.dofs(t);
            std::vector<double> deriv(eb.size());
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                eb.eval(rule.points[q], basis);
                const double w = rule.weights[q] * eb.det_jacobian();
                for (int order = 0; order <= 2; ++order) {
                    for (int i = 0; i < eb.size(); ++i) {
                        if (order == 0)
                            deriv[i] = cut.normal.dot(basis[i].grad);
                        else if (order == 1)
                            deriv[i] = cut.normal.dot(basis[i].hess * cut.tangent);
                        else
                            deriv[i] = eb.third_deriv(i, rule.points[q], cut.normal,
                                                      cut.tangent, cut.tangent);
                    }
                    const double weight =
                        spec.gamma2 * cb * std::pow(h, 2 * (order - 2) + 1) * w;
                    for (int i = 0; i < eb.size(); ++i)
                        for (int j = 0; j < eb.size(); ++j)
                            triplets.emplace_back(dofs[i], dofs[j],
                                                  weight * deriv[i] * deriv[j]);
                }
            }
        }
    }
    return detail::from_triplets(space.n_dofs, triplets);
}

namespace detail {

// local length scale: mean h_F over the faces of the containing element
inline double endpoint_h(const FaceTopology& topo, int tri) {
    double sum = 0.0;
    for (const int f : topo.triangle_faces[tri]) sum += topo.faces[f].h_f;
    return sum / 3.0;
}

}  // namespace detail

// Endpoint conditions as penalties added to the beam form: a displacement
// penalty beta~_0 E I / h^3 for supported ends, plus one-sided Nitsche
// rotation terms (with the outward tangential derivative) for clamped ends.
inline SparseMat assemble_beam_endpoint_terms(const FESpace& space, const FaceTopology& topo,
                                              const BeamSpec& spec) {
    const double cb = beam_constants(spec).stiffness;
    const Mesh& mesh = *space.mesh;
    std::vector<Eigen::Triplet<double>> triplets;

    const Vec2 tangent = (spec.p1 - spec.p0).normalized();
    const struct {
        Vec2 x;
        Vec2 outward;
        BeamEndCondition condition;
    } ends[2] = {{spec.p0, -tangent, spec.end0}, {spec.p1, tangent, spec.end1}};

    for (const auto& end : ends) {
        if (end.condition == BeamEndCondition::free_end) continue;
        const int tri = mesh.locate(end.x);
        if (tri < 0) throw CutError("beam endpoint outside mesh");
        const double h_e = detail::endpoint_h(topo, tri);

        ElementBasis eb(space, tri);
        std::vector<BasisEval> basis;
        eb.eval(eb.ref_of(end.x), basis);
        const auto dofs = space.dofs(tri);
        const int n = eb.size();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = spec.beta_tilde0 / std::pow(h_e, 3) * cb * basis[i].value *
                           basis[j].value;
                if (end.condition == BeamEndCondition::clamped) {
                    const double d2i = tangent.dot(basis[i].hess * tangent);
                    const double d2j = tangent.dot(basis[j].hess * tangent);
                    const double d1i = end.outward.dot(basis[i].grad);
                    const double d1j = end.outward.dot(basis[j].grad);
                    v += cb * (-d2i * d1j - d1i * d2j + spec.beta0 / h_e * d1i * d1j);
                }
                triplets.emplace_back(dofs[i], dofs[j], v);
            }
    }
    return detail::from_triplets(space.n_dofs, triplets);
}

// Load vector l_Sigma(v) = sum_T (a_Sigma f_Sigma, v)_{Sigma cap T}.
inline Eigen::VectorXd assemble_beam_load(const FESpace& space, const CutTopology& cut,
                                          const BeamSpec& spec, int exactness = 12) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs);
    if (!spec.line_load) return rhs;
    const double area = beam_constants(spec).area;
    const SegmentRule rule = segment_rule(exactness);
    std::vector<BasisEval> basis;
    for (const SubSegment& seg : cut.segments) {
        ElementBasis eb(space, seg.triangle);
        const auto dofs = space.dofs(seg.triangle);
        const double len = (seg.s1 - seg.s0) * cut.length;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = cut.at(seg.s0 + rule.points[q] * (seg.s1 - seg.s0));
            eb.eval(eb.ref_of(x), basis);
            const double w = rule.weights[q] * len * area * spec.line_load(x);
            for (int i = 0; i < eb.size(); ++i) rhs[dofs[i]] += w * basis[i].value;
        }
    }
    return rhs;
}

// Gram matrix of the beam energy norm: C_B |dtt v|^2 on the sub-segments,
// C_B h <dtt v>^2 and C_B / h [dt v]^2 at the crossing points (h = h_F of the
// crossed face).
inline SparseMat beam_energy_gram(const FESpace& space, const FaceTopology& topo,
                                  const CutTopology& cut, const BeamSpec& spec) {
    const double cb = beam_constants(spec).stiffness;
    std::vector<Eigen::Triplet<double>> triplets;

    const SegmentRule rule = segment_rule(2 * space.degree);
    std::vector<BasisEval> basis;
    for (const SubSegment& seg : cut.segments) {
        ElementBasis eb(space, seg.triangle);
        const auto dofs = space.dofs(seg.triangle);
        const double len = (seg.s1 - seg.s0) * cut.length;
        std::vector<double> d2(eb.size());
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = cut.at(seg.s0 + rule.points[q] * (seg.s1 - seg.s0));
            eb.eval(eb.ref_of(x), basis);
            const double w = rule.weights[q] * len;
            for (int i = 0; i < eb.size(); ++i)
                d2[i] = cut.tangent.dot(basis[i].hess * cut.tangent);
            for (int i = 0; i < eb.size(); ++i)
                for (int j = 0; j < eb.size(); ++j)
                    triplets.emplace_back(dofs[i], dofs[j], w * cb * d2[i] * d2[j]);
        }
    }

    for (const CrossingPoint& point : cut.points) {
        const auto pk = detail::point_kinematics(space, cut, point);
        const double h_pt = topo.faces[point.face].h_f;
        const int n = static_cast<int>(pk.dofs.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                triplets.emplace_back(pk.dofs[i], pk.dofs[j],
                                      cb * (h_pt * pk.avg_d2[i] * pk.avg_d2[j] +
                                            pk.jump_d1[i] * pk.jump_d1[j] / h_pt));
    }
    return detail::from_triplets(space.n_dofs, triplets);
}

}  // namespace cutplate
