#pragma once

#include "cutplate/beam.hpp"
#include "cutplate/plate.hpp"

namespace cutplate {

struct EnergyNorms {
    double plate = 0.0;
    std::vector<double> beams;
};

// Mesh-dependent energy norms of a discrete field, evaluated through the Gram
// matrices of the plate and beam norms.
inline EnergyNorms energy_norms(const FESpace& space, const FaceTopology& topo,
                                const PlateSpec& plate, const std::vector<CutTopology>& cuts,
                                const std::vector<BeamSpec>& beams,
                                const FieldCoefficients& coeffs) {
    EnergyNorms norms;
    const SparseMat plate_gram = plate_energy_gram(space, topo, plate);
    norms.plate = std::sqrt(std::max(0.0, coeffs.dot(plate_gram * coeffs)));
    for (std::size_t b = 0; b < beams.size(); ++b) {
        const SparseMat gram = beam_energy_gram(space, topo, cuts[b], beams[b]);
        norms.beams.push_back(std::sqrt(std::max(0.0, coeffs.dot(gram * coeffs))));
    }
    return norms;
}

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double energy = 0.0;  // plate energy norm of u_h - u*
};

// Errors of a discrete field against an analytic reference, with the
// reference entering through exact values/derivatives at quadrature points.
inline ErrorNorms error_norms(const FESpace& space, const FaceTopology& topo,
                              const PlateSpec& spec, const FieldCoefficients& coeffs,
                              const AnalyticField& exact, int exactness = 12) {
    const Mesh& mesh = *space.mesh;
    const double c_p = plate_constant(spec);
    double l2 = 0.0, h1 = 0.0, energy = 0.0;

    const QuadratureRule rule = triangle_rule(exactness);
    std::vector<BasisEval> basis;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        ElementBasis eb(space, t);
        const auto dofs = space.dofs(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            eb.eval(rule.points[q], basis);
            const Vec2 x = eb.map(rule.points[q]);
            const double w = rule.weights[q] * eb.det_jacobian();
            double value = -exact.value(x);
            Vec2 grad = -exact.grad(x);
            Mat2 hess = -exact.hess(x);
            for (int i = 0; i < eb.size(); ++i) {
                const double c = coeffs[dofs[i]];
                value += c * basis[i].value;
                grad += c * basis[i].grad;
                hess += c * basis[i].hess;
            }
            l2 += w * value * value;
            h1 += w * grad.squaredNorm();
            energy += w * c_p * hess.cwiseProduct(hess).sum();
        }
    }

    const bool with_boundary = detail::include_boundary_faces(spec.bc);
    for (const Face& face : topo.faces) {
        if (face.boundary() && !with_boundary) continue;
        const auto fk = detail::face_kinematics(space, face, exactness);
        const int n = static_cast<int>(fk.dofs.size());
        for (const auto& pt : fk.points) {
            // [grad u*] = 0 on interior faces; one-sided on the boundary
            Vec2 jump = face.boundary() ? Vec2(-exact.grad(pt.x)) : Vec2(Vec2::Zero());
            Mat2 avg = -exact.hess(pt.x);
            for (int i = 0; i < n; ++i) {
                const double c = coeffs[fk.dofs[i]];
                jump += c * pt.jump_grad[i];
                avg += c * pt.avg_hess[i];
            }
            energy += pt.weight * c_p * (face.h_f * avg.cwiseProduct(avg).sum() +
                                         jump.squaredNorm() / face.h_f);
        }
    }
    return {std::sqrt(l2), std::sqrt(h1), std::sqrt(energy)};
}

}  // namespace cutplate
