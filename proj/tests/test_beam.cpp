#include <catch2/catch_amalgamated.hpp>

#include "cutplate/beam.hpp"
#include "test_helpers.hpp"

using namespace cutplate;
using cutplate::testing::max_abs;
using cutplate::testing::max_abs_diff;
using cutplate::testing::random_coefficients;
using cutplate::testing::single_triangle_mesh;
using Catch::Approx;

namespace {

BeamSpec beam_41() {
    BeamSpec beam;
    beam.p0 = Vec2(0.499, 0.0);
    beam.p1 = Vec2(0.499, 1.0);
    beam.youngs_modulus = 1.0e4;
    beam.width = 0.1;
    beam.thickness = 0.1;
    return beam;
}

struct BeamFixture {
    Mesh mesh;
    FaceTopology topo;
    FESpace space;
    explicit BeamFixture(int n)
        : mesh(generate_structured_unit_square(n)),
          topo(build_face_topology(mesh)),
          space(build_space(mesh, 2)) {}
};

}  // namespace

TEST_CASE("beam constants") {
    SECTION("reference values") {
        const BeamConstants c = beam_constants(beam_41());
        CHECK(c.area == Approx(0.01).epsilon(1e-14));
        CHECK(c.moment == Approx(1e-4 / 12.0).epsilon(1e-14));
        CHECK(c.stiffness == Approx(1e4 * 1e-4 / 12.0).epsilon(1e-14));
    }
    SECTION("unit normalization") {
        BeamSpec beam = beam_41();
        beam.width = 12.0;
        beam.thickness = 1.0;
        CHECK(beam_constants(beam).moment == Approx(1.0).epsilon(1e-14));
    }
    SECTION("dual layer cross-section") {
        BeamSpec beam = beam_41();
        beam.cross_section = BeamCrossSection::dual_layer;
        beam.thickness = 0.2;
        beam.plate_thickness = 0.1;
        const BeamConstants c = beam_constants(beam);
        CHECK(c.area == Approx(0.01).epsilon(1e-14));
        CHECK(c.moment == Approx(0.1 * 0.007 / 12.0).epsilon(1e-14));
    }
    SECTION("dual layer thinner than the plate is rejected") {
        BeamSpec beam = beam_41();
        beam.cross_section = BeamCrossSection::dual_layer;
        beam.thickness = 0.1;
        beam.plate_thickness = 0.1;
        CHECK_THROWS_AS(beam_constants(beam), FemError);
    }
}

TEST_CASE("beam form: nullspace and closed-form element term") {
    SECTION("globally linear fields carry no beam energy") {
        const BeamFixture fx(4);
        const BeamSpec beam = beam_41();
        const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);
        const SparseMat a = assemble_beam_form(fx.space, fx.topo, cut, beam);
        const auto v = interpolate(
            fx.space, [](const Vec2& p) { return 0.3 + 1.7 * p.x() - 0.4 * p.y(); });
        CHECK(std::abs(v.dot(a * v)) < 1e-11 * max_abs(a));
    }

    SECTION("single sub-segment with unit tangential curvature") {
        const Mesh mesh = single_triangle_mesh();
        const FaceTopology topo = build_face_topology(mesh);
        const FESpace space = build_space(mesh, 2);
        BeamSpec beam = beam_41();
        beam.p0 = Vec2(0.1, 0.1);
        beam.p1 = Vec2(0.3, 0.4);
        const CutTopology cut = compute_cut_topology(mesh, topo, beam.p0, beam.p1);
        REQUIRE(cut.segments.size() == 1);
        const SparseMat a = assemble_beam_form(space, topo, cut, beam);
        // v = ((t.x)^2)/2 has dtt v = 1 along the beam
        const Vec2 t = cut.tangent;
        const auto v = interpolate(space, [t](const Vec2& p) {
            const double s = t.dot(p);
            return 0.5 * s * s;
        });
        const double expected = beam_constants(beam).stiffness * cut.length;
        CHECK(v.dot(a * v) == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("tensor-form assembly equals the 1D form") {
    const BeamFixture fx(4);
    const struct {
        Vec2 p0, p1;
    } placements[] = {
        {Vec2(0.499, 0.0), Vec2(0.499, 1.0)},
        {Vec2(0.07, 0.21), Vec2(0.93, 0.77)},
        {Vec2(0.11, 0.86), Vec2(0.88, 0.13)},
    };
    for (const auto& pl : placements) {
        BeamSpec beam = beam_41();
        beam.p0 = pl.p0;
        beam.p1 = pl.p1;
        const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);
        const SparseMat a = assemble_beam_form(fx.space, fx.topo, cut, beam);
        const SparseMat b = assemble_beam_form_tensor(fx.space, fx.topo, cut, beam);
        CHECK(max_abs_diff(a, b) <= 1e-12 * max_abs(a));
    }
}

TEST_CASE("tangential calculus identities") {
    const BeamFixture fx(3);
    const auto coeffs = random_coefficients(fx.space, 23);
    BeamSpec beam = beam_41();
    beam.p0 = Vec2(0.13, 0.08);
    beam.p1 = Vec2(0.81, 0.94);
    const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);
    const Mat2 proj = cut.tangent * cut.tangent.transpose();

    std::vector<BasisEval> basis;
    for (const SubSegment& seg : cut.segments) {
        ElementBasis eb(fx.space, seg.triangle);
        const auto dofs = fx.space.dofs(seg.triangle);
        const Vec2 x = cut.at(0.5 * (seg.s0 + seg.s1));
        eb.eval(eb.ref_of(x), basis);
        Vec2 grad = Vec2::Zero();
        Mat2 hess = Mat2::Zero();
        for (int i = 0; i < eb.size(); ++i) {
            grad += coeffs[dofs[i]] * basis[i].grad;
            hess += coeffs[dofs[i]] * basis[i].hess;
        }
        // grad_Sigma v = (dt v) t
        const Vec2 surface_grad = proj * grad;
        CHECK((surface_grad - cut.tangent.dot(grad) * cut.tangent).norm() <=
              1e-12 * grad.norm());
        // eps_Sigma(grad_Sigma v) = (dtt v) t (x) t
        const Mat2 eps = 0.5 * (hess * proj + proj * hess);
        const Mat2 eps_sigma = proj * eps * proj;
        const Mat2 expected = cut.tangent.dot(hess * cut.tangent) * proj;
        CHECK((eps_sigma - expected).norm() <= 1e-12 * hess.norm());
    }
}

TEST_CASE("beam stabilization") {
    const BeamFixture fx(4);
    BeamSpec beam = beam_41();
    const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);

    SECTION("vanishes when both gammas are zero") {
        const SparseMat s = assemble_beam_stabilization(fx.space, fx.topo, cut, beam);
        CHECK(max_abs(s) == 0.0);
    }
    SECTION("face-jump term ignores globally smooth fields") {
        beam.gamma1 = 0.1;
        beam.gamma2 = 0.0;
        const SparseMat s = assemble_beam_stabilization(fx.space, fx.topo, cut, beam);
        const auto v = interpolate(fx.space, [](const Vec2& p) { return p.x() * p.x(); });
        CHECK(std::abs(v.dot(s * v)) < 1e-11 * max_abs(s));
        const auto r = random_coefficients(fx.space, 9);
        CHECK(r.dot(s * r) >= 0.0);
    }
    SECTION("positive semidefinite for random fields") {
        beam.gamma1 = 0.2;
        beam.gamma2 = 0.3;
        const SparseMat s = assemble_beam_stabilization(fx.space, fx.topo, cut, beam);
        for (const std::uint32_t seed : {1u, 2u, 3u, 4u, 5u}) {
            const auto v = random_coefficients(fx.space, seed);
            CHECK(v.dot(s * v) >= 0.0);
        }
    }
    SECTION("degree 3 includes third-order normal jumps and stays PSD") {
        const FESpace cubic = build_space(fx.mesh, 3);
        beam.gamma1 = 0.1;
        beam.gamma2 = 0.0;  // face term only: jumps up to order 3 vanish on smooth fields
        const SparseMat jumps = assemble_beam_stabilization(cubic, fx.topo, cut, beam);
        const auto smooth = interpolate(cubic, [](const Vec2& p) { return std::pow(p.x(), 3); });
        CHECK(std::abs(smooth.dot(jumps * smooth)) < 1e-9 * max_abs(jumps));
        beam.gamma2 = 0.1;
        const SparseMat s = assemble_beam_stabilization(cubic, fx.topo, cut, beam);
        for (const std::uint32_t seed : {7u, 8u}) {
            const auto v = random_coefficients(cubic, seed);
            CHECK(v.dot(s * v) >= 0.0);
        }
    }
}

TEST_CASE("beam endpoint terms") {
    const BeamFixture fx(4);

    SECTION("free ends produce nothing") {
        const BeamSpec beam = beam_41();
        const SparseMat m = assemble_beam_endpoint_terms(fx.space, fx.topo, beam);
        CHECK(max_abs(m) == 0.0);
    }

    SECTION("one simply supported end is a rank-1 penalty") {
        BeamSpec beam = beam_41();
        beam.end0 = BeamEndCondition::simply_supported;
        const SparseMat m = assemble_beam_endpoint_terms(fx.space, fx.topo, beam);
        Eigen::MatrixXd dense(m);
        CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(dense).rank() == 1);
    }

    SECTION("displacement penalty scales as h^-3") {
        BeamSpec beam = beam_41();
        beam.end0 = beam.end1 = BeamEndCondition::simply_supported;
        const BeamFixture coarse(4), fine(8);
        const SparseMat m_coarse = assemble_beam_endpoint_terms(coarse.space, coarse.topo, beam);
        const SparseMat m_fine = assemble_beam_endpoint_terms(fine.space, fine.topo, beam);
        // on the interpolant of 1 the quadratic form is beta~ C_B sum 1/h_e^3
        const auto ones_coarse = interpolate(coarse.space, [](const Vec2&) { return 1.0; });
        const auto ones_fine = interpolate(fine.space, [](const Vec2&) { return 1.0; });
        const double ratio =
            ones_fine.dot(m_fine * ones_fine) / ones_coarse.dot(m_coarse * ones_coarse);
        CHECK(ratio == Approx(8.0).epsilon(1e-11));
    }

    SECTION("endpoint outside the mesh") {
        BeamSpec beam = beam_41();
        beam.p1 = Vec2(0.499, 2.0);
        beam.end1 = BeamEndCondition::clamped;
        CHECK_THROWS_AS(assemble_beam_endpoint_terms(fx.space, fx.topo, beam), CutError);
    }
}

TEST_CASE("beam load vector") {
    const BeamFixture fx(4);
    BeamSpec beam = beam_41();
    const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);
    const double area = beam_constants(beam).area;

    SECTION("no load function means a zero vector") {
        const auto l = assemble_beam_load(fx.space, cut, beam);
        CHECK(l.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("unit line load sums to a |Sigma|") {
        beam.line_load = [](const Vec2&) { return 1.0; };
        const auto l = assemble_beam_load(fx.space, cut, beam);
        CHECK(l.sum() == Approx(area * cut.length).epsilon(1e-13));
    }
    SECTION("arc-length load sums to a/2 on a unit beam") {
        const Vec2 p0 = beam.p0;
        const Vec2 t = cut.tangent;
        beam.line_load = [p0, t](const Vec2& x) { return t.dot(x - p0); };
        const auto l = assemble_beam_load(fx.space, cut, beam);
        CHECK(l.sum() == Approx(0.5 * area).epsilon(1e-13));
    }
}

TEST_CASE("restriction to the active mesh and symmetry") {
    const BeamFixture fx(5);
    BeamSpec beam = beam_41();
    beam.p0 = Vec2(0.02, 0.31);
    beam.p1 = Vec2(0.97, 0.64);
    beam.end0 = beam.end1 = BeamEndCondition::clamped;
    beam.gamma1 = beam.gamma2 = 0.1;
    const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);
    SparseMat total = assemble_beam_form(fx.space, fx.topo, cut, beam);
    total += assemble_beam_stabilization(fx.space, fx.topo, cut, beam);
    total += assemble_beam_endpoint_terms(fx.space, fx.topo, beam);

    SECTION("rows of DOFs without active support vanish") {
        std::vector<signed char> active(fx.space.n_dofs, 0);
        for (const int t : cut.active_elements)
            for (const int dof : fx.space.dofs(t)) active[dof] = 1;
        for (int k = 0; k < total.outerSize(); ++k)
            for (SparseMat::InnerIterator it(total, k); it; ++it)
                if (it.value() != 0.0) {
                    CHECK(active[it.row()]);
                    CHECK(active[it.col()]);
                }
    }

    SECTION("symmetry of the full beam operator") {
        const SparseMat t = SparseMat(total.transpose());
        CHECK(max_abs_diff(total, t) <= 1e-12 * max_abs(total));
    }

    SECTION("zero stiffness wipes out every term") {
        BeamSpec inert = beam;
        inert.youngs_modulus = 0.0;
        SparseMat m = assemble_beam_form(fx.space, fx.topo, cut, inert);
        m += assemble_beam_stabilization(fx.space, fx.topo, cut, inert);
        m += assemble_beam_endpoint_terms(fx.space, fx.topo, inert);
        CHECK(max_abs(m) == 0.0);
    }
}

TEST_CASE("stabilized standalone beam operator is positive definite on active DOFs") {
    const BeamFixture fx(8);
    BeamSpec beam = beam_41();
    beam.end0 = beam.end1 = BeamEndCondition::clamped;
    beam.gamma1 = beam.gamma2 = 0.1;
    const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);
    SparseMat total = assemble_beam_form(fx.space, fx.topo, cut, beam);
    total += assemble_beam_stabilization(fx.space, fx.topo, cut, beam);
    total += assemble_beam_endpoint_terms(fx.space, fx.topo, beam);

    std::vector<int> active_dofs;
    {
        std::vector<signed char> active(fx.space.n_dofs, 0);
        for (const int t : cut.active_elements)
            for (const int dof : fx.space.dofs(t)) active[dof] = 1;
        for (int i = 0; i < fx.space.n_dofs; ++i)
            if (active[i]) active_dofs.push_back(i);
    }
    Eigen::MatrixXd dense(active_dofs.size(), active_dofs.size());
    for (std::size_t i = 0; i < active_dofs.size(); ++i)
        for (std::size_t j = 0; j < active_dofs.size(); ++j)
            dense(i, j) = total.coeff(active_dofs[i], active_dofs[j]);
    const Eigen::LLT<Eigen::MatrixXd> llt(dense);
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("small beam translations change entries continuously") {
    const BeamFixture fx(4);
    BeamSpec beam = beam_41();
    const CutTopology cut = compute_cut_topology(fx.mesh, fx.topo, beam.p0, beam.p1);
    BeamSpec shifted = beam;
    shifted.p0.x() += 1e-9;
    shifted.p1.x() += 1e-9;
    const CutTopology cut2 = compute_cut_topology(fx.mesh, fx.topo, shifted.p0, shifted.p1);
    REQUIRE(cut2.points.size() == cut.points.size());
    const SparseMat a = assemble_beam_form(fx.space, fx.topo, cut, beam);
    const SparseMat b = assemble_beam_form(fx.space, fx.topo, cut2, shifted);
    CHECK(max_abs_diff(a, b) <= 1e-4 * max_abs(a));
}
