#include <catch2/catch_amalgamated.hpp>

#include "cutplate/fe_space.hpp"
#include "test_helpers.hpp"

using namespace cutplate;
using cutplate::testing::random_coefficients;
using cutplate::testing::single_triangle_mesh;
using Catch::Approx;

TEST_CASE("DOF counts") {
    SECTION("n=2 structured, k=2: vertices + edges") {
        const Mesh mesh = generate_structured_unit_square(2);
        const FESpace space = build_space(mesh, 2);
        CHECK(space.n_dofs == 9 + 16);
        CHECK(space.dofs_per_cell == 6);
    }
    SECTION("single triangle") {
        const Mesh mesh = single_triangle_mesh();
        CHECK(build_space(mesh, 2).n_dofs == 6);
        CHECK(build_space(mesh, 3).n_dofs == 10);
    }
    SECTION("degree below 2 is rejected") {
        const Mesh mesh = single_triangle_mesh();
        CHECK_THROWS_AS(build_space(mesh, 1), FemError);
    }
}

TEST_CASE("partition of unity and derivative sums") {
    const Mesh mesh = generate_structured_unit_square(3);
    for (const int degree : {2, 3}) {
        const FESpace space = build_space(mesh, degree);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(0.05, 0.95);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec2 p(dist(rng), dist(rng));
            const int tri = mesh.locate(p);
            const auto basis = eval_basis(space, tri, p);
            double value = 0.0;
            Vec2 grad = Vec2::Zero();
            Mat2 hess = Mat2::Zero();
            for (const auto& b : basis) {
                value += b.value;
                grad += b.grad;
                hess += b.hess;
            }
            CHECK(value == Approx(1.0).epsilon(1e-12));
            CHECK(grad.norm() < 1e-10);
            CHECK(hess.norm() < 1e-9);
        }
    }
}

TEST_CASE("interpolation reproduces polynomials up to the space degree") {
    const Mesh mesh = generate_structured_unit_square(2);

    SECTION("x^2 has Hessian [[2,0],[0,0]] everywhere") {
        const FESpace space = build_space(mesh, 2);
        const auto coeffs = interpolate(space, [](const Vec2& p) { return p.x() * p.x(); });
        for (const Vec2 p : {Vec2(0.3, 0.2), Vec2(0.71, 0.93), Vec2(0.5, 0.1)}) {
            const auto field = evaluate_field(space, coeffs, p);
            CHECK(field.hess(0, 0) == Approx(2.0).epsilon(1e-11));
            CHECK(std::abs(field.hess(0, 1)) < 1e-11);
            CHECK(std::abs(field.hess(1, 1)) < 1e-11);
        }
    }
    SECTION("xy has unit mixed Hessian entry") {
        const FESpace space = build_space(mesh, 2);
        const auto coeffs = interpolate(space, [](const Vec2& p) { return p.x() * p.y(); });
        const auto field = evaluate_field(space, coeffs, Vec2(0.37, 0.81));
        CHECK(field.hess(0, 1) == Approx(1.0).epsilon(1e-11));
    }
    SECTION("zero function and linear reproduction") {
        const FESpace space = build_space(mesh, 2);
        const auto zero = interpolate(space, [](const Vec2&) { return 0.0; });
        CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
        const auto linear = interpolate(space, [](const Vec2& p) { return p.x(); });
        for (const Vec2 p : {Vec2(0.2, 0.9), Vec2(0.62, 0.34)})
            CHECK(evaluate_field(space, linear, p).value == Approx(p.x()).epsilon(1e-14));
    }
    SECTION("nodal values match the function exactly") {
        const FESpace space = build_space(mesh, 2);
        const auto f = [](const Vec2& p) {
            return p.x() * p.x() * (1 - p.x()) * (1 - p.x()) * p.y() * p.y() * (1 - p.y()) *
                   (1 - p.y());
        };
        const auto coeffs = interpolate(space, f);
        for (int i = 0; i < space.n_dofs; ++i)
            CHECK(coeffs[i] == f(space.dof_node[i]));
    }
    SECTION("full polynomial reproduction for k=2 and k=3") {
        for (const int degree : {2, 3}) {
            const FESpace space = build_space(mesh, degree);
            const auto f = [degree](const Vec2& p) {
                double v = 1.0 + 2.0 * p.x() - p.y() + 0.5 * p.x() * p.y() - p.x() * p.x();
                if (degree >= 3) v += p.x() * p.x() * p.y() - 0.25 * p.y() * p.y() * p.y();
                return v;
            };
            const auto coeffs = interpolate(space, f);
            std::mt19937 rng(11);
            std::uniform_real_distribution<double> dist(0.0, 1.0);
            for (int trial = 0; trial < 10; ++trial) {
                const Vec2 p(dist(rng), dist(rng));
                CHECK(evaluate_field(space, coeffs, p).value == Approx(f(p)).margin(1e-12));
            }
        }
    }
    SECTION("value, gradient and Hessian at all quadrature points") {
        for (const int degree : {2, 3}) {
            const FESpace space = build_space(mesh, degree);
            const bool cubic = degree >= 3;
            const auto f = [cubic](const Vec2& p) {
                double v = 1.0 + 2.0 * p.x() - p.y() + 0.5 * p.x() * p.y() - p.x() * p.x();
                if (cubic) v += p.x() * p.x() * p.y();
                return v;
            };
            const auto grad_f = [cubic](const Vec2& p) {
                Vec2 g(2.0 + 0.5 * p.y() - 2.0 * p.x(), -1.0 + 0.5 * p.x());
                if (cubic) g += Vec2(2.0 * p.x() * p.y(), p.x() * p.x());
                return g;
            };
            const auto hess_f = [cubic](const Vec2& p) {
                Mat2 h;
                h << -2.0, 0.5, 0.5, 0.0;
                if (cubic) {
                    h(0, 0) += 2.0 * p.y();
                    h(0, 1) += 2.0 * p.x();
                    h(1, 0) += 2.0 * p.x();
                }
                return h;
            };
            const auto coeffs = interpolate(space, f);
            const QuadratureRule rule = triangle_rule(2 * degree);
            std::vector<BasisEval> basis;
            for (int t = 0; t < mesh.num_triangles(); ++t) {
                ElementBasis eb(space, t);
                const auto dofs = space.dofs(t);
                for (const Vec2& ref : rule.points) {
                    eb.eval(ref, basis);
                    const Vec2 x = eb.map(ref);
                    double value = 0.0;
                    Vec2 grad = Vec2::Zero();
                    Mat2 hess = Mat2::Zero();
                    for (int i = 0; i < eb.size(); ++i) {
                        value += coeffs[dofs[i]] * basis[i].value;
                        grad += coeffs[dofs[i]] * basis[i].grad;
                        hess += coeffs[dofs[i]] * basis[i].hess;
                    }
                    CHECK(value == Approx(f(x)).margin(1e-12 * std::abs(f(x)) + 1e-13));
                    CHECK((grad - grad_f(x)).norm() <= 1e-12 * (1.0 + grad_f(x).norm()));
                    CHECK((hess - hess_f(x)).norm() <= 1e-11 * (1.0 + hess_f(x).norm()));
                }
            }
        }
    }
}

TEST_CASE("fields are continuous across faces") {
    const Mesh mesh = generate_structured_unit_square(3);
    const FaceTopology topo = build_face_topology(mesh);
    for (const int degree : {2, 3}) {
        const FESpace space = build_space(mesh, degree);
        const auto coeffs = random_coefficients(space, 42);
        for (const Face& face : topo.faces) {
            if (face.boundary()) continue;
            for (const double s : {0.21, 0.5, 0.87}) {
                const Vec2 x = mesh.vertices[face.v0] +
                               s * (mesh.vertices[face.v1] - mesh.vertices[face.v0]);
                double plus = 0.0, minus = 0.0;
                const auto bp = eval_basis(space, face.tri_plus, x);
                const auto dp = space.dofs(face.tri_plus);
                for (std::size_t i = 0; i < bp.size(); ++i) plus += coeffs[dp[i]] * bp[i].value;
                const auto bm = eval_basis(space, face.tri_minus, x);
                const auto dm = space.dofs(face.tri_minus);
                for (std::size_t i = 0; i < bm.size(); ++i)
                    minus += coeffs[dm[i]] * bm[i].value;
                CHECK(plus == Approx(minus).margin(1e-12));
            }
        }
    }
}

TEST_CASE("P2 Hessians are constant per triangle") {
    const Mesh mesh = generate_structured_unit_square(2);
    const FESpace space = build_space(mesh, 2);
    const auto coeffs = random_coefficients(space, 3);
    ElementBasis eb(space, 1);
    std::vector<BasisEval> basis;
    Mat2 h1 = Mat2::Zero(), h2 = Mat2::Zero();
    eb.eval(Vec2(0.21, 0.33), basis);
    const auto dofs = space.dofs(1);
    for (int i = 0; i < eb.size(); ++i) h1 += coeffs[dofs[i]] * basis[i].hess;
    eb.eval(Vec2(0.68, 0.11), basis);
    for (int i = 0; i < eb.size(); ++i) h2 += coeffs[dofs[i]] * basis[i].hess;
    CHECK((h1 - h2).norm() < 1e-12 * h1.norm());
}

TEST_CASE("DOF numbering is deterministic") {
    const Mesh mesh = generate_structured_unit_square(4);
    const FESpace a = build_space(mesh, 2);
    const FESpace b = build_space(mesh, 2);
    CHECK(a.cell_dofs == b.cell_dofs);
}

TEST_CASE("point membership errors") {
    const Mesh mesh = generate_structured_unit_square(2);
    const FESpace space = build_space(mesh, 2);
    CHECK_THROWS_AS(eval_basis(space, 0, Vec2(0.9, 0.9)), FemError);
    const auto coeffs = random_coefficients(space, 1);
    CHECK_THROWS_AS(evaluate_field(space, coeffs, Vec2(1.5, 0.5)), FemError);
}

TEST_CASE("directional derivatives match the Hessian and vanish at high order") {
    const Mesh mesh = generate_structured_unit_square(2);
    const FESpace space = build_space(mesh, 2);
    ElementBasis eb(space, 2);
    const Vec2 dir = Vec2(0.6, 0.8);
    const Vec2 ref(0.3, 0.4);
    std::vector<BasisEval> basis;
    eb.eval(ref, basis);
    for (int i = 0; i < eb.size(); ++i) {
        CHECK(eb.dir_deriv(i, ref, dir, 1) == Approx(dir.dot(basis[i].grad)).margin(1e-13));
        CHECK(eb.dir_deriv(i, ref, dir, 2) ==
              Approx(dir.dot(basis[i].hess * dir)).margin(1e-12));
        // third derivatives of quadratics vanish
        CHECK(eb.third_deriv(i, ref, dir, dir, dir) == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("third derivatives of a cubic field are exact") {
    const Mesh mesh = generate_structured_unit_square(2);
    const FESpace space = build_space(mesh, 3);
    // f = x^3: fxxx = 6, all other third partials 0
    const auto coeffs = interpolate(space, [](const Vec2& p) { return std::pow(p.x(), 3); });
    ElementBasis eb(space, 0);
    const Vec2 ref(0.25, 0.25);
    const auto dofs = space.dofs(0);
    double dxxx = 0.0, mixed = 0.0;
    for (int i = 0; i < eb.size(); ++i) {
        dxxx += coeffs[dofs[i]] * eb.third_deriv(i, ref, Vec2(1, 0), Vec2(1, 0), Vec2(1, 0));
        mixed += coeffs[dofs[i]] * eb.third_deriv(i, ref, Vec2(1, 0), Vec2(1, 0), Vec2(0, 1));
    }
    CHECK(dxxx == Approx(6.0).epsilon(1e-10));
    CHECK(mixed == Approx(0.0).margin(1e-10));
}
