#pragma once

#include "cutplate/plate.hpp"

namespace cutplate {

// The clamped-compatible quartic bubble u(x,y) = x^2 (1-x)^2 y^2 (1-y)^2 on
// the unit square: u and its normal derivative vanish on the boundary.
namespace detail {

inline double bubble1(double s) { return s * s * (1.0 - s) * (1.0 - s); }
inline double bubble1_d(double s) { return 2.0 * s - 6.0 * s * s + 4.0 * s * s * s; }
inline double bubble1_dd(double s) { return 2.0 - 12.0 * s + 12.0 * s * s; }

}  // namespace detail

inline AnalyticField quartic_bubble() {
    using detail::bubble1;
    using detail::bubble1_d;
    using detail::bubble1_dd;
    AnalyticField f;
    f.value = [](const Vec2& p) { return bubble1(p.x()) * bubble1(p.y()); };
    f.grad = [](const Vec2& p) {
        return Vec2(bubble1_d(p.x()) * bubble1(p.y()), bubble1(p.x()) * bubble1_d(p.y()));
    };
    f.hess = [](const Vec2& p) {
        Mat2 h;
        h(0, 0) = bubble1_dd(p.x()) * bubble1(p.y());
        h(0, 1) = h(1, 0) = bubble1_d(p.x()) * bubble1_d(p.y());
        h(1, 1) = bubble1(p.x()) * bubble1_dd(p.y());
        return h;
    };
    return f;
}

// Closed-form biharmonic of the quartic bubble.
inline double quartic_bubble_biharmonic(const Vec2& p) {
    using detail::bubble1;
    using detail::bubble1_dd;
    return 24.0 * (bubble1(p.x()) + bubble1(p.y())) +
           2.0 * bubble1_dd(p.x()) * bubble1_dd(p.y());
}

// Load manufactured from the quartic bubble:
// f = div div sigma_P(grad u*) = C_P / (1 - nu) * biharmonic(u*).
inline LoadSpec manufactured_rhs(const PlateSpec& spec) {
    const double scale = plate_constant(spec) / (1.0 - spec.poisson);
    return {[scale](const Vec2& p) { return scale * quartic_bubble_biharmonic(p); }};
}

// The closed-form load f = 8 C_P (3 (x^2(1-x)^2 + y^2(1-y)^2)
//                              + (1 - 6x(1-x)) (1 - 6y(1-y))),
// selectable as load kind "paper_f". It equals C_P * biharmonic(u*), i.e. the
// manufactured load at nu = 0; for nu > 0 it is smaller than
// div div sigma_P(grad u*) by the factor 1/(1-nu), so the quartic bubble is
// the exact clamped solution only when combined with manufactured_rhs.
inline LoadSpec paper_printed_load(const PlateSpec& spec) {
    const double c_p = plate_constant(spec);
    return {[c_p](const Vec2& p) {
        const double x = p.x(), y = p.y();
        return 8.0 * c_p *
               (3.0 * (x * x * (1 - x) * (1 - x) + y * y * (1 - y) * (1 - y)) +
                (1.0 - 6.0 * x * (1.0 - x)) * (1.0 - 6.0 * y * (1.0 - y)));
    }};
}

}  // namespace cutplate
