#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace cutplate {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Twice the signed area of triangle (a,b,c); positive for counter-clockwise order.
inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * orient2d(a, b, c);
}

inline double cross2(const Vec2& a, const Vec2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

// Rotation of v by +90 degrees.
inline Vec2 perp(const Vec2& v) {
    return Vec2(-v.y(), v.x());
}

// Barycentric coordinates of p with respect to triangle (a,b,c).
inline std::array<double, 3> barycentric(const Vec2& a, const Vec2& b, const Vec2& c,
                                         const Vec2& p) {
    const double d = orient2d(a, b, c);
    return {orient2d(p, b, c) / d, orient2d(a, p, c) / d, orient2d(a, b, p) / d};
}

inline bool barycentric_inside(const std::array<double, 3>& lambda, double tol) {
    return lambda[0] >= -tol && lambda[1] >= -tol && lambda[2] >= -tol;
}

}  // namespace cutplate
