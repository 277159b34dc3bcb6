#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cutplate/geometry.hpp"

namespace cutplate {

// Gauss rule on the unit segment [0,1].
struct SegmentRule {
    std::vector<double> points;
    std::vector<double> weights;
    int exactness = 0;
};

// Quadrature on the reference triangle {x >= 0, y >= 0, x + y <= 1}.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int exactness = 0;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace detail

// Gauss-Legendre rule on [0,1] exact for polynomials of the given degree.
inline SegmentRule segment_rule(int degree) {
    if (degree < 0) throw std::invalid_argument("segment_rule: degree must be >= 0");
    const int n = degree / 2 + 1;
    std::vector<double> x, w;
    detail::gauss_legendre(n, x, w);
    SegmentRule rule;
    rule.exactness = degree;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.points[i] = 0.5 * (x[i] + 1.0);
        rule.weights[i] = 0.5 * w[i];
    }
    return rule;
}

// Conical-product Gauss rule on the reference triangle, exact for total degree
// <= degree. Built from the Duffy map x = u(1-v), y = v with the Jacobian
// (1-v) folded into the weights.
inline QuadratureRule triangle_rule(int degree) {
    if (degree < 0) throw std::invalid_argument("triangle_rule: degree must be >= 0");
    const int m = (degree + 3) / 2;  // exactness 2m-1 >= degree+1 in the collapsed direction
    std::vector<double> gx, gw;
    detail::gauss_legendre(m, gx, gw);

    QuadratureRule rule;
    rule.exactness = degree;
    rule.points.reserve(static_cast<std::size_t>(m) * m);
    rule.weights.reserve(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        const double u = 0.5 * (gx[i] + 1.0), wu = 0.5 * gw[i];
        for (int j = 0; j < m; ++j) {
            const double v = 0.5 * (gx[j] + 1.0), wv = 0.5 * gw[j];
            rule.points.emplace_back(u * (1.0 - v), v);
            rule.weights.push_back(wu * wv * (1.0 - v));
        }
    }
    return rule;
}

}  // namespace cutplate
