#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = -1.0;
    double b = 1.0;
};

// Gauss-Legendre rule on (a,b), exact for polynomials of degree <= 2m-1.
// Nodes are found by Newton iteration on P_m with Chebyshev initial guesses.
inline QuadratureRule gauss_legendre(int m, double a = -1.0, double b = 1.0) {
    if (m < 1) throw InputError("gauss_legendre: node count must be >= 1");
    if (!std::isfinite(a) || !std::isfinite(b))
        throw InputError("gauss_legendre: interval must be finite");

    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(m);
    rule.weights.resize(m);

    const double pi = 3.14159265358979323846;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
            double p0 = 1.0, p1 = x;
            for (int k = 1; k < m; ++k) {
                double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[m - 1 - i] = 0.5 * (b - a) * x + 0.5 * (a + b);
        rule.weights[m - 1 - i] = 0.5 * (b - a) * w;
    }
    return rule;
}

namespace detail {

inline const QuadratureRule& gl15() {
    static const QuadratureRule rule = gauss_legendre(15);
    return rule;
}

inline double gl15_apply(const std::function<double(double)>& f, double a, double b) {
    const QuadratureRule& r = gl15();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        sum += r.weights[i] * f(mid + half * r.nodes[i]);
    return half * sum;
}

inline double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                           double whole, double tol, int depth, bool& converged) {
    double mid = 0.5 * (a + b);
    double left = gl15_apply(f, a, mid);
    double right = gl15_apply(f, mid, b);
    double diff = left + right - whole;
    if (std::abs(diff) <= tol || depth >= 48)
        return left + right;
    if (depth >= 40) converged = false;
    bool cl = true, cr = true;
    double res = adaptive_rec(f, a, mid, left, 0.5 * tol, depth + 1, cl) +
                 adaptive_rec(f, mid, b, right, 0.5 * tol, depth + 1, cr);
    converged = cl && cr;
    return res;
}

} // namespace detail

// Adaptive quadrature over (a,b); either bound may be infinite, in which
// case the interval is mapped through u -> c + L (1+u)/(1-u).  The default
// scale L = 10 suits kernels with super-exponential decay.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-10, double map_scale = 10.0) {
    bool ainf = std::isinf(a), binf = std::isinf(b);
    if (!ainf && !binf) {
        bool ok = true;
        double whole = detail::gl15_apply(f, a, b);
        double v = detail::adaptive_rec(f, a, b, whole, tol, 0, ok);
        if (!ok) throw NumericalError("integrate_adaptive: refinement limit reached", v);
        return v;
    }
    if (ainf && binf) {
        return integrate_adaptive(f, 0.0, std::numeric_limits<double>::infinity(), 0.5 * tol, map_scale) +
               integrate_adaptive(f, -std::numeric_limits<double>::infinity(), 0.0, 0.5 * tol, map_scale);
    }
    if (binf) {
        const double L = map_scale;
        auto g = [&](double u) {
            double d = 1.0 - u;
            double x = a + L * (1.0 + u) / d;
            return f(x) * 2.0 * L / (d * d);
        };
        return integrate_adaptive(g, -1.0, 1.0, tol);
    }
    // a = -inf: reflect
    return integrate_adaptive([&](double x) { return f(-x); }, -b,
                              std::numeric_limits<double>::infinity(), tol, map_scale);
}

} // namespace rmt
