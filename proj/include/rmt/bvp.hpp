#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

// Two-point boundary value problem q''(t) = f(t, q) with Dirichlet data.
struct BvpProblem {
    std::function<double(double, double)> f;    // right-hand side f(t,q)
    std::function<double(double, double)> dfdq; // partial derivative wrt q
    double a = 0.0, b = 1.0;
    double left_value = 0.0, right_value = 0.0;
};

struct BvpSolution {
    std::vector<double> t;
    std::vector<double> q;
    std::vector<double> dq;
    double residual = 0.0; // max collocation residual |q'' - f|
    int newton_iterations = 0;
};

namespace detail {

inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Numerov residual of the discretized ODE at interior node i, in ODE units.
inline double numerov_residual(const BvpProblem& p, const std::vector<double>& t,
                               const std::vector<double>& q, double h, std::size_t i) {
    double fi = p.f(t[i], q[i]);
    double fl = p.f(t[i - 1], q[i - 1]);
    double fr = p.f(t[i + 1], q[i + 1]);
    return (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (h * h) - (fr + 10.0 * fi + fl) / 12.0;
}

} // namespace detail

// Numerov collocation (fourth order) with damped Newton iteration.
inline BvpSolution solve_bvp(const BvpProblem& p, int mesh_points, double tol = 1e-10,
                             const std::function<double(double)>& initial_guess = nullptr) {
    if (mesh_points < 3) throw InputError("solve_bvp: mesh must have at least 3 points");
    if (!std::isfinite(p.left_value) || !std::isfinite(p.right_value))
        throw InputError("solve_bvp: boundary values must be finite");

    const int m = mesh_points;
    const double h = (p.b - p.a) / (m - 1);
    BvpSolution sol;
    sol.t.resize(m);
    sol.q.resize(m);
    for (int i = 0; i < m; ++i) sol.t[i] = p.a + i * h;

    if (initial_guess) {
        for (int i = 0; i < m; ++i) sol.q[i] = initial_guess(sol.t[i]);
    } else {
        for (int i = 0; i < m; ++i) {
            double s = static_cast<double>(i) / (m - 1);
            sol.q[i] = (1.0 - s) * p.left_value + s * p.right_value;
        }
    }
    sol.q.front() = p.left_value;
    sol.q.back() = p.right_value;

    const int interior = m - 2;
    std::vector<double> res(interior), lower(interior), diag(interior), upper(interior);

    auto fill_residual = [&](const std::vector<double>& q) {
        double norm = 0.0;
        for (int i = 1; i <= interior; ++i) {
            res[i - 1] = detail::numerov_residual(p, sol.t, q, h, i);
            norm = std::max(norm, std::abs(res[i - 1]));
        }
        return norm;
    };

    double norm = fill_residual(sol.q);
    // The residual carries a 1/h^2 term, so rounding alone floors it near
    // eps * max|q| / h^2; do not demand more than that.
    auto effective_tol = [&] {
        double qmax = 1.0;
        for (double v : sol.q) qmax = std::max(qmax, std::abs(v));
        return std::max(tol, 100.0 * std::numeric_limits<double>::epsilon() * qmax / (h * h));
    };
    double tol_eff = effective_tol();
    const int max_newton = 60;
    int it = 0;
    for (; it < max_newton && norm > tol_eff; ++it) {
        const double c = 1.0 / (h * h);
        for (int i = 1; i <= interior; ++i) {
            lower[i - 1] = c - p.dfdq(sol.t[i - 1], sol.q[i - 1]) / 12.0;
            diag[i - 1] = -2.0 * c - 10.0 * p.dfdq(sol.t[i], sol.q[i]) / 12.0;
            upper[i - 1] = c - p.dfdq(sol.t[i + 1], sol.q[i + 1]) / 12.0;
            res[i - 1] = -res[i - 1];
        }
        detail::thomas_solve(lower, diag, upper, res);

        // Backtracking line search on the residual norm.
        double step = 1.0;
        std::vector<double> trial = sol.q;
        double new_norm = norm;
        for (int bt = 0; bt < 30; ++bt) {
            for (int i = 1; i <= interior; ++i) trial[i] = sol.q[i] + step * res[i - 1];
            std::vector<double> save = res;
            new_norm = fill_residual(trial);
            res = save;
            if (new_norm < norm || new_norm <= tol_eff) break;
            step *= 0.5;
        }
        if (new_norm >= norm && new_norm > tol_eff) {
            sol.residual = norm;
            sol.newton_iterations = it + 1;
            throw NumericalError("solve_bvp: Newton iteration stalled; retry with a finer mesh",
                                 norm);
        }
        sol.q = trial;
        norm = fill_residual(sol.q);
        tol_eff = effective_tol();
    }
    if (norm > tol_eff)
        throw NumericalError("solve_bvp: Newton failed to reach tolerance", norm);

    sol.residual = norm;
    sol.newton_iterations = it;

    // First derivative by fourth-order differences.
    sol.dq.resize(m);
    auto& q = sol.q;
    for (int i = 2; i < m - 2; ++i)
        sol.dq[i] = (-q[i + 2] + 8.0 * q[i + 1] - 8.0 * q[i - 1] + q[i - 2]) / (12.0 * h);
    if (m >= 5) {
        sol.dq[0] = (-25.0 * q[0] + 48.0 * q[1] - 36.0 * q[2] + 16.0 * q[3] - 3.0 * q[4]) / (12.0 * h);
        sol.dq[1] = (-3.0 * q[0] - 10.0 * q[1] + 18.0 * q[2] - 6.0 * q[3] + q[4]) / (12.0 * h);
        sol.dq[m - 1] = (25.0 * q[m - 1] - 48.0 * q[m - 2] + 36.0 * q[m - 3] - 16.0 * q[m - 4] +
                         3.0 * q[m - 5]) / (12.0 * h);
        sol.dq[m - 2] = (3.0 * q[m - 1] + 10.0 * q[m - 2] - 18.0 * q[m - 3] + 6.0 * q[m - 4] -
                         q[m - 5]) / (12.0 * h);
    } else {
        for (int i = 0; i < m; ++i)
            sol.dq[i] = (q[std::min(i + 1, m - 1)] - q[std::max(i - 1, 0)]) /
                        (h * (std::min(i + 1, m - 1) - std::max(i - 1, 0)));
    }
    return sol;
}

} // namespace rmt
