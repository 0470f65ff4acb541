#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "rmt/bvp.hpp"
#include "rmt/errors.hpp"
#include "rmt/orthopoly.hpp"
#include "rmt/quadrature.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

struct AiryValues {
    double x = 0.0;
    double ai = 0.0;
    double ai_prime = 0.0;
};

namespace detail {

// Ai and Ai' from the asymptotic series at large positive x.
inline AiryValues airy_asymptotic(double x) {
    double zeta = (2.0 / 3.0) * std::pow(x, 1.5);
    double u = 1.0, v = 1.0, su = 1.0, sv = 1.0, sign = -1.0;
    for (int k = 1; k <= 7; ++k) {
        u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
        v = u * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
        double zk = std::pow(zeta, -k);
        su += sign * u * zk;
        sv += sign * v * zk;
        sign = -sign;
    }
    double pref = std::exp(-zeta) / (2.0 * std::sqrt(kPi));
    AiryValues out;
    out.x = x;
    out.ai = pref * su / std::pow(x, 0.25);
    out.ai_prime = -pref * sv * std::pow(x, 0.25);
    return out;
}

// Dense table of the Airy ODE solution on [-40, 12], anchored at x = 12 by
// the asymptotic series and integrated leftward with RK4.  Leftward
// integration keeps both fundamental solutions bounded.
class AiryTable {
  public:
    static const AiryTable& instance() {
        static AiryTable table;
        return table;
    }

    AiryValues eval(double x) const {
        if (x >= x_hi_) return airy_asymptotic(x);
        std::size_t i = static_cast<std::size_t>((x_hi_ - x) / h_);
        if (i >= y_.size() - 1) i = y_.size() - 2;
        double x0 = x_hi_ - i * h_;     // left cell edge in decreasing order
        double x1 = x0 - h_;
        // cubic Hermite on [x1, x0] using y' stored and y'' = x y
        double t = (x - x1) / h_;
        double y0 = y_[i + 1], y1 = y_[i];   // values at x1, x0
        double d0 = dy_[i + 1], d1 = dy_[i]; // derivatives at x1, x0
        double hh = h_;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        AiryValues out;
        out.x = x;
        out.ai = h00 * y0 + h10 * hh * d0 + h01 * y1 + h11 * hh * d1;
        // interpolate Ai' the same way, with Ai'' = x Ai as its derivative
        double dd0 = x1 * y0, dd1 = x0 * y1;
        out.ai_prime = h00 * d0 + h10 * hh * dd0 + h01 * d1 + h11 * hh * dd1;
        return out;
    }

    double x_lo() const { return x_lo_; }

  private:
    AiryTable() {
        AiryValues anchor = airy_asymptotic(x_hi_);
        std::size_t steps = static_cast<std::size_t>(std::llround((x_hi_ - x_lo_) / h_));
        y_.resize(steps + 1);
        dy_.resize(steps + 1);
        double y = anchor.ai, dy = anchor.ai_prime;
        y_[0] = y;
        dy_[0] = dy;
        const double h = -h_; // integrate leftward
        for (std::size_t i = 1; i <= steps; ++i) {
            double x = x_hi_ - (i - 1) * h_;
            // RK4 on (y, y')' = (y', x y)
            double k1y = dy, k1d = x * y;
            double k2y = dy + 0.5 * h * k1d, k2d = (x + 0.5 * h) * (y + 0.5 * h * k1y);
            double k3y = dy + 0.5 * h * k2d, k3d = (x + 0.5 * h) * (y + 0.5 * h * k2y);
            double k4y = dy + h * k3d, k4d = (x + h) * (y + h * k3y);
            y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
            dy += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
            y_[i] = y;
            dy_[i] = dy;
        }
    }

    static constexpr double x_lo_ = -40.0;
    static constexpr double x_hi_ = 12.0;
    static constexpr double h_ = 1e-3;
    std::vector<double> y_, dy_;
};

inline AiryValues airy_unchecked(double x) { return AiryTable::instance().eval(x); }

} // namespace detail

// Airy function and derivative, defined as the decaying solution of
// Ai'' = x Ai with the standard large-x normalization.
inline AiryValues airy(double x) {
    if (x < -40.0 || x > 40.0) throw InputError("airy: x outside [-40, 40]");
    return detail::airy_unchecked(x);
}

enum class KernelKind { sine, airy };

inline double kernel_eval(KernelKind kind, double x, double y) {
    if (kind == KernelKind::sine) {
        double d = x - y;
        if (std::abs(d) < 1e-8) {
            double pd = kPi * d;
            return 1.0 - pd * pd / 6.0;
        }
        return std::sin(kPi * d) / (kPi * d);
    }
    double d = x - y;
    if (std::abs(d) < 1e-6) {
        double m = 0.5 * (x + y);
        AiryValues a = detail::airy_unchecked(m);
        return a.ai_prime * a.ai_prime - m * a.ai * a.ai;
    }
    AiryValues ax = detail::airy_unchecked(x);
    AiryValues ay = detail::airy_unchecked(y);
    return (ax.ai * ay.ai_prime - ax.ai_prime * ay.ai) / d;
}

struct FredholmConfig {
    int nodes = 40;
    double map_scale = 10.0;
    double tolerance = 1e-8;
};

namespace detail {

inline double nystrom_det(const std::function<double(double, double)>& kernel, double a, double b,
                          int m, double map_scale) {
    QuadratureRule rule = gauss_legendre(m);
    std::vector<double> x(m), w(m);
    const bool semi = std::isinf(b);
    for (int i = 0; i < m; ++i) {
        double u = rule.nodes[i];
        if (semi) {
            double d = 1.0 - u;
            x[i] = a + map_scale * (1.0 + u) / d;
            w[i] = rule.weights[i] * 2.0 * map_scale / (d * d);
        } else {
            x[i] = 0.5 * (b - a) * u + 0.5 * (a + b);
            w[i] = rule.weights[i] * 0.5 * (b - a);
        }
    }
    Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < m; ++i) {
        double si = std::sqrt(w[i]);
        for (int j = 0; j < m; ++j)
            mat(i, j) -= si * kernel(x[i], x[j]) * std::sqrt(w[j]);
    }
    return mat.determinant();
}

} // namespace detail

// Fredholm determinant Det(1 - K) on (a,b) or (a, +inf) by Nystrom
// discretization on Gauss-Legendre nodes, with a node-doubling check.
inline double fredholm_det(const std::function<double(double, double)>& kernel, double a, double b,
                           const FredholmConfig& cfg = {}) {
    if (cfg.nodes < 8) throw InputError("fredholm_det: need at least 8 nodes");
    double prev = detail::nystrom_det(kernel, a, b, cfg.nodes, cfg.map_scale);
    int m = 2 * cfg.nodes;
    for (int attempt = 0; attempt < 2; ++attempt, m *= 2) {
        double cur = detail::nystrom_det(kernel, a, b, m, cfg.map_scale);
        if (std::abs(cur - prev) <= cfg.tolerance) {
            if (cur > 1.0 && cur < 1.0 + 1e-8) cur = 1.0;
            if (cur < 0.0 && cur > -1e-8) cur = 0.0;
            return cur;
        }
        prev = cur;
    }
    throw NumericalError("fredholm_det: node doubling did not converge", prev);
}

struct PainleveSolution {
    std::vector<double> t;
    std::vector<double> q;
    std::vector<double> dq;
    double residual = 0.0;
};

// Hastings-McLeod solution of q'' = 2 q^3 + t q on [-L, T], pinned to
// sqrt(-t/2) on the left and Ai(t) on the right.  Solved as a two-point
// BVP; shooting is unusable because the solution is a separatrix.
inline PainleveSolution hastings_mcleod(double L, double T, int mesh_points = 0) {
    if (L < 6.0 || T < 6.0) throw InputError("hastings_mcleod: need L >= 6 and T >= 6");
    if (mesh_points == 0) mesh_points = static_cast<int>((L + T) / 0.005) + 1;

    BvpProblem prob;
    prob.f = [](double t, double q) { return 2.0 * q * q * q + t * q; };
    prob.dfdq = [](double t, double q) { return 6.0 * q * q + t; };
    prob.a = -L;
    prob.b = T;
    prob.left_value = std::sqrt(L / 2.0);
    prob.right_value = detail::airy_unchecked(T).ai;

    auto guess = [](double t) {
        if (t <= -1.0) return std::sqrt(-t / 2.0);
        if (t >= 1.0) return detail::airy_unchecked(t).ai;
        double left = std::sqrt(0.5), right = detail::airy_unchecked(1.0).ai;
        double s = 0.5 * (t + 1.0);
        return (1.0 - s) * left + s * right;
    };

    BvpSolution sol = solve_bvp(prob, mesh_points, 1e-10, guess);
    PainleveSolution out;
    out.t = std::move(sol.t);
    out.q = std::move(sol.q);
    out.dq = std::move(sol.dq);
    out.residual = sol.residual;
    for (double v : out.q)
        if (v <= 0.0)
            throw NumericalError("hastings_mcleod: solution lost positivity", v);
    return out;
}

enum class TwMethod { fredholm, painleve };
enum class Tw1Variant { sqrt_tw2, plain };

namespace detail {

// Cumulative integrals from the right of the Painleve-route integrands,
// on the Hastings-McLeod mesh.
struct HmCache {
    PainleveSolution sol;
    std::vector<double> f_tw2; // q'^2 - t q^2 - q^4
    std::vector<double> f_q;   // q
    std::vector<double> cum_tw2;
    std::vector<double> cum_q;

    HmCache() : sol(hastings_mcleod(16.0, 10.0)) {
        const std::size_t m = sol.t.size();
        f_tw2.resize(m);
        f_q.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            double q = sol.q[i], dq = sol.dq[i], t = sol.t[i];
            f_tw2[i] = dq * dq - t * q * q - q * q * q * q;
            f_q[i] = q;
        }
        cum_tw2 = cumulative_from_right(sol.t, f_tw2);
        cum_q = cumulative_from_right(sol.t, f_q);
    }

    // I[i] = int_{t_i}^{t_end} f, fourth-order panel rule
    static std::vector<double> cumulative_from_right(const std::vector<double>& t,
                                                     const std::vector<double>& f) {
        const std::size_t m = t.size();
        const double h = t[1] - t[0];
        std::vector<double> cum(m, 0.0);
        for (std::size_t i = m - 1; i-- > 0;) {
            double panel;
            if (i + 3 < m)
                panel = h / 24.0 * (9.0 * f[i] + 19.0 * f[i + 1] - 5.0 * f[i + 2] + f[i + 3]);
            else
                panel = h / 24.0 * (9.0 * f[i + 1] + 19.0 * f[i] - 5.0 * f[i - 1] + f[i - 2]);
            cum[i] = cum[i + 1] + panel;
        }
        return cum;
    }

    // Hermite interpolation of a cumulative integral, using -f as slope.
    double interp(const std::vector<double>& cum, const std::vector<double>& f, double s) const {
        const double h = sol.t[1] - sol.t[0];
        if (s <= sol.t.front()) return cum.front();
        if (s >= sol.t.back()) return 0.0;
        std::size_t i = static_cast<std::size_t>((s - sol.t.front()) / h);
        if (i >= sol.t.size() - 1) i = sol.t.size() - 2;
        double u = (s - sol.t[i]) / h;
        double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return h00 * cum[i] + h10 * h * (-f[i]) + h01 * cum[i + 1] + h11 * h * (-f[i + 1]);
    }
};

inline const HmCache& hm_cache() {
    static const HmCache cache;
    return cache;
}

inline double tw2_fredholm(double s, const FredholmConfig& cfg) {
    return fredholm_det([](double x, double y) { return kernel_eval(KernelKind::airy, x, y); }, s,
                        std::numeric_limits<double>::infinity(), cfg);
}

inline double tw2_painleve(double s) {
    const HmCache& c = hm_cache();
    return std::exp(-c.interp(c.cum_tw2, c.f_tw2, s));
}

inline double tw1_integral(double s) {
    const HmCache& c = hm_cache();
    return c.interp(c.cum_q, c.f_q, s);
}

} // namespace detail

// Tracy-Widom CDF.  beta = 2 has two independent routes (Airy-kernel
// Fredholm determinant and the Painleve II representation); beta = 1 is
// built from the same Painleve solution, by default including the
// sqrt(TW2) factor (see tw1 variant selection in the docs).
inline double tw_cdf(int beta, double s, TwMethod method = TwMethod::fredholm,
                     Tw1Variant variant = Tw1Variant::sqrt_tw2) {
    if (beta != 1 && beta != 2) throw InputError("tw_cdf: beta must be 1 or 2");
    if (s < -12.0 || s > 8.0) throw InputError("tw_cdf: s outside table range [-12, 8]");
    if (beta == 2)
        return method == TwMethod::fredholm ? detail::tw2_fredholm(s, FredholmConfig{})
                                            : detail::tw2_painleve(s);
    double base = std::exp(-0.5 * detail::tw1_integral(s));
    if (variant == Tw1Variant::plain) return std::min(base, 1.0);
    double tw2 = method == TwMethod::fredholm ? detail::tw2_fredholm(s, FredholmConfig{})
                                              : detail::tw2_painleve(s);
    return std::min(base * std::sqrt(std::max(tw2, 0.0)), 1.0);
}

struct TWTable {
    int beta = 2;
    std::vector<double> s;
    std::vector<double> cdf;
    TwMethod method = TwMethod::fredholm;
    Tw1Variant variant = Tw1Variant::sqrt_tw2;
};

inline TWTable build_tw_table(int beta, double s_lo = -12.0, double s_hi = 8.0,
                              double step = 0.05, TwMethod method = TwMethod::fredholm,
                              Tw1Variant variant = Tw1Variant::sqrt_tw2) {
    TWTable table;
    table.beta = beta;
    table.method = method;
    table.variant = variant;
    const int count = static_cast<int>(std::floor((s_hi - s_lo) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
        double s = std::min(s_lo + i * step, s_hi);
        table.s.push_back(s);
        table.cdf.push_back(tw_cdf(beta, s, method, variant));
    }
    return table;
}

namespace detail {

// Fritsch-Carlson monotone cubic interpolation.
inline double pchip_eval(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const std::size_t n = xs.size();
    std::size_t i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    if (i == 0) i = 1;
    if (i >= n) i = n - 1;
    --i;
    double h = xs[i + 1] - xs[i];
    double delta = (ys[i + 1] - ys[i]) / h;
    auto slope_at = [&](std::size_t k) -> double {
        if (k == 0) return (ys[1] - ys[0]) / (xs[1] - xs[0]);
        if (k == n - 1) return (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        double d1 = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
        double d2 = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
        if (d1 * d2 <= 0.0) return 0.0;
        return 2.0 * d1 * d2 / (d1 + d2); // harmonic mean keeps monotonicity
    };
    double m0 = slope_at(i), m1 = slope_at(i + 1);
    if (delta == 0.0) m0 = m1 = 0.0;
    double t = (x - xs[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * ys[i] + h10 * h * m0 + h01 * ys[i + 1] + h11 * h * m1;
}

inline const TWTable& default_tw_table(int beta) {
    static const TWTable t2 = build_tw_table(2, -12.0, 8.0, 0.05, TwMethod::painleve);
    static const TWTable t1 =
        build_tw_table(1, -12.0, 8.0, 0.05, TwMethod::painleve, Tw1Variant::sqrt_tw2);
    if (beta == 2) return t2;
    if (beta == 1) return t1;
    throw InputError("default_tw_table: beta must be 1 or 2");
}

} // namespace detail

struct TwPValue {
    double value = 0.0;
    bool clamped = false;
};

inline TwPValue tw_pvalue(const TWTable& table, double statistic) {
    TwPValue out;
    if (statistic <= table.s.front()) {
        out.value = 1.0 - table.cdf.front();
        out.clamped = true;
        return out;
    }
    if (statistic >= table.s.back()) {
        out.value = 1.0 - table.cdf.back();
        out.clamped = true;
        return out;
    }
    double c = detail::pchip_eval(table.s, table.cdf, statistic);
    out.value = std::min(1.0, std::max(0.0, 1.0 - c));
    return out;
}

inline TwPValue tw_pvalue(int beta, double statistic) {
    return tw_pvalue(detail::default_tw_table(beta), statistic);
}

enum class KernelRegime { bulk, edge };

struct KernelLimitReport {
    int n = 0;
    KernelRegime regime = KernelRegime::bulk;
    double x0 = 0.0;
    double sup_error = 0.0;
};

// Sup distance between the rescaled finite-n Christoffel-Darboux kernel
// and its sine (bulk) or Airy (edge) limit, over a fixed window.
inline KernelLimitReport kernel_limit_check(int n, KernelRegime regime, double x0 = 0.0,
                                            double window = 2.0, double step = 0.25) {
    if (n < 20) throw InputError("kernel_limit_check: n must be >= 20");
    if (regime == KernelRegime::bulk && (x0 <= -2.0 || x0 >= 2.0))
        throw InputError("kernel_limit_check: bulk point must lie in (-2, 2)");
    KernelLimitReport rep;
    rep.n = n;
    rep.regime = regime;
    rep.x0 = x0;
    CDContext ctx = CDContext::gue(n);
    double sup = 0.0;
    if (regime == KernelRegime::bulk) {
        double rho = cd_kernel(ctx, x0, x0);
        for (double X = -window; X <= window + 1e-12; X += step)
            for (double Y = -window; Y <= window + 1e-12; Y += step) {
                double lhs = cd_kernel(ctx, x0 + X / rho, x0 + Y / rho) / rho;
                double rhs = kernel_eval(KernelKind::sine, X, Y);
                sup = std::max(sup, std::abs(lhs - rhs));
            }
    } else {
        // with the e^{-n x^2/2} weight the edge diagonal grows like n^{2/3}
        double scale = std::pow(double(n), -2.0 / 3.0);
        double pref = std::pow(double(n), -2.0 / 3.0);
        for (double X = -window - 1.0; X <= window + 1e-12; X += step)
            for (double Y = -window - 1.0; Y <= window + 1e-12; Y += step) {
                double lhs = pref * cd_kernel(ctx, 2.0 + scale * X, 2.0 + scale * Y);
                double rhs = kernel_eval(KernelKind::airy, X, Y);
                sup = std::max(sup, std::abs(lhs - rhs));
            }
    }
    rep.sup_error = sup;
    return rep;
}

} // namespace rmt
