#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/errors.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

// Hermite wave function phi_n(x) = e^{-x^2/4} H_n(x) / sqrt(sqrt(2 pi) n!)
// carried with a separate log-magnitude so the recursion stays finite far
// outside the oscillatory region.
struct WaveFunctionEval {
    int n = 0;
    double x = 0.0;
    double phi = 0.0;      // scaled phi_n
    double phi_prev = 0.0; // scaled phi_{n-1}, same log_scale
    double log_scale = 0.0;

    double value() const { return phi * std::exp(log_scale); }
    double value_prev() const { return phi_prev * std::exp(log_scale); }
    // phi_n'(x) = -x/2 phi_n + sqrt(n) phi_{n-1}, same scale
    double derivative_scaled() const { return -0.5 * x * phi + std::sqrt(double(n)) * phi_prev; }
    double derivative() const { return derivative_scaled() * std::exp(log_scale); }
};

inline WaveFunctionEval hermite_phi(int n, double x) {
    if (n < 0) throw InputError("hermite_phi: n must be >= 0");
    WaveFunctionEval ev;
    ev.n = n;
    ev.x = x;
    // start with phi_0 represented as 1.0 at log scale -x^2/4 - log(2 pi)/4
    double ls = -0.25 * x * x - 0.25 * std::log(2.0 * kPi);
    double prev = 0.0, cur = 1.0;
    for (int k = 0; k < n; ++k) {
        double next = (x * cur - std::sqrt(double(k)) * prev) / std::sqrt(double(k + 1));
        prev = cur;
        cur = next;
        double mag = std::max(std::abs(cur), std::abs(prev));
        if (mag > 1e200 || (mag > 0.0 && mag < 1e-200)) {
            double f = std::log(mag);
            double s = std::exp(-f);
            cur *= s;
            prev *= s;
            ls += f;
        }
    }
    ev.phi = cur;
    ev.phi_prev = prev;
    ev.log_scale = ls;
    return ev;
}

// Raw Hermite polynomial (monic, probabilists' convention); small n only.
inline double hermite_h(int n, double x) {
    double prev = 0.0, cur = 1.0;
    for (int k = 0; k < n; ++k) {
        double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Christoffel-Darboux context for the Gaussian weight exp(-N x^2 / 2).
struct CDContext {
    int n = 1;      // kernel rank (matrix size)
    double N = 1.0; // weight scale; N = n recovers the GUE normalization

    CDContext() = default;
    CDContext(int n_, double N_) : n(n_), N(N_) {
        if (n < 1) throw InputError("CDContext: n must be >= 1");
        if (N <= 0.0) throw InputError("CDContext: weight scale must be positive");
    }
    static CDContext gue(int n_) { return CDContext(n_, double(n_)); }
};

// Weighted kernel K~_n(x,y); switches to the confluent derivative form
// near the diagonal.
inline double cd_kernel(const CDContext& ctx, double x, double y) {
    const double sn = std::sqrt(double(ctx.n) * ctx.N);
    const double u = std::sqrt(ctx.N) * x, v = std::sqrt(ctx.N) * y;
    if (std::abs(x - y) < 1e-6) {
        double mid = 0.5 * (u + v);
        WaveFunctionEval e = hermite_phi(ctx.n, mid);
        // phi_{n-2} at the same log scale, from one inverted recursion step
        double phim2 = 0.0;
        if (ctx.n >= 2)
            phim2 = (mid * e.phi_prev - std::sqrt(double(ctx.n)) * e.phi) /
                    std::sqrt(double(ctx.n - 1));
        double dprev = -0.5 * mid * e.phi_prev + std::sqrt(double(ctx.n - 1)) * phim2;
        double val = e.derivative_scaled() * e.phi_prev - dprev * e.phi;
        return sn * val * std::exp(2.0 * e.log_scale);
    }
    WaveFunctionEval eu = hermite_phi(ctx.n, u);
    WaveFunctionEval ev = hermite_phi(ctx.n, v);
    double num = eu.phi * ev.phi_prev - eu.phi_prev * ev.phi;
    return sn * num * std::exp(eu.log_scale + ev.log_scale) / (u - v);
}

// k-point Janossy density det[K~_n(x_i, x_j)].
inline double janossy(const CDContext& ctx, const std::vector<double>& points) {
    const int k = static_cast<int>(points.size());
    if (k > ctx.n)
        throw InputError("janossy: more points than the kernel rank; determinant degenerates");
    if (k == 0) return 1.0;
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            double v = cd_kernel(ctx, points[i], points[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m.determinant();
}

// Exact GUE one-point function rho_n^{(1)}(x), the confluent kernel
// diagonal with N = n.  Integrates to n.
inline double exact_gue_density(int n, double x) {
    if (n < 1) throw InputError("exact_gue_density: n must be >= 1");
    return cd_kernel(CDContext::gue(n), x, x);
}

// log Z_n = log n! + sum_{m<n} log h_m, h_m = sqrt(2 pi) m! N^{-(m+1/2)}.
inline double partition_log(int n, double N) {
    if (n < 1) throw InputError("partition_log: n must be >= 1");
    if (N <= 0.0) throw InputError("partition_log: weight scale must be positive");
    double logz = std::lgamma(n + 1.0);
    for (int m = 0; m < n; ++m)
        logz += 0.5 * std::log(2.0 * kPi) + std::lgamma(m + 1.0) - (m + 0.5) * std::log(N);
    return logz;
}

inline double partition_log(int n) { return partition_log(n, double(n)); }

struct VandermondeLog {
    double log_abs = 0.0;
    int sign = 1; // 0 on ties
};

inline VandermondeLog vandermonde_log(const std::vector<double>& lambdas) {
    VandermondeLog out;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
            double d = lambdas[j] - lambdas[i];
            if (d == 0.0) {
                out.log_abs = -std::numeric_limits<double>::infinity();
                out.sign = 0;
                return out;
            }
            out.log_abs += std::log(std::abs(d));
            if (d < 0.0) out.sign = -out.sign;
        }
    return out;
}

// Unnormalized log joint eigenvalue density.  Gaussian ensembles use the
// weight exp(-n beta x^2 / 4 sigma^2); Wishart uses the announced joint
// density with exponent (beta/2)(n-p) + (beta-2)/2 on each eigenvalue.
inline double joint_pdf_log(EnsembleKind kind, const std::vector<double>& lambdas, int n, int p,
                            double sigma2) {
    if (sigma2 <= 0.0) throw InputError("joint_pdf_log: sigma2 must be positive");
    const double beta =
        (kind == EnsembleKind::GOE || kind == EnsembleKind::WishartReal) ? 1.0 : 2.0;
    VandermondeLog vd = vandermonde_log(lambdas);
    if (vd.sign == 0) return -std::numeric_limits<double>::infinity();
    double logp = beta * vd.log_abs;
    if (kind == EnsembleKind::GOE || kind == EnsembleKind::GUE) {
        for (double l : lambdas) logp -= n * beta * l * l / (4.0 * sigma2);
        return logp;
    }
    const double expo = 0.5 * beta * (n - p) + 0.5 * (beta - 2.0);
    for (double l : lambdas) {
        if (l < 0.0) throw InputError("joint_pdf_log: Wishart eigenvalues must be nonnegative");
        if (l == 0.0) return expo > 0.0 ? -std::numeric_limits<double>::infinity()
                                        : (expo < 0.0 ? std::numeric_limits<double>::infinity()
                                                      : logp);
        logp += expo * std::log(l) - n * beta * l / (2.0 * sigma2);
    }
    return logp;
}

} // namespace rmt
