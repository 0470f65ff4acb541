#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/quadrature.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

// Truncated series m_1..m_K (m_0 = 1 implicit).
struct MomentSeries {
    std::vector<double> m;
    int order() const { return static_cast<int>(m.size()); }
};

struct FreeCumulantSeries {
    std::vector<double> kappa;
    int order() const { return static_cast<int>(kappa.size()); }
};

struct ClassicalCumulantSeries {
    std::vector<double> c;
    int order() const { return static_cast<int>(c.size()); }
};

namespace detail {

// Coefficients of M(z)^ell up to degree deg, where M(z) = 1 + sum m_k z^k.
inline std::vector<double> series_power(const std::vector<double>& m, int ell, int deg) {
    std::vector<double> acc(deg + 1, 0.0);
    acc[0] = 1.0;
    std::vector<double> base(deg + 1, 0.0);
    base[0] = 1.0;
    for (int k = 1; k <= deg && k <= static_cast<int>(m.size()); ++k) base[k] = m[k - 1];
    for (int e = 0; e < ell; ++e) {
        std::vector<double> next(deg + 1, 0.0);
        for (int i = 0; i <= deg; ++i)
            for (int j = 0; j + i <= deg; ++j) next[i + j] += acc[i] * base[j];
        acc = std::move(next);
    }
    return acc;
}

} // namespace detail

// Free cumulants from moments via the generating-series identity
// M(z) = C(z M(z)) with C(w) = 1 + sum kappa_ell w^ell, solved triangularly.
inline FreeCumulantSeries moments_to_free_cumulants(const MomentSeries& ms) {
    if (ms.order() < 1) throw InputError("moments_to_free_cumulants: order must be >= 1");
    const int K = ms.order();
    FreeCumulantSeries out;
    out.kappa.assign(K, 0.0);
    for (int n = 1; n <= K; ++n) {
        double rhs = ms.m[n - 1];
        for (int ell = 1; ell < n; ++ell) {
            auto pw = detail::series_power(ms.m, ell, n - ell);
            rhs -= out.kappa[ell - 1] * pw[n - ell];
        }
        out.kappa[n - 1] = rhs; // coefficient of kappa_n is [z^0] M^n = 1
    }
    return out;
}

inline MomentSeries free_cumulants_to_moments(const FreeCumulantSeries& ks) {
    if (ks.order() < 1) throw InputError("free_cumulants_to_moments: order must be >= 1");
    const int K = ks.order();
    MomentSeries out;
    out.m.assign(K, 0.0);
    for (int n = 1; n <= K; ++n) {
        double v = ks.kappa[n - 1];
        for (int ell = 1; ell < n; ++ell) {
            auto pw = detail::series_power(out.m, ell, n - ell); // uses m_1..m_{n-1}
            v += ks.kappa[ell - 1] * pw[n - ell];
        }
        out.m[n - 1] = v;
    }
    return out;
}

// Classical cumulants from the logarithm of the exponential moment
// generating series.
inline ClassicalCumulantSeries classical_cumulants(const MomentSeries& ms) {
    if (ms.order() < 1) throw InputError("classical_cumulants: order must be >= 1");
    const int K = ms.order();
    // a_k = m_k / k!, then log(1 + sum a_k t^k) term by term
    std::vector<double> a(K + 1, 0.0);
    double fact = 1.0;
    for (int k = 1; k <= K; ++k) {
        fact *= k;
        a[k] = ms.m[k - 1] / fact;
    }
    // b = log(1 + A): b_n = a_n - (1/n) sum_{k=1}^{n-1} k b_k a_{n-k}
    std::vector<double> b(K + 1, 0.0);
    for (int n = 1; n <= K; ++n) {
        double v = a[n];
        for (int k = 1; k < n; ++k) v -= (static_cast<double>(k) / n) * b[k] * a[n - k];
        b[n] = v;
    }
    ClassicalCumulantSeries out;
    out.c.assign(K, 0.0);
    fact = 1.0;
    for (int n = 1; n <= K; ++n) {
        fact *= n;
        out.c[n - 1] = b[n] * fact;
    }
    return out;
}

// Free additive convolution: free cumulants add.
inline FreeCumulantSeries free_convolve(const FreeCumulantSeries& a, const FreeCumulantSeries& b) {
    if (a.order() != b.order()) throw InputError("free_convolve: order mismatch");
    FreeCumulantSeries out = a;
    for (int i = 0; i < b.order(); ++i) out.kappa[i] += b.kappa[i];
    return out;
}

inline MomentSeries rescale(const MomentSeries& ms, double alpha) {
    if (!std::isfinite(alpha)) throw InputError("rescale: alpha must be finite");
    MomentSeries out = ms;
    double a = 1.0;
    for (auto& v : out.m) {
        a *= alpha;
        v *= a;
    }
    return out;
}

inline FreeCumulantSeries rescale(const FreeCumulantSeries& ks, double alpha) {
    if (!std::isfinite(alpha)) throw InputError("rescale: alpha must be finite");
    FreeCumulantSeries out = ks;
    double a = 1.0;
    for (auto& v : out.kappa) {
        a *= alpha;
        v *= a;
    }
    return out;
}

// Location of the detached eigenvalue of a GUE perturbed by a finite-rank
// shift Lambda; present only above the threshold Lambda > sigma.
inline std::optional<double> gue_spike_location(double sigma, double lambda) {
    if (sigma <= 0.0 || lambda <= 0.0)
        throw InputError("gue_spike_location: sigma, lambda must be > 0");
    if (lambda <= sigma) return std::nullopt;
    return lambda + sigma * sigma / lambda;
}

namespace detail {

// Herglotz solution of the subordination fixed point
// W(z) = W_B(z - sigma2 W(z)) for mu_B = (1-eps) delta_0 + eps delta_Lambda,
// by Newton with continuation from Im z = 1 down to the requested eta.
inline std::complex<double> subordination_w(double sigma2, double eps, double lambda, double x,
                                            double eta) {
    using C = std::complex<double>;
    auto wb = [&](C u) { return (1.0 - eps) / u + eps / (u - lambda); };
    auto dwb = [&](C u) {
        return -(1.0 - eps) / (u * u) - eps / ((u - lambda) * (u - lambda));
    };
    C w = 1.0 / C(x, 1.0);
    for (double e = 1.0;; e *= 0.5) {
        if (e < eta) e = eta;
        C z(x, e);
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
            C u = z - sigma2 * w;
            C f = wb(u) - w;
            C df = -sigma2 * dwb(u) - 1.0;
            C step = f / df;
            w -= step;
            if (std::abs(step) < 1e-13 * (1.0 + std::abs(w))) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw NumericalError("subordination_density: Newton divergence at x = " +
                                 std::to_string(x));
        if (w.imag() > 0.0) w = std::conj(w); // stay on the Herglotz branch
        if (e == eta) return w;
    }
}

} // namespace detail

// Density of mu_sc boxplus ((1-eps) delta_0 + eps delta_Lambda).  Grid
// points where |Im W| grows like 1/eta are flagged as an atom; the atom
// mass is recovered by integrating the Cauchy bump around the pole.
inline GridDensityLaw subordination_density(double sigma2, double eps, double lambda,
                                            const std::vector<double>& x_grid,
                                            double eta_final = 1e-4) {
    if (sigma2 <= 0.0) throw InputError("subordination_density: sigma2 must be > 0");
    if (eps < 0.0 || eps > 1.0) throw InputError("subordination_density: eps must be in [0,1]");
    if (lambda <= 0.0) throw InputError("subordination_density: lambda must be > 0");

    GridDensityLaw out;
    out.x = x_grid;
    out.density.resize(x_grid.size());
    std::vector<char> flagged(x_grid.size(), 0);

    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        double x = x_grid[i];
        auto w1 = detail::subordination_w(sigma2, eps, lambda, x, eta_final);
        auto w2 = detail::subordination_w(sigma2, eps, lambda, x, 2.0 * eta_final);
        double im1 = -w1.imag(), im2 = -w2.imag();
        // a pole scales like 1/eta, a smooth density does not
        if (im1 > 1.6 * im2 && eta_final * im1 > 1e-3) {
            flagged[i] = 1;
            out.density[i] = 0.0;
        } else {
            out.density[i] = std::max(im1 / kPi, 0.0);
        }
    }

    // one atom per contiguous flagged run; mass from integrating the bump
    for (std::size_t i = 0; i < flagged.size();) {
        if (!flagged[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < flagged.size() && flagged[j]) ++j;
        double lo = x_grid[i], hi = x_grid[j - 1];
        double pad = 0.5 * (hi - lo) + 0.1;
        double best_loc = lo, best_im = 0.0;
        const int refine = 200;
        for (int k = 0; k <= refine; ++k) {
            double x = lo - pad + (hi - lo + 2.0 * pad) * k / refine;
            double im = -detail::subordination_w(sigma2, eps, lambda, x, eta_final).imag();
            if (im > best_im) {
                best_im = im;
                best_loc = x;
            }
        }
        double mass = integrate_adaptive(
            [&](double x) {
                return std::max(
                    -detail::subordination_w(sigma2, eps, lambda, x, eta_final).imag(), 0.0) /
                       kPi;
            },
            lo - pad, hi + pad, 1e-6);
        out.atoms.emplace_back(best_loc, mass);
        i = j;
    }

    // Isolated islands: connected components of the density separated from
    // the main bulk.  For small eps these approximate the rank-eps-n Dirac
    // mass at z_Lambda, so they are reported as atoms with their integrated
    // mass, and removed from the continuous part.
    const double comp_thresh = 1e-3;
    std::vector<std::pair<std::size_t, std::size_t>> comps; // [lo, hi] inclusive
    for (std::size_t i = 0; i < out.density.size();) {
        if (out.density[i] <= comp_thresh) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < out.density.size() && out.density[j + 1] > comp_thresh) ++j;
        comps.emplace_back(i, j);
        i = j + 1;
    }
    if (comps.size() > 1) {
        auto comp_mass = [&](const std::pair<std::size_t, std::size_t>& c) {
            double m = 0.0;
            for (std::size_t k = c.first; k + 1 <= c.second; ++k)
                m += 0.5 * (out.density[k] + out.density[k + 1]) * (x_grid[k + 1] - x_grid[k]);
            return m;
        };
        std::size_t main_idx = 0;
        double main_mass = -1.0;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            double m = comp_mass(comps[c]);
            if (m > main_mass) {
                main_mass = m;
                main_idx = c;
            }
        }
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (c == main_idx) continue;
            double rough = comp_mass(comps[c]);
            if (rough < 1e-4 || rough > 0.3) continue; // speckle or a genuine second bulk
            double lo = x_grid[comps[c].first], hi = x_grid[comps[c].second];
            double pad = 0.05 + 2.0 * (x_grid[1] - x_grid[0]);
            double lo_bound = lo - pad, hi_bound = hi + pad;
            // stay clear of neighboring components
            if (c > 0)
                lo_bound = std::max(lo_bound,
                                    0.5 * (x_grid[comps[c - 1].second] + lo));
            if (c + 1 < comps.size())
                hi_bound = std::min(hi_bound,
                                    0.5 * (hi + x_grid[comps[c + 1].first]));
            double mass = integrate_adaptive(
                [&](double x) {
                    return std::max(
                        -detail::subordination_w(sigma2, eps, lambda, x, eta_final).imag(),
                        0.0) / kPi;
                },
                lo_bound, hi_bound, 1e-7);
            double centroid = 0.0, norm = 0.0;
            for (std::size_t k = comps[c].first; k <= comps[c].second; ++k) {
                centroid += x_grid[k] * out.density[k];
                norm += out.density[k];
            }
            centroid /= norm;
            out.atoms.emplace_back(centroid, mass);
            for (std::size_t k = comps[c].first; k <= comps[c].second; ++k) out.density[k] = 0.0;
        }
    }
    return out;
}

} // namespace rmt
