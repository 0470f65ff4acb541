#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <variant>
#include <vector>

#include "rmt/eigen_solve.hpp"
#include "rmt/errors.hpp"

namespace rmt {

inline constexpr double kPi = 3.14159265358979323846;

// Support edges a_-(gamma) < a_+(gamma) of the Marchenko-Pastur law.
inline std::pair<double, double> mp_edges(double sigma2, double gamma) {
    if (sigma2 <= 0.0 || gamma <= 0.0) throw InputError("mp_edges: sigma2, gamma must be > 0");
    double r = 1.0 / std::sqrt(gamma);
    double lo = sigma2 * (1.0 - r) * (1.0 - r);
    double hi = sigma2 * (1.0 + r) * (1.0 + r);
    return {lo, hi};
}

struct SemicircleLaw {
    double sigma2 = 1.0;
};

struct MarchenkoPasturLaw {
    double sigma2 = 1.0;
    double gamma = 1.0;
    double atom_mass() const { return std::max(1.0 - gamma, 0.0); }
};

struct AtomicMixtureLaw {
    std::vector<std::pair<double, double>> atoms; // (location, mass)
};

struct GridDensityLaw {
    std::vector<double> x;
    std::vector<double> density;
    std::vector<std::pair<double, double>> atoms;
};

using LawDescriptor =
    std::variant<SemicircleLaw, MarchenkoPasturLaw, AtomicMixtureLaw, GridDensityLaw>;

enum class LawEvalMode { pdf, cdf };

namespace detail {

// CDF of the continuous part of MP(sigma2 = 1, gamma), tabulated once per
// gamma.  The substitution x = a- + (a+ - a-) sin^2(phi) makes the density
// analytic in phi, including the gamma = 1 hard edge.
struct MpCdfTable {
    double gamma;
    double a_lo, a_hi;
    std::vector<double> phi;
    std::vector<double> cdf; // continuous part only, exact total mass at the end

    explicit MpCdfTable(double g) : gamma(g) {
        auto [lo, hi] = mp_edges(1.0, g);
        a_lo = lo;
        a_hi = hi;
        const int m = 4096; // Simpson panels
        const double width = hi - lo;
        phi.resize(2 * m + 1);
        cdf.resize(2 * m + 1);
        std::vector<double> f(2 * m + 1);
        const double h = 0.5 * kPi / (2 * m);
        for (int i = 0; i <= 2 * m; ++i) {
            phi[i] = i * h;
            double s = std::sin(phi[i]), c = std::cos(phi[i]);
            double x = lo + width * s * s;
            // density * dx/dphi with the sqrt factors combined analytically
            double num = gamma * width * width * s * s * c * c / kPi;
            f[i] = x > 0.0 ? num / x : (lo == 0.0 ? gamma * width * c * c / kPi : 0.0);
        }
        cdf[0] = 0.0;
        for (int i = 1; i <= 2 * m; i += 2) {
            double panel = (h / 3.0) * (f[i - 1] + 4.0 * f[i] + f[i + 1]);
            cdf[i] = cdf[i - 1] + 0.5 * panel; // midpoint estimate, refined below
            cdf[i + 1] = cdf[i - 1] + panel;
        }
        double total = cdf.back();
        double expected = 1.0 - std::max(1.0 - g, 0.0);
        double scale = expected / total;
        for (double& v : cdf) v *= scale;
    }

    double continuous_cdf(double x) const {
        if (x <= a_lo) return 0.0;
        if (x >= a_hi) return cdf.back();
        double s = std::sqrt((x - a_lo) / (a_hi - a_lo));
        double ph = std::asin(std::min(1.0, s));
        double h = phi[1] - phi[0];
        std::size_t i = std::min(cdf.size() - 2, static_cast<std::size_t>(ph / h));
        double t = (ph - phi[i]) / h;
        return cdf[i] + t * (cdf[i + 1] - cdf[i]);
    }
};

inline const MpCdfTable& mp_cdf_table(double gamma) {
    static std::map<double, std::shared_ptr<MpCdfTable>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(gamma);
    if (it == cache.end())
        it = cache.emplace(gamma, std::make_shared<MpCdfTable>(gamma)).first;
    return *it->second;
}

} // namespace detail

inline double semicircle_pdf(double sigma2, double x) {
    double s2 = 4.0 * sigma2 - x * x;
    return s2 > 0.0 ? std::sqrt(s2) / (2.0 * kPi * sigma2) : 0.0;
}

inline double semicircle_cdf(double sigma2, double x) {
    double twos = 2.0 * std::sqrt(sigma2);
    if (x <= -twos) return 0.0;
    if (x >= twos) return 1.0;
    return 0.5 + (0.5 * x * std::sqrt(4.0 * sigma2 - x * x) +
                  2.0 * sigma2 * std::asin(x / twos)) /
                     (2.0 * kPi * sigma2);
}

inline double mp_pdf(double sigma2, double gamma, double x) {
    auto [lo, hi] = mp_edges(sigma2, gamma);
    if (x < lo || x > hi) return 0.0;
    if (x == 0.0) // hard-edge x^{-1/2} singularity at gamma = 1
        return std::numeric_limits<double>::infinity();
    return gamma * std::sqrt((hi - x) * (x - lo)) / (2.0 * kPi * sigma2 * x);
}

inline double mp_cdf(double sigma2, double gamma, double x) {
    double atom = std::max(1.0 - gamma, 0.0);
    double base = x >= 0.0 ? atom : 0.0;
    return base + detail::mp_cdf_table(gamma).continuous_cdf(x / sigma2);
}

inline double law_eval(const LawDescriptor& law, double x, LawEvalMode mode) {
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, SemicircleLaw>) {
                return mode == LawEvalMode::pdf ? semicircle_pdf(l.sigma2, x)
                                                : semicircle_cdf(l.sigma2, x);
            } else if constexpr (std::is_same_v<T, MarchenkoPasturLaw>) {
                return mode == LawEvalMode::pdf ? mp_pdf(l.sigma2, l.gamma, x)
                                                : mp_cdf(l.sigma2, l.gamma, x);
            } else if constexpr (std::is_same_v<T, AtomicMixtureLaw>) {
                if (mode == LawEvalMode::pdf) return 0.0;
                double c = 0.0;
                for (auto& [loc, mass] : l.atoms)
                    if (loc <= x) c += mass;
                return c;
            } else {
                if (mode == LawEvalMode::pdf) {
                    if (l.x.empty() || x < l.x.front() || x > l.x.back()) return 0.0;
                    auto it = std::upper_bound(l.x.begin(), l.x.end(), x);
                    std::size_t i = std::min(l.x.size() - 2,
                                             static_cast<std::size_t>(it - l.x.begin() - 1));
                    double t = (x - l.x[i]) / (l.x[i + 1] - l.x[i]);
                    return (1.0 - t) * l.density[i] + t * l.density[i + 1];
                }
                double c = 0.0;
                for (std::size_t i = 1; i < l.x.size(); ++i) {
                    double hi = std::min(x, l.x[i]);
                    if (hi <= l.x[i - 1]) break;
                    double t1 = l.density[i - 1];
                    double frac = (hi - l.x[i - 1]) / (l.x[i] - l.x[i - 1]);
                    double t2 = t1 + frac * (l.density[i] - t1);
                    c += 0.5 * (t1 + t2) * (hi - l.x[i - 1]);
                }
                for (auto& [loc, mass] : l.atoms)
                    if (loc <= x) c += mass;
                return c;
            }
        },
        law);
}

namespace detail {

// sqrt((z-a)(z-b)) with the branch that behaves like z at infinity and a
// cut on [a,b]; product of principal square roots keeps the sign right on
// both sides of the real axis.
inline std::complex<double> edge_sqrt(std::complex<double> z, double a, double b) {
    return std::sqrt(z - a) * std::sqrt(z - b);
}

} // namespace detail

// Stieltjes transform W(z) = int d mu(x) / (z - x), z off the support.
inline std::complex<double> stieltjes(const LawDescriptor& law, std::complex<double> z) {
    return std::visit(
        [&](const auto& l) -> std::complex<double> {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, SemicircleLaw>) {
                double twos = 2.0 * std::sqrt(l.sigma2);
                if (z.imag() == 0.0 && std::abs(z.real()) <= twos)
                    throw InputError("stieltjes: z lies on the support");
                return (z - detail::edge_sqrt(z, -twos, twos)) / (2.0 * l.sigma2);
            } else if constexpr (std::is_same_v<T, MarchenkoPasturLaw>) {
                auto [lo, hi] = mp_edges(l.sigma2, l.gamma);
                bool on_band = z.imag() == 0.0 && z.real() >= lo && z.real() <= hi;
                bool on_atom = z.imag() == 0.0 && z.real() == 0.0 && l.atom_mass() > 0.0;
                if (on_band || on_atom) throw InputError("stieltjes: z lies on the support");
                std::complex<double> s = detail::edge_sqrt(z, lo, hi);
                return (l.sigma2 * (1.0 - l.gamma) + l.gamma * z - l.gamma * s) /
                       (2.0 * l.sigma2 * z);
            } else if constexpr (std::is_same_v<T, AtomicMixtureLaw>) {
                std::complex<double> w = 0.0;
                for (auto& [loc, mass] : l.atoms) {
                    if (z.imag() == 0.0 && z.real() == loc)
                        throw InputError("stieltjes: z lies on the support");
                    w += mass / (z - loc);
                }
                return w;
            } else {
                std::complex<double> w = 0.0;
                for (std::size_t i = 1; i < l.x.size(); ++i) {
                    double mid = 0.5 * (l.x[i - 1] + l.x[i]);
                    double mass = 0.5 * (l.density[i - 1] + l.density[i]) * (l.x[i] - l.x[i - 1]);
                    w += mass / (z - mid);
                }
                for (auto& [loc, mass] : l.atoms) w += mass / (z - loc);
                return w;
            }
        },
        law);
}

inline std::complex<double> empirical_stieltjes(const Spectrum& spec, std::complex<double> z) {
    std::complex<double> sum = 0.0;
    for (double v : spec.values) sum += 1.0 / (z - v);
    return sum / static_cast<double>(spec.n());
}

struct DensityEstimate {
    double density = 0.0;
    double error_estimate = 0.0;
    bool atom_detected = false;
    double atom_mass = 0.0;
};

// Recover the density at x from boundary values of a Stieltjes transform,
// -(1/pi) Im W(x + i eta) extrapolated in eta.  A 1/eta divergence of W
// signals an atom at x; its residue is estimated from eta * Im W.
inline DensityEstimate
density_from_stieltjes(const std::function<std::complex<double>(std::complex<double>)>& w,
                       double x, std::vector<double> eta_schedule = {}) {
    if (eta_schedule.empty())
        for (int k = 0; k <= 6; ++k) eta_schedule.push_back(1e-2 * std::pow(2.0, -k));
    for (std::size_t i = 1; i < eta_schedule.size(); ++i)
        if (eta_schedule[i] >= eta_schedule[i - 1] || eta_schedule[i] <= 0.0)
            throw InputError("density_from_stieltjes: eta schedule must decrease, stay positive");

    std::vector<double> d(eta_schedule.size());
    for (std::size_t i = 0; i < eta_schedule.size(); ++i)
        d[i] = -w(std::complex<double>(x, eta_schedule[i])).imag() / kPi;

    DensityEstimate est;
    std::size_t m = d.size();
    if (m >= 3 && d[m - 1] > 1.4 * d[m - 2] && d[m - 2] > 1.4 * d[m - 3]) {
        est.atom_detected = true;
        // residue ~ eta * (-Im W) = pi * eta * d; linear extrapolation to eta = 0
        double r1 = kPi * eta_schedule[m - 1] * d[m - 1];
        double r2 = kPi * eta_schedule[m - 2] * d[m - 2];
        est.atom_mass = 2.0 * r1 - r2;
        est.density = d[m - 1];
        return est;
    }
    // two-point Richardson assuming leading bias linear in eta
    double r_prev = 2.0 * d[1] - d[0];
    double r = r_prev;
    for (std::size_t i = 2; i < m; ++i) {
        r = 2.0 * d[i] - d[i - 1];
        est.error_estimate = std::abs(r - r_prev);
        r_prev = r;
    }
    est.density = r;
    return est;
}

// Kolmogorov-Smirnov distance between an empirical spectrum and a law;
// the supremum is attained at a jump of one of the CDFs.
inline double ks_distance(const Spectrum& spec, const LawDescriptor& law) {
    std::vector<double> asc = spec.ascending();
    const double n = static_cast<double>(asc.size());
    // mass of a law atom sitting exactly at x, so the law's left limit is f - mass
    auto atom_mass_at = [&](double x) {
        double m = 0.0;
        if (auto* mp = std::get_if<MarchenkoPasturLaw>(&law); mp && x == 0.0)
            m += mp->atom_mass();
        if (auto* am = std::get_if<AtomicMixtureLaw>(&law))
            for (auto& [loc, mass] : am->atoms)
                if (loc == x) m += mass;
        return m;
    };
    double sup = 0.0;
    for (std::size_t i = 0; i < asc.size(); ++i) {
        double f = law_eval(law, asc[i], LawEvalMode::cdf);
        sup = std::max(sup, std::abs(f - (i + 1) / n));
        sup = std::max(sup, std::abs((f - atom_mass_at(asc[i])) - i / n));
    }
    auto check_atom = [&](double loc, double mass) {
        double f = law_eval(law, loc, LawEvalMode::cdf);
        double below =
            std::lower_bound(asc.begin(), asc.end(), loc) - asc.begin();
        sup = std::max(sup, std::abs((f - mass) - below / n));
    };
    if (auto* mp = std::get_if<MarchenkoPasturLaw>(&law); mp && mp->atom_mass() > 0.0)
        check_atom(0.0, mp->atom_mass());
    if (auto* am = std::get_if<AtomicMixtureLaw>(&law))
        for (auto& [loc, mass] : am->atoms) check_atom(loc, mass);
    return std::min(sup, 1.0);
}

// Tr (A-B)^2 minus the sum of squared differences of sorted eigenvalues;
// nonnegative up to floating error.
template <typename Scalar>
double hoffman_wielandt_margin(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                               const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("hoffman_wielandt_margin: order mismatch");
    double tr = (a - b).squaredNorm();
    Spectrum sa = detail::sym_eigen_impl<Scalar>(a, false).spectrum;
    Spectrum sb = detail::sym_eigen_impl<Scalar>(b, false).spectrum;
    double sum = 0.0;
    for (int i = 0; i < sa.n(); ++i) {
        double d = sa.values[i] - sb.values[i];
        sum += d * d;
    }
    return tr - sum;
}

} // namespace rmt
