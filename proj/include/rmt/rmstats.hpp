#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rmt/eigen_solve.hpp"
#include "rmt/errors.hpp"
#include "rmt/kernels.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

struct DataMatrix {
    Eigen::MatrixXd x;
    bool centered = false;
    Eigen::VectorXd column_means; // stored at centering time
};

inline DataMatrix center_columns(const Eigen::MatrixXd& raw) {
    if (raw.rows() < 2 || raw.cols() < 1)
        throw InputError("center_columns: need at least 2 rows and 1 column");
    DataMatrix out;
    out.column_means = raw.colwise().mean();
    out.x = raw.rowwise() - out.column_means.transpose();
    out.centered = true;
    return out;
}

enum class CovarianceSide { documents, variables };

// documents: p^{-1} X X^T (n x n);  variables: n^{-1} X^T X (p x p)
inline Eigen::MatrixXd covariance(const DataMatrix& data, CovarianceSide side) {
    if (!data.centered) throw InputError("covariance: data must be centered first");
    const auto& x = data.x;
    if (side == CovarianceSide::documents)
        return (x * x.transpose()) / static_cast<double>(x.cols());
    return (x.transpose() * x) / static_cast<double>(x.rows());
}

struct MPFit {
    double sigma2_hat = 0.0;
    double gamma = 0.0;
    double ks = 0.0;
    int excluded_top = 0;
    int noise_lo = 0; // index range (descending order) inside [a-, a+]
    int noise_hi = 0; // half-open
};

// KS-optimal Marchenko-Pastur null fit by golden-section search on sigma^2.
inline MPFit fit_mp(const Spectrum& spectrum, double gamma, int exclude_top = 0) {
    if (gamma <= 0.0) throw InputError("fit_mp: gamma must be positive");
    if (exclude_top < 0) throw InputError("fit_mp: exclude_top must be >= 0");
    const int total = spectrum.n();
    if (total - exclude_top < 10)
        throw InputError("fit_mp: fewer than 10 eigenvalues after exclusion; fit is meaningless");
    Spectrum rest;
    rest.values.assign(spectrum.values.begin() + exclude_top, spectrum.values.end());
    for (double v : rest.values)
        if (v < -1e-12) throw InputError("fit_mp: covariance spectrum must be nonnegative");

    double mean = 0.0;
    for (double v : rest.values) mean += v;
    mean /= rest.n();
    if (mean <= 0.0) throw InputError("fit_mp: spectrum has zero mean; nothing to fit");

    auto ks_at = [&](double s2) {
        return ks_distance(rest, MarchenkoPasturLaw{s2, gamma});
    };
    // golden-section on [0.1 mean, 10 mean]
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.1 * mean, b = 10.0 * mean;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = ks_at(c), fd = ks_at(d);
    for (int it = 0; it < 80 && (b - a) > 1e-10 * mean; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = ks_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = ks_at(d);
        }
    }
    MPFit fit;
    fit.sigma2_hat = 0.5 * (a + b);
    fit.gamma = gamma;
    fit.ks = ks_at(fit.sigma2_hat);
    fit.excluded_top = exclude_top;
    auto [lo_edge, hi_edge] = mp_edges(fit.sigma2_hat, gamma);
    int lo = 0;
    while (lo < total && spectrum.values[lo] > hi_edge) ++lo;
    int hi = lo;
    while (hi < total && spectrum.values[hi] >= lo_edge) ++hi;
    fit.noise_lo = lo;
    fit.noise_hi = hi;
    return fit;
}

// Standardized Wishart edge statistic; converges in law to TW_beta.
inline double tw_statistic(double lambda1, int n, int p, double sigma2) {
    if (n < 1 || p < 1) throw InputError("tw_statistic: n, p must be >= 1");
    if (sigma2 <= 0.0) throw InputError("tw_statistic: sigma2 must be positive");
    double gamma = static_cast<double>(n) / p;
    double aplus = sigma2 * std::pow(1.0 + 1.0 / std::sqrt(gamma), 2.0);
    return std::sqrt(gamma) * std::pow(double(p), 2.0 / 3.0) * (lambda1 - aplus) /
           (sigma2 * std::pow(1.0 + 1.0 / std::sqrt(gamma), 4.0 / 3.0));
}

struct ComponentTest {
    int index = 0;
    double eigenvalue = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;
    double sigma2_used = 0.0;
};

struct PcaReport {
    Spectrum spectrum;
    std::vector<ComponentTest> components;
    int k_significant = 0;
    MPFit mp_fit; // fit on the final non-significant remainder
};

// Sequential top-eigenvalue testing with deflation: refit sigma^2 on the
// remainder after each rejection, stop at the first non-rejection.
inline PcaReport significant_components(const Spectrum& spectrum, int n, int p, double alpha,
                                        int beta) {
    if (alpha <= 0.0 || alpha >= 1.0) throw InputError("significant_components: alpha in (0,1)");
    if (beta != 1 && beta != 2) throw InputError("significant_components: beta must be 1 or 2");
    PcaReport rep;
    rep.spectrum = spectrum;
    double gamma = static_cast<double>(n) / p;
    int k = 0;
    while (true) {
        MPFit fit = fit_mp(spectrum, gamma, k);
        rep.mp_fit = fit;
        if (k >= spectrum.n()) break;
        ComponentTest test;
        test.index = k;
        test.eigenvalue = spectrum.values[k];
        test.sigma2_used = fit.sigma2_hat;
        test.statistic = tw_statistic(test.eigenvalue, n, p, fit.sigma2_hat);
        test.p_value = tw_pvalue(beta, test.statistic).value;
        test.significant = test.p_value < alpha;
        rep.components.push_back(test);
        if (!test.significant) break;
        ++k;
    }
    rep.k_significant = k;
    return rep;
}

enum class BbpPhase { tracy_widom, critical, gaussian_outlier };

struct BbpPrediction {
    double threshold = 0.0; // Lambda*
    BbpPhase phase = BbpPhase::tracy_widom;
    std::optional<double> outlier_location;  // z_Lambda, super-threshold only
    std::optional<double> fluctuation_coeff; // sd(lambda_1) ~ coeff / sqrt(p)
};

inline BbpPrediction bbp_predict(double sigma, double gamma, double lambda) {
    if (sigma <= 0.0 || gamma <= 0.0 || lambda <= 0.0)
        throw InputError("bbp_predict: sigma, gamma, lambda must be positive");
    BbpPrediction out;
    out.threshold = sigma * (1.0 + 1.0 / std::sqrt(gamma));
    if (lambda == out.threshold) {
        out.phase = BbpPhase::critical; // interpolating law, not emitted
        return out;
    }
    if (lambda < out.threshold) {
        out.phase = BbpPhase::tracy_widom;
        return out;
    }
    out.phase = BbpPhase::gaussian_outlier;
    out.outlier_location = sigma * lambda * (1.0 + sigma / (gamma * (lambda - sigma)));
    double var = 1.0 / gamma -
                 sigma * sigma / (gamma * gamma * (lambda - sigma) * (lambda - sigma));
    out.fluctuation_coeff = sigma * lambda / std::sqrt(var);
    return out;
}

// Replace eigenvalues in the noise band [band_lo, band_hi) of the
// descending spectrum by their arithmetic mean; trace is preserved.
inline Eigen::MatrixXd clean_covariance(const Eigen::MatrixXd& m, int band_lo, int band_hi) {
    if (m.rows() == 0) throw InputError("clean_covariance: empty matrix");
    if (band_lo < 0 || band_hi > m.rows() || band_lo > band_hi)
        throw InputError("clean_covariance: invalid noise band");
    if (band_hi - band_lo <= 1) return m;
    EigenDecomposition<double> ed = sym_eigen(m, true);
    double mean = 0.0;
    for (int i = band_lo; i < band_hi; ++i) mean += ed.spectrum.values[i];
    mean /= (band_hi - band_lo);
    Eigen::VectorXd vals(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        vals(i) = (i >= band_lo && i < band_hi) ? mean : ed.spectrum.values[i];
    const Eigen::MatrixXd& v = *ed.vectors;
    return v * vals.asDiagonal() * v.transpose();
}

struct PortfolioResult {
    Eigen::VectorXd weights;
    double excess = 0.0;
    double risk = 0.0; // rho*
};

inline PortfolioResult markowitz(const Eigen::MatrixXd& m, const Eigen::VectorXd& p,
                                 double excess) {
    if (m.rows() != m.cols() || m.rows() != p.size())
        throw InputError("markowitz: dimension mismatch");
    if (p.norm() == 0.0) throw InputError("markowitz: P must be nonzero");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    double cond_floor = 1e-12 * std::max(std::abs(es.eigenvalues()(m.rows() - 1)), 1.0);
    if (es.eigenvalues()(0) <= cond_floor) {
        Eigen::VectorXd dir = es.eigenvectors().col(0);
        std::string msg = "markowitz: M is singular along direction (";
        for (int i = 0; i < dir.size(); ++i)
            msg += (i ? ", " : "") + std::to_string(dir(i));
        throw InputError(msg + ")");
    }
    Eigen::VectorXd minv_p = es.eigenvectors() *
                             (es.eigenvectors().transpose() * p).cwiseQuotient(es.eigenvalues());
    double denom = p.dot(minv_p);
    PortfolioResult out;
    out.excess = excess;
    out.risk = excess * excess / denom;
    out.weights = (out.risk / excess) * minv_p;
    return out;
}

struct FrontierPoint {
    double excess = 0.0;
    double risk = 0.0;
};

inline std::vector<FrontierPoint> markowitz_frontier(const Eigen::MatrixXd& m,
                                                     const Eigen::VectorXd& p, double excess_lo,
                                                     double excess_hi, int points) {
    if (points < 2) throw InputError("markowitz_frontier: need at least 2 points");
    std::vector<FrontierPoint> out;
    for (int i = 0; i < points; ++i) {
        double r = excess_lo + (excess_hi - excess_lo) * i / (points - 1);
        double risk;
        if (r == 0.0) {
            risk = 0.0;
        } else {
            risk = markowitz(m, p, r).risk;
        }
        out.push_back({r, risk});
    }
    return out;
}

struct OverlapDiagnostics {
    std::vector<double> overlaps; // |w_i^(1) . w_i^(2)| per index
    double baseline = 0.0;        // 1/sqrt(p), the independent-vector scale
};

inline OverlapDiagnostics overlap_diagnostics(const Eigen::MatrixXd& vecs1,
                                              const Eigen::MatrixXd& vecs2) {
    if (vecs1.rows() != vecs2.rows() || vecs1.cols() != vecs2.cols())
        throw InputError("overlap_diagnostics: dimension mismatch");
    OverlapDiagnostics out;
    out.baseline = 1.0 / std::sqrt(static_cast<double>(vecs1.rows()));
    for (int i = 0; i < vecs1.cols(); ++i)
        out.overlaps.push_back(std::abs(vecs1.col(i).dot(vecs2.col(i))));
    return out;
}

} // namespace rmt
