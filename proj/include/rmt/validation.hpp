#pragma once

// The 14 acceptance checks, shared between the CLI `validate` subcommand
// and the acceptance test suite.  Each check pins its seeds and tolerances
// here so every entry point agrees on what "pass" means.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/freeprob.hpp"
#include "rmt/kernels.hpp"
#include "rmt/orthopoly.hpp"
#include "rmt/rmstats.hpp"
#include "rmt/special.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

struct CheckResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline double ks_vs_table(std::vector<double> stats, const TWTable& table) {
    std::sort(stats.begin(), stats.end());
    const double n = static_cast<double>(stats.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        double s = std::min(std::max(stats[i], table.s.front()), table.s.back());
        double f = pchip_eval(table.s, table.cdf, s);
        sup = std::max(sup, std::abs(f - (i + 1) / n));
        sup = std::max(sup, std::abs(f - i / n));
    }
    return sup;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace detail

// 1. Semicircle convergence: one GUE sample, n=1000.
inline CheckResult check_semicircle() {
    CheckResult r{1, "semicircle-convergence"};
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GUE;
    spec.n = 1000;
    spec.seed = 101;
    double ks = ks_distance(sample_spectrum(spec), SemicircleLaw{1.0});
    r.passed = ks < 0.05;
    r.detail = "KS(ESD, semicircle) = " + detail::fmt(ks) + " (< 0.05 required)";
    return r;
}

// 2. Marchenko-Pastur convergence + hard-zero count at gamma = 0.5.
inline CheckResult check_mp() {
    CheckResult r{2, "marchenko-pastur-convergence"};
    EnsembleSpec spec;
    spec.kind = EnsembleKind::WishartComplex;
    spec.n = 1600;
    spec.p = 800;
    spec.seed = 102;
    double ks = ks_distance(sample_spectrum(spec), MarchenkoPasturLaw{1.0, 2.0});

    EnsembleSpec narrow = spec;
    narrow.n = 400;
    narrow.seed = 103;
    Spectrum s = sample_spectrum(narrow);
    int zeros = 0;
    for (double v : s.values)
        if (std::abs(v) < 1e-8) ++zeros;
    r.passed = ks < 0.05 && zeros == narrow.p - narrow.n;
    r.detail = "KS = " + detail::fmt(ks) + " (< 0.05); zero count " + std::to_string(zeros) +
               " (expect " + std::to_string(narrow.p - narrow.n) + ")";
    return r;
}

// 3. Exact finite-n density: normalization and Monte Carlo chi-square.
inline CheckResult check_exact_density() {
    CheckResult r{3, "exact-finite-n-density"};
    double worst_norm = 0.0;
    for (int n : {1, 5, 10, 50}) {
        double mass = integrate_adaptive([n](double x) { return exact_gue_density(n, x); },
                                         -8.0, 8.0, 1e-11);
        worst_norm = std::max(worst_norm, std::abs(mass - n));
    }

    const int n = 10, samples = 100000;
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GUE;
    spec.n = n;
    spec.seed = 301;
    const double lo = -2.6, hi = 2.6;
    const int inner = 26;
    std::vector<double> observed(inner + 2, 0.0);
    for (int s = 0; s < samples; ++s) {
        Spectrum sp = sample_spectrum(spec, s);
        for (double v : sp.values) {
            if (v < lo)
                observed[0] += 1;
            else if (v >= hi)
                observed[inner + 1] += 1;
            else
                observed[1 + static_cast<int>((v - lo) / (hi - lo) * inner)] += 1;
        }
    }
    std::vector<double> expected(inner + 2, 0.0);
    auto dens = [n](double x) { return exact_gue_density(n, x); };
    double interior = 0.0;
    for (int b = 0; b < inner; ++b) {
        double a = lo + (hi - lo) * b / inner, bb = lo + (hi - lo) * (b + 1) / inner;
        expected[1 + b] = samples * integrate_adaptive(dens, a, bb, 1e-10);
        interior += expected[1 + b];
    }
    double tail = samples * n - interior;
    expected[0] = expected[inner + 1] = 0.5 * tail; // density is even
    double stat = 0.0;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        double d = observed[b] - expected[b];
        stat += d * d / expected[b];
    }
    double pval = chi_square_pvalue(stat, static_cast<double>(expected.size() - 1));

    r.passed = worst_norm < 1e-8 && pval > 0.01;
    r.detail = "max |int rho - n| = " + detail::fmt(worst_norm) +
               " (< 1e-8); chi-square p = " + detail::fmt(pval) + " (> 0.01)";
    return r;
}

// 4. Partition function vs closed form and brute-force quadrature.
inline CheckResult check_partition() {
    CheckResult r{4, "partition-function"};
    double closed = std::abs(partition_log(2, 2.0) - std::log(kPi));

    QuadratureRule g = gauss_legendre(80, -6.0, 6.0);
    double z = 0.0;
    for (int i = 0; i < 80; ++i)
        for (int j = 0; j < 80; ++j) {
            std::vector<double> lam{g.nodes[i], g.nodes[j]};
            z += g.weights[i] * g.weights[j] *
                 std::exp(joint_pdf_log(EnsembleKind::GUE, lam, 2, 0, 1.0));
        }
    double rel = std::abs(z - std::exp(partition_log(2, 2.0))) / std::exp(partition_log(2, 2.0));

    r.passed = closed < 1e-12 && rel < 1e-6;
    r.detail = "|log Z - log pi| = " + detail::fmt(closed) +
               " (< 1e-12); quadrature relative error = " + detail::fmt(rel) + " (< 1e-6)";
    return r;
}

// 5. Tracy-Widom beta=2 dual-route agreement and Fredholm self-convergence.
inline CheckResult check_tw_dual_route() {
    CheckResult r{5, "tracy-widom-dual-route"};
    double worst = 0.0;
    for (double s = -8.0; s <= 4.0 + 1e-9; s += 0.1) {
        double f = tw_cdf(2, s, TwMethod::fredholm);
        double p = tw_cdf(2, s, TwMethod::painleve);
        worst = std::max(worst, std::abs(f - p));
    }
    auto airy_k = [](double x, double y) { return kernel_eval(KernelKind::airy, x, y); };
    double inf = std::numeric_limits<double>::infinity();
    double d40 = detail::nystrom_det(airy_k, 0.0, inf, 40, 10.0);
    double d80 = detail::nystrom_det(airy_k, 0.0, inf, 80, 10.0);
    double conv = std::abs(d40 - d80);

    r.passed = worst < 1e-4 && conv < 1e-8;
    r.detail = "max |fredholm - painleve| on [-8,4] = " + detail::fmt(worst) +
               " (< 1e-4); node-doubling delta at s=0 = " + detail::fmt(conv) + " (< 1e-8)";
    return r;
}

// 6. GUE edge fluctuations vs TW2 over 2000 samples at n=400.
inline CheckResult check_gue_edge() {
    CheckResult r{6, "gue-edge-fluctuations"};
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GUE;
    spec.n = 400;
    spec.seed = 106;
    std::vector<double> stats;
    for (int s = 0; s < 2000; ++s) {
        Spectrum sp = sample_spectrum(spec, s);
        stats.push_back(std::pow(400.0, 2.0 / 3.0) * (sp.max() - 2.0));
    }
    double ks = detail::ks_vs_table(stats, detail::default_tw_table(2));
    r.passed = ks < 0.1;
    r.detail = "KS(empirical, TW2) = " + detail::fmt(ks) + " (< 0.1 required)";
    return r;
}

// 7. TW1 variant selection: the shipped variant must win on GOE data.
inline CheckResult check_tw1_variant() {
    CheckResult r{7, "tw1-variant-selection"};
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GOE;
    spec.n = 400;
    spec.seed = 107;
    std::vector<double> stats;
    for (int s = 0; s < 2000; ++s) {
        Spectrum sp = sample_spectrum(spec, s);
        stats.push_back(std::pow(400.0, 2.0 / 3.0) * (sp.max() - 2.0));
    }
    static const TWTable with_factor =
        build_tw_table(1, -12.0, 8.0, 0.05, TwMethod::painleve, Tw1Variant::sqrt_tw2);
    static const TWTable plain =
        build_tw_table(1, -12.0, 8.0, 0.05, TwMethod::painleve, Tw1Variant::plain);
    double ks_with = detail::ks_vs_table(stats, with_factor);
    double ks_plain = detail::ks_vs_table(stats, plain);
    r.passed = ks_with < 0.1 && ks_with < ks_plain;
    r.detail = "KS shipped (exp(-1/2 int q) * sqrt(TW2)) = " + detail::fmt(ks_with) +
               "; KS plain (exp(-1/2 int q)) = " + detail::fmt(ks_plain) +
               "; shipped must be < 0.1 and strictly smaller";
    return r;
}

// 8. Wishart edge statistic calibration and sequential-test size.
inline CheckResult check_wishart_calibration() {
    CheckResult r{8, "wishart-edge-calibration"};
    EnsembleSpec spec;
    spec.kind = EnsembleKind::WishartComplex;
    spec.n = 800;
    spec.p = 400;
    spec.seed = 108;
    const int replicas = 1000;
    std::vector<double> stats;
    int k0_at_1 = 0, k0_at_5 = 0;
    for (int s = 0; s < replicas; ++s) {
        Spectrum sp = sample_spectrum(spec, s);
        stats.push_back(tw_statistic(sp.max(), spec.n, spec.p, 1.0));
        if (significant_components(sp, spec.n, spec.p, 0.01, 2).k_significant == 0) ++k0_at_1;
        if (significant_components(sp, spec.n, spec.p, 0.05, 2).k_significant == 0) ++k0_at_5;
    }
    double ks = detail::ks_vs_table(stats, detail::default_tw_table(2));
    double size1 = 1.0 - static_cast<double>(k0_at_1) / replicas;
    double size5 = 1.0 - static_cast<double>(k0_at_5) / replicas;
    r.passed = ks < 0.1 && std::abs(size1 - 0.01) <= 0.03 && std::abs(size5 - 0.05) <= 0.03;
    r.detail = "KS(statistic, TW2) = " + detail::fmt(ks) + " (< 0.1); empirical size " +
               detail::fmt(size1) + " at alpha=0.01, " + detail::fmt(size5) +
               " at alpha=0.05 (within 0.03)";
    return r;
}

// 9. BBP phase transition at p = 500, gamma = 1.
inline CheckResult check_bbp() {
    CheckResult r{9, "bbp-phase-transition"};
    EnsembleSpec super;
    super.kind = EnsembleKind::WishartComplex;
    super.n = 500;
    super.p = 500;
    // the BBP parameter Lambda maps to a covariance spike eigenvalue of
    // sigma * Lambda, i.e. a column standard deviation of sqrt(sigma * Lambda)
    super.spikes = {std::sqrt(3.0)};
    super.seed = 109;
    double mean_super = 0.0;
    const int n_super = 50;
    for (int s = 0; s < n_super; ++s) mean_super += sample_spectrum(super, s).max();
    mean_super /= n_super;

    EnsembleSpec sub = super;
    sub.spikes = {std::sqrt(1.5)};
    sub.seed = 209;
    double mean_sub = 0.0;
    int detections = 0;
    const int n_sub = 100;
    for (int s = 0; s < n_sub; ++s) {
        Spectrum sp = sample_spectrum(sub, s);
        mean_sub += sp.max();
        if (significant_components(sp, sub.n, sub.p, 0.05, 2).k_significant > 0) ++detections;
    }
    mean_sub /= n_sub;
    double rate = static_cast<double>(detections) / n_sub;

    bool ok_super = std::abs(mean_super - 4.5) / 4.5 < 0.05;
    bool ok_sub = std::abs(mean_sub - 4.0) / 4.0 < 0.02;
    bool ok_rate = std::abs(rate - 0.05) <= 0.06;
    r.passed = ok_super && ok_sub && ok_rate;
    r.detail = "mean lambda1 (Lambda=3) = " + detail::fmt(mean_super) +
               " (within 5% of 4.5); mean lambda1 (Lambda=1.5) = " + detail::fmt(mean_sub) +
               " (within 2% of 4); sub-threshold detection rate = " + detail::fmt(rate) +
               " (approximately alpha=0.05)";
    return r;
}

// 10. GUE finite-rank perturbation and subordination atom mass.
inline CheckResult check_gue_spike() {
    CheckResult r{10, "gue-finite-rank-perturbation"};
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GUE;
    spec.n = 1000;
    spec.additive_spike_lambda = 2.0;
    spec.additive_spike_rank = 20;
    spec.seed = 110;
    double outlier_mean = 0.0;
    const int reps = 3;
    for (int s = 0; s < reps; ++s) {
        Spectrum sp = sample_spectrum(spec, s);
        for (int i = 0; i < 20; ++i) outlier_mean += sp.values[i];
    }
    outlier_mean /= 20.0 * reps;

    EnsembleSpec weak = spec;
    weak.additive_spike_lambda = 0.5;
    weak.seed = 210;
    double weak_max = 0.0;
    for (int s = 0; s < reps; ++s) weak_max = std::max(weak_max, sample_spectrum(weak, s).max());

    std::vector<double> grid;
    for (double x = -3.0; x <= 3.2 + 1e-9; x += 0.005) grid.push_back(x);
    GridDensityLaw law = subordination_density(1.0, 0.02, 2.0, grid);
    double atom_mass = 0.0;
    for (auto& [loc, mass] : law.atoms)
        if (loc > 2.2) atom_mass += mass;

    bool ok_mean = std::abs(outlier_mean - 2.5) / 2.5 < 0.03;
    bool ok_weak = weak_max <= 2.05;
    bool ok_atom = std::abs(atom_mass - 0.02) < 0.005;
    r.passed = ok_mean && ok_weak && ok_atom;
    r.detail = "outlier mean = " + detail::fmt(outlier_mean) +
               " (within 3% of 2.5); sub-threshold max = " + detail::fmt(weak_max) +
               " (<= 2.05); subordination atom mass = " + detail::fmt(atom_mass) +
               " (0.02 +- 0.005)";
    return r;
}

// 11. Free CLT and the kappa/c coefficient tables.
inline CheckResult check_free_probability() {
    CheckResult r{11, "free-probability"};
    const double N = 1e4;
    MomentSeries bern;
    bern.m = {0, 1, 0, 1, 0, 1, 0, 1};
    FreeCumulantSeries kap = moments_to_free_cumulants(bern);
    FreeCumulantSeries scaled = rescale(kap, 1.0 / std::sqrt(N));
    for (auto& v : scaled.kappa) v *= N; // N-fold free self-convolution
    MomentSeries limit = free_cumulants_to_moments(scaled);
    std::vector<double> catalan{0, 1, 0, 2, 0, 5, 0, 14};
    double worst_clt = 0.0;
    for (int k = 0; k < 8; ++k)
        worst_clt = std::max(worst_clt, std::abs(limit.m[k] - catalan[k]));

    double worst_coeff = 0.0;
    RngStream rng(1101, 0);
    for (int trial = 0; trial < 20; ++trial) {
        MomentSeries ms;
        for (int k = 0; k < 4; ++k) ms.m.push_back(rng.next_normal());
        double m1 = ms.m[0], m2 = ms.m[1], m3 = ms.m[2], m4 = ms.m[3];
        double kappa4_ref = m4 - 4 * m1 * m3 - 2 * m2 * m2 + 10 * m2 * m1 * m1 -
                            5 * m1 * m1 * m1 * m1;
        double c4_ref = m4 - 4 * m1 * m3 - 3 * m2 * m2 + 12 * m2 * m1 * m1 -
                        6 * m1 * m1 * m1 * m1;
        worst_coeff = std::max(worst_coeff,
                               std::abs(moments_to_free_cumulants(ms).kappa[3] - kappa4_ref));
        worst_coeff = std::max(worst_coeff, std::abs(classical_cumulants(ms).c[3] - c4_ref));
    }

    r.passed = worst_clt < 5.0 / std::sqrt(N) && worst_coeff < 1e-12;
    r.detail = "free CLT max moment error = " + detail::fmt(worst_clt) + " (< " +
               detail::fmt(5.0 / std::sqrt(N)) +
               "); kappa4/c4 formula max error = " + detail::fmt(worst_coeff) + " (< 1e-12)";
    return r;
}

// 12. Determinantal structure at n=5 and the n=2 gap cross-check.
inline CheckResult check_determinantal() {
    CheckResult r{12, "determinantal-structure"};
    CDContext ctx = CDContext::gue(5);
    double worst = 0.0;
    // reproducing property on a few (x, z) pairs
    for (auto [x, z] : std::vector<std::pair<double, double>>{{0.0, 0.5}, {-1.0, 1.3}, {0.7, 0.7}}) {
        double conv = integrate_adaptive(
            [&](double y) { return cd_kernel(ctx, x, y) * cd_kernel(ctx, y, z); }, -6.0, 6.0,
            1e-10);
        worst = std::max(worst, std::abs(conv - cd_kernel(ctx, x, z)));
    }
    double mass = integrate_adaptive([&](double x) { return cd_kernel(ctx, x, x); }, -6.0, 6.0,
                                     1e-10);
    worst = std::max(worst, std::abs(mass - 5.0));
    // rho2 normalization n(n-1) by tensor quadrature
    QuadratureRule g = gauss_legendre(120, -5.0, 5.0);
    double rho2 = 0.0;
    std::vector<double> diag(120);
    for (int i = 0; i < 120; ++i) diag[i] = cd_kernel(ctx, g.nodes[i], g.nodes[i]);
    for (int i = 0; i < 120; ++i)
        for (int j = 0; j < 120; ++j) {
            double off = cd_kernel(ctx, g.nodes[i], g.nodes[j]);
            rho2 += g.weights[i] * g.weights[j] * (diag[i] * diag[j] - off * off);
        }
    worst = std::max(worst, std::abs(rho2 - 20.0));

    // n=2 gap probability: Fredholm vs brute-force joint-density integral
    const double a = 0.5;
    CDContext c2 = CDContext::gue(2);
    double det = fredholm_det([&](double x, double y) { return cd_kernel(c2, x, y); }, a,
                              std::numeric_limits<double>::infinity(), FredholmConfig{});
    QuadratureRule gb = gauss_legendre(120, -6.0, a);
    double brute = 0.0;
    for (int i = 0; i < 120; ++i)
        for (int j = 0; j < 120; ++j) {
            std::vector<double> lam{gb.nodes[i], gb.nodes[j]};
            brute += gb.weights[i] * gb.weights[j] *
                     std::exp(joint_pdf_log(EnsembleKind::GUE, lam, 2, 0, 1.0));
        }
    brute /= std::exp(partition_log(2));
    double gap_err = std::abs(det - brute);

    r.passed = worst < 1e-6 && gap_err < 1e-6;
    r.detail = "determinantal identity max error = " + detail::fmt(worst) +
               " (< 1e-6); n=2 gap |fredholm - brute| = " + detail::fmt(gap_err) + " (< 1e-6)";
    return r;
}

// 13. Kernel universality trend in n.
inline CheckResult check_universality_trend() {
    CheckResult r{13, "kernel-universality-trend"};
    double b50 = kernel_limit_check(50, KernelRegime::bulk, 0.0).sup_error;
    double b200 = kernel_limit_check(200, KernelRegime::bulk, 0.0).sup_error;
    double e50 = kernel_limit_check(50, KernelRegime::edge).sup_error;
    double e200 = kernel_limit_check(200, KernelRegime::edge).sup_error;
    r.passed = b200 < b50 && e200 < e50 && b200 < 0.05;
    r.detail = "bulk sup error n=50: " + detail::fmt(b50) + " -> n=200: " + detail::fmt(b200) +
               " (< 0.05); edge n=50: " + detail::fmt(e50) + " -> n=200: " + detail::fmt(e200);
    return r;
}

// 14. Property suites: Hoffman-Wielandt, rank-m CDF shift, Markowitz.
inline CheckResult check_property_suites() {
    CheckResult r{14, "property-suites"};
    double worst_margin = 0.0;
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GOE;
    spec.n = 8;
    spec.seed = 1401;
    for (int t = 0; t < 1000; ++t) {
        Eigen::MatrixXd a = sample_goe(spec, 2 * t);
        Eigen::MatrixXd b = sample_goe(spec, 2 * t + 1);
        worst_margin = std::min(worst_margin, hoffman_wielandt_margin<double>(a, b));
    }

    bool cdf_ok = true;
    EnsembleSpec base;
    base.kind = EnsembleKind::GOE;
    base.n = 30;
    base.seed = 1402;
    RngStream rng(1403, 0);
    for (int t = 0; t < 100 && cdf_ok; ++t) {
        int m = 1 + static_cast<int>(rng.next_uniform() * 5);
        Eigen::MatrixXd a = sample_goe(base, t);
        Eigen::MatrixXd b = apply_additive_spike(a, 1.0 + rng.next_uniform(), m);
        std::vector<double> ea = eigenvalues_of(a).ascending();
        std::vector<double> eb = eigenvalues_of(b).ascending();
        // sup distance between the two empirical CDFs
        double sup = 0.0;
        for (int i = 0; i < base.n; ++i) {
            double below_a =
                std::upper_bound(ea.begin(), ea.end(), eb[i]) - ea.begin();
            double below_b =
                std::upper_bound(eb.begin(), eb.end(), ea[i]) - eb.begin();
            sup = std::max(sup, std::abs(below_a - (i + 1.0)) / base.n);
            sup = std::max(sup, std::abs(below_b - (i + 1.0)) / base.n);
        }
        if (sup > static_cast<double>(m) / base.n + 1e-12) cdf_ok = false;
    }

    bool markowitz_ok = true;
    RngStream prng(1404, 0);
    const int pdim = 8;
    Eigen::MatrixXd g(pdim, pdim);
    for (int i = 0; i < pdim; ++i)
        for (int j = 0; j < pdim; ++j) g(i, j) = prng.next_normal();
    Eigen::MatrixXd m = g * g.transpose() + Eigen::MatrixXd::Identity(pdim, pdim);
    Eigen::VectorXd p(pdim);
    for (int i = 0; i < pdim; ++i) p(i) = prng.next_normal();
    PortfolioResult opt = markowitz(m, p, 1.5);
    for (int t = 0; t < 100 && markowitz_ok; ++t) {
        Eigen::VectorXd delta(pdim);
        for (int i = 0; i < pdim; ++i) delta(i) = prng.next_normal();
        delta -= p * (p.dot(delta) / p.squaredNorm()); // keep P . delta = 0
        Eigen::VectorXd w = opt.weights + 0.1 * delta;
        if (w.dot(m * w) < opt.risk - 1e-10) markowitz_ok = false;
    }

    r.passed = worst_margin >= -1e-9 && cdf_ok && markowitz_ok;
    r.detail = "min Hoffman-Wielandt margin = " + detail::fmt(worst_margin) +
               " (>= -1e-9); rank-m CDF bound " + (cdf_ok ? "held" : "violated") +
               "; Markowitz optimality " + (markowitz_ok ? "held" : "violated");
    return r;
}

inline CheckResult acceptance_check(int index) {
    switch (index) {
        case 1: return check_semicircle();
        case 2: return check_mp();
        case 3: return check_exact_density();
        case 4: return check_partition();
        case 5: return check_tw_dual_route();
        case 6: return check_gue_edge();
        case 7: return check_tw1_variant();
        case 8: return check_wishart_calibration();
        case 9: return check_bbp();
        case 10: return check_gue_spike();
        case 11: return check_free_probability();
        case 12: return check_determinantal();
        case 13: return check_universality_trend();
        case 14: return check_property_suites();
    }
    throw InputError("acceptance_check: index must be in [1, 14]");
}

inline std::vector<CheckResult> run_all_checks() {
    std::vector<CheckResult> out;
    for (int i = 1; i <= 14; ++i) out.push_back(acceptance_check(i));
    return out;
}

} // namespace rmt
