#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmt/freeprob.hpp"
#include "rmt/rng.hpp"

using namespace rmt;

TEST_CASE("moment-cumulant transform: low-order identities") {
    RngStream rng(31, 0);
    for (int t = 0; t < 10; ++t) {
        MomentSeries ms;
        for (int k = 0; k < 4; ++k) ms.m.push_back(rng.next_normal());
        FreeCumulantSeries ks = moments_to_free_cumulants(ms);
        double m1 = ms.m[0], m2 = ms.m[1], m3 = ms.m[2], m4 = ms.m[3];
        CHECK(ks.kappa[0] == doctest::Approx(m1).epsilon(1e-13));
        CHECK(ks.kappa[1] == doctest::Approx(m2 - m1 * m1).epsilon(1e-12));
        // kappa_3 = m3 - 3 m1 m2 + 2 m1^3  [DERIVED: expansion of M(z)=C(zM(z))]
        CHECK(ks.kappa[2] == doctest::Approx(m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1).epsilon(1e-11));
        // kappa_4 per the coefficient table
        double k4 = m4 - 4 * m1 * m3 - 2 * m2 * m2 + 10 * m2 * m1 * m1 - 5 * std::pow(m1, 4);
        CHECK(ks.kappa[3] == doctest::Approx(k4).epsilon(1e-10));
    }
}

TEST_CASE("transform roundtrip is the identity") {
    RngStream rng(32, 0);
    MomentSeries ms;
    for (int k = 0; k < 10; ++k) ms.m.push_back(rng.next_normal());
    MomentSeries back = free_cumulants_to_moments(moments_to_free_cumulants(ms));
    for (int k = 0; k < 10; ++k) CHECK(back.m[k] == doctest::Approx(ms.m[k]).epsilon(1e-10));
}

TEST_CASE("semicircle moments give a pure kappa_2") {
    // Catalan moments for sigma = 1: m_{2k} = Cat(k)
    MomentSeries ms;
    ms.m = {0, 1, 0, 2, 0, 5, 0, 14};
    FreeCumulantSeries ks = moments_to_free_cumulants(ms);
    CHECK(ks.kappa[1] == doctest::Approx(1.0).epsilon(1e-13));
    for (int k : {0, 2, 3, 4, 5, 6, 7})
        CHECK(std::abs(ks.kappa[k]) < 1e-12);
}

TEST_CASE("classical cumulants: Gaussian moments and c4 coefficients") {
    MomentSeries gauss;
    gauss.m = {0, 1, 0, 3, 0, 15, 0, 105};
    ClassicalCumulantSeries cs = classical_cumulants(gauss);
    CHECK(cs.c[1] == doctest::Approx(1.0).epsilon(1e-13));
    for (int k : {0, 2, 3, 4, 5, 6, 7}) CHECK(std::abs(cs.c[k]) < 1e-10);

    RngStream rng(33, 0);
    MomentSeries ms;
    for (int k = 0; k < 4; ++k) ms.m.push_back(rng.next_normal());
    double m1 = ms.m[0], m2 = ms.m[1], m3 = ms.m[2], m4 = ms.m[3];
    ClassicalCumulantSeries c = classical_cumulants(ms);
    CHECK(c.c[1] == doctest::Approx(m2 - m1 * m1).epsilon(1e-12));
    CHECK(c.c[2] == doctest::Approx(m3 - 3 * m1 * m2 + 2 * std::pow(m1, 3)).epsilon(1e-11));
    double c4 = m4 - 4 * m1 * m3 - 3 * m2 * m2 + 12 * m2 * m1 * m1 - 6 * std::pow(m1, 4);
    CHECK(c.c[3] == doctest::Approx(c4).epsilon(1e-10));
}

TEST_CASE("free convolution adds cumulants; atoms shift kappa_1") {
    FreeCumulantSeries a, b;
    a.kappa = {0, 1, 0, 0};  // semicircle sigma1^2 = 1
    b.kappa = {0, 2, 0, 0};  // semicircle sigma2^2 = 2
    FreeCumulantSeries sum = free_convolve(a, b);
    CHECK(sum.kappa == std::vector<double>{0, 3, 0, 0});

    FreeCumulantSeries shift;
    shift.kappa = {0.7, 0, 0, 0}; // delta_{0.7}
    FreeCumulantSeries shifted = free_convolve(a, shift);
    CHECK(shifted.kappa == std::vector<double>{0.7, 1, 0, 0});

    FreeCumulantSeries wrong;
    wrong.kappa = {1.0};
    CHECK_THROWS_AS(free_convolve(a, wrong), InputError);
}

TEST_CASE("rescale acts as alpha^k on moments and alpha^ell on cumulants") {
    MomentSeries ms;
    ms.m = {1, 2, 3};
    MomentSeries r = rescale(ms, 2.0);
    CHECK(r.m == std::vector<double>{2, 8, 24});
    FreeCumulantSeries ks;
    ks.kappa = {1, 1, 1};
    FreeCumulantSeries rk = rescale(ks, -1.0);
    CHECK(rk.kappa == std::vector<double>{-1, 1, -1});
    // scaling homomorphism
    MomentSeries ab = rescale(rescale(ms, 1.5), 2.0);
    MomentSeries once = rescale(ms, 3.0);
    for (int k = 0; k < 3; ++k) CHECK(ab.m[k] == doctest::Approx(once.m[k]).epsilon(1e-14));
}

TEST_CASE("gue spike location and threshold") {
    CHECK(gue_spike_location(1.0, 2.0).value() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK_FALSE(gue_spike_location(1.0, 0.5).has_value());
    CHECK_FALSE(gue_spike_location(1.0, 1.0).has_value()); // boundary: none at equality
    CHECK_THROWS_AS(gue_spike_location(-1.0, 1.0), InputError);
}

TEST_CASE("subordination with eps = 0 reproduces the semicircle") {
    std::vector<double> grid;
    for (double x = -2.5; x <= 2.5 + 1e-9; x += 0.05) grid.push_back(x);
    GridDensityLaw law = subordination_density(1.0, 0.0, 1.0, grid, 1e-5);
    CHECK(law.atoms.empty());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(law.density[i] - semicircle_pdf(1.0, grid[i])));
    CHECK(worst < 1e-3); // smoothing at eta = 1e-5 dominates the error
}

TEST_CASE("subordination: sub-threshold atom stays inside the bulk") {
    std::vector<double> grid;
    for (double x = -2.6; x <= 2.6 + 1e-9; x += 0.01) grid.push_back(x);
    GridDensityLaw law = subordination_density(1.0, 0.02, 0.5, grid);
    CHECK(law.atoms.empty());
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] > 2.05) CHECK(law.density[i] < 1e-3);
}

TEST_CASE("subordination total mass is 1 within 1e-3") {
    std::vector<double> grid;
    for (double x = -3.0; x <= 3.2 + 1e-9; x += 0.01) grid.push_back(x);
    GridDensityLaw law = subordination_density(1.0, 0.02, 2.0, grid);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        mass += 0.5 * (law.density[i] + law.density[i + 1]) * (grid[i + 1] - grid[i]);
    for (auto& [loc, m] : law.atoms) mass += m;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("free CLT moments approach the semicircle by the subordination route") {
    // semicircle (sigma^2 = 1) boxplus symmetric Bernoulli at +-1:
    // moments from cumulant addition vs numeric grid moments
    FreeCumulantSeries bern = moments_to_free_cumulants(MomentSeries{{0, 1, 0, 1, 0, 1}});
    FreeCumulantSeries sc;
    sc.kappa = {0, 1, 0, 0, 0, 0};
    MomentSeries mixed = free_cumulants_to_moments(free_convolve(bern, sc));

    // numeric: mu_sc boxplus (0.5 delta_{-1} + 0.5 delta_{1}) via the shifted
    // two-atom measure; reuse subordination with lambda=2 shifted by -1:
    // B = 0.5 delta_0 + 0.5 delta_2 shifted left by 1.
    std::vector<double> grid;
    for (double x = -2.8; x <= 4.8 + 1e-9; x += 0.005) grid.push_back(x);
    // small eta: the Cauchy smoothing tail decays like eta/x^2 and would
    // otherwise bias the high moments
    GridDensityLaw law = subordination_density(1.0, 0.5, 2.0, grid, 1e-5);
    double shift = -1.0;
    std::vector<double> num(6, 0.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double xm = 0.5 * (grid[i] + grid[i + 1]) + shift;
        double w = 0.5 * (law.density[i] + law.density[i + 1]) * (grid[i + 1] - grid[i]);
        double xp = 1.0;
        for (int k = 0; k < 6; ++k) {
            xp *= xm;
            num[k] += w * xp;
        }
    }
    for (int k = 0; k < 6; ++k)
        CHECK(std::abs(num[k] - mixed.m[k]) < 1e-3 * std::max(1.0, std::abs(mixed.m[k])));
}
