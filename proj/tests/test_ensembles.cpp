#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmt/ensembles.hpp"

using namespace rmt;

TEST_CASE("GOE samples are symmetric with the announced variances") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GOE;
    spec.n = 60;
    spec.sigma2 = 2.0;
    spec.seed = 5;
    double off2 = 0.0, diag2 = 0.0;
    int off_count = 0;
    const int reps = 200;
    for (int s = 0; s < reps; ++s) {
        Eigen::MatrixXd m = sample_goe(spec, s);
        CHECK((m - m.transpose()).norm() == 0.0);
        for (int i = 0; i < spec.n; ++i) {
            diag2 += m(i, i) * m(i, i);
            for (int j = i + 1; j < spec.n; ++j) {
                off2 += m(i, j) * m(i, j);
                ++off_count;
            }
        }
    }
    // E[off^2] = sigma^2/n, E[diag^2] = 2 sigma^2/n
    CHECK(off2 / off_count == doctest::Approx(spec.sigma2 / spec.n).epsilon(0.02));
    CHECK(diag2 / (spec.n * reps) == doctest::Approx(2.0 * spec.sigma2 / spec.n).epsilon(0.05));
}

TEST_CASE("GUE samples are hermitian with the announced variances") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GUE;
    spec.n = 60;
    spec.seed = 6;
    double off2 = 0.0, diag2 = 0.0;
    int off_count = 0;
    const int reps = 200;
    for (int s = 0; s < reps; ++s) {
        Eigen::MatrixXcd m = sample_gue(spec, s);
        CHECK((m - m.adjoint()).norm() == 0.0);
        for (int i = 0; i < spec.n; ++i) {
            CHECK(m(i, i).imag() == 0.0);
            diag2 += std::norm(m(i, i));
            for (int j = i + 1; j < spec.n; ++j) {
                off2 += std::norm(m(i, j));
                ++off_count;
            }
        }
    }
    // E|off|^2 = sigma^2/n, E[diag^2] = sigma^2/n
    CHECK(off2 / off_count == doctest::Approx(1.0 / spec.n).epsilon(0.02));
    CHECK(diag2 / (spec.n * reps) == doctest::Approx(1.0 / spec.n).epsilon(0.05));
}

TEST_CASE("sampling is deterministic in (seed, sample_index)") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GUE;
    spec.n = 30;
    spec.seed = 99;
    Eigen::MatrixXcd a = sample_gue(spec, 4);
    Eigen::MatrixXcd b = sample_gue(spec, 4);
    CHECK((a - b).norm() == 0.0);
    Eigen::MatrixXcd c = sample_gue(spec, 5);
    CHECK((a - c).norm() != 0.0);
}

TEST_CASE("Wishart matrices are PSD with correct rank") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::WishartReal;
    spec.n = 20;
    spec.p = 50;
    spec.seed = 7;
    Spectrum s = sample_spectrum(spec);
    CHECK(s.n() == 50);
    CHECK(s.min() > -1e-10);
    int zeros = 0;
    for (double v : s.values)
        if (std::abs(v) < 1e-10) ++zeros;
    CHECK(zeros == spec.p - spec.n); // rank n when n < p
}

TEST_CASE("Wishart trace concentrates at p sigma^2 gamma-independently") {
    // E[M_jj] = sigma^2, so E[Tr M] = p sigma^2
    EnsembleSpec spec;
    spec.kind = EnsembleKind::WishartComplex;
    spec.n = 400;
    spec.p = 200;
    spec.sigma2 = 1.5;
    spec.seed = 8;
    Spectrum s = sample_spectrum(spec);
    double tr = 0.0;
    for (double v : s.values) tr += v;
    CHECK(tr == doctest::Approx(spec.p * spec.sigma2).epsilon(0.03));
}

TEST_CASE("spiked Wishart columns carry the spike variance") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::WishartReal;
    spec.n = 2000;
    spec.p = 10;
    spec.spikes = {3.0};
    spec.seed = 9;
    Eigen::MatrixXd m = sample_wishart_real(spec);
    CHECK(m(0, 0) == doctest::Approx(9.0).epsilon(0.15));
    CHECK(m(1, 1) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("additive spike shifts the top eigenvalues") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GOE;
    spec.n = 300;
    spec.seed = 10;
    spec.additive_spike_lambda = 5.0;
    spec.additive_spike_rank = 2;
    Spectrum s = sample_spectrum(spec);
    // outliers near Lambda + sigma^2/Lambda = 5.2, far above the bulk edge 2
    CHECK(s.values[0] > 4.0);
    CHECK(s.values[1] > 4.0);
    CHECK(s.values[2] < 2.5);
}

TEST_CASE("spec validation rejects malformed requests") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GOE;
    spec.n = 0;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec.n = 5;
    spec.sigma2 = -1.0;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec.sigma2 = 1.0;
    spec.additive_spike_rank = 9;
    CHECK_THROWS_AS(spec.validate(), InputError);

    EnsembleSpec w;
    w.kind = EnsembleKind::WishartReal;
    w.n = 5;
    w.p = 2;
    w.spikes = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(w.validate(), InputError);
    CHECK_THROWS_AS(sample_goe(w), InputError); // kind mismatch
}

TEST_CASE("sample_batch uses consecutive stream indices") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::GOE;
    spec.n = 10;
    spec.seed = 11;
    SampleBatch batch = sample_batch(spec, 3, 5);
    CHECK(batch.spectra.size() == 3);
    CHECK(batch.stream_indices == std::vector<std::uint64_t>{5, 6, 7});
    Spectrum direct = sample_spectrum(spec, 6);
    CHECK(batch.spectra[1].values == direct.values);
}
