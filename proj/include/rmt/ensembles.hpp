#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <variant>
#include <vector>

#include "rmt/eigen_solve.hpp"
#include "rmt/errors.hpp"
#include "rmt/rng.hpp"

namespace rmt {

enum class EnsembleKind { GOE, GUE, WishartReal, WishartComplex };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::GUE;
    int n = 1;                  // matrix size (Gaussian) or degrees of freedom (Wishart)
    int p = 1;                  // Wishart dimension
    double sigma2 = 1.0;        // base variance
    std::vector<double> spikes; // Wishart covariance spikes, standard-deviation scale
    double additive_spike_lambda = 0.0; // GOE/GUE finite-rank shift
    int additive_spike_rank = 0;
    std::uint64_t seed = 0;

    double gamma() const { return static_cast<double>(n) / p; }

    void validate() const {
        if (n < 1) throw InputError("EnsembleSpec: n must be >= 1");
        if (sigma2 <= 0.0) throw InputError("EnsembleSpec: sigma2 must be positive");
        bool wishart = kind == EnsembleKind::WishartReal || kind == EnsembleKind::WishartComplex;
        if (wishart) {
            if (p < 1) throw InputError("EnsembleSpec: p must be >= 1 for Wishart");
            if (static_cast<int>(spikes.size()) > p)
                throw InputError("EnsembleSpec: more spikes than dimensions");
        } else {
            if (additive_spike_rank < 0 || additive_spike_rank > n)
                throw InputError("EnsembleSpec: additive spike rank out of range");
        }
    }
};

using MatrixVariant = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
apply_additive_spike(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m, double lambda,
                     int rank) {
    if (rank < 0 || rank > m.rows())
        throw InputError("apply_additive_spike: rank exceeds matrix order");
    for (int i = 0; i < rank; ++i) m(i, i) += lambda;
    return m;
}

// GOE sample: symmetric, E[M_ij^2] = sigma^2/n off the diagonal and
// E[M_ii^2] = 2 sigma^2/n on it.
inline Eigen::MatrixXd sample_goe(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
    spec.validate();
    if (spec.kind != EnsembleKind::GOE) throw InputError("sample_goe: spec kind is not GOE");
    RngStream rng(spec.seed, sample_index);
    const int n = spec.n;
    const double off = std::sqrt(spec.sigma2 / n);
    const double diag = std::sqrt(2.0 * spec.sigma2 / n);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = diag * rng.next_normal();
        for (int j = i + 1; j < n; ++j) {
            double x = off * rng.next_normal();
            m(i, j) = x;
            m(j, i) = x;
        }
    }
    if (spec.additive_spike_rank > 0 && spec.additive_spike_lambda != 0.0)
        m = apply_additive_spike(std::move(m), spec.additive_spike_lambda, spec.additive_spike_rank);
    return m;
}

// GUE sample: hermitian, off-diagonal real/imaginary parts of variance
// sigma^2/2n, real diagonal of variance sigma^2/n.
inline Eigen::MatrixXcd sample_gue(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
    spec.validate();
    if (spec.kind != EnsembleKind::GUE) throw InputError("sample_gue: spec kind is not GUE");
    RngStream rng(spec.seed, sample_index);
    const int n = spec.n;
    const double off = std::sqrt(spec.sigma2 / (2.0 * n));
    const double diag = std::sqrt(spec.sigma2 / n);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = diag * rng.next_normal();
        for (int j = i + 1; j < n; ++j) {
            std::complex<double> z(off * rng.next_normal(), off * rng.next_normal());
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    if (spec.additive_spike_rank > 0 && spec.additive_spike_lambda != 0.0)
        m = apply_additive_spike(std::move(m), spec.additive_spike_lambda, spec.additive_spike_rank);
    return m;
}

inline MatrixVariant sample_gaussian(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
    if (spec.kind == EnsembleKind::GOE) return sample_goe(spec, sample_index);
    if (spec.kind == EnsembleKind::GUE) return sample_gue(spec, sample_index);
    throw InputError("sample_gaussian: spec kind must be GOE or GUE");
}

// Wishart sample M = n^{-1} X^T X (conjugate transpose in the complex
// case).  Column j of X has standard deviation spikes[j] for spiked
// coordinates, sigma otherwise, i.e. K = diag(spikes^2, sigma^2, ...).
inline Eigen::MatrixXd sample_wishart_real(const EnsembleSpec& spec,
                                           std::uint64_t sample_index = 0) {
    spec.validate();
    if (spec.kind != EnsembleKind::WishartReal)
        throw InputError("sample_wishart_real: spec kind mismatch");
    RngStream rng(spec.seed, sample_index);
    const int n = spec.n, p = spec.p;
    const double sigma = std::sqrt(spec.sigma2);
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            double sd = j < static_cast<int>(spec.spikes.size()) ? spec.spikes[j] : sigma;
            x(i, j) = sd * rng.next_normal();
        }
    return (x.transpose() * x) / static_cast<double>(n);
}

inline Eigen::MatrixXcd sample_wishart_complex(const EnsembleSpec& spec,
                                               std::uint64_t sample_index = 0) {
    spec.validate();
    if (spec.kind != EnsembleKind::WishartComplex)
        throw InputError("sample_wishart_complex: spec kind mismatch");
    RngStream rng(spec.seed, sample_index);
    const int n = spec.n, p = spec.p;
    const double sigma = std::sqrt(spec.sigma2);
    Eigen::MatrixXcd x(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            double sd = (j < static_cast<int>(spec.spikes.size()) ? spec.spikes[j] : sigma) /
                        std::sqrt(2.0);
            x(i, j) = std::complex<double>(sd * rng.next_normal(), sd * rng.next_normal());
        }
    return (x.adjoint() * x) / static_cast<double>(n);
}

inline MatrixVariant sample_wishart(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
    if (spec.kind == EnsembleKind::WishartReal) return sample_wishart_real(spec, sample_index);
    if (spec.kind == EnsembleKind::WishartComplex)
        return sample_wishart_complex(spec, sample_index);
    throw InputError("sample_wishart: spec kind must be a Wishart ensemble");
}

inline Spectrum sample_spectrum(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
    switch (spec.kind) {
        case EnsembleKind::GOE: return eigenvalues_of(sample_goe(spec, sample_index));
        case EnsembleKind::GUE: return eigenvalues_of(sample_gue(spec, sample_index));
        case EnsembleKind::WishartReal:
            return eigenvalues_of(sample_wishart_real(spec, sample_index));
        case EnsembleKind::WishartComplex:
            return eigenvalues_of(sample_wishart_complex(spec, sample_index));
    }
    throw InputError("sample_spectrum: unknown ensemble kind");
}

struct SampleBatch {
    EnsembleSpec spec;
    std::vector<Spectrum> spectra;
    std::vector<std::uint64_t> stream_indices;
};

inline SampleBatch sample_batch(const EnsembleSpec& spec, int count,
                                std::uint64_t first_index = 0) {
    SampleBatch batch;
    batch.spec = spec;
    batch.spectra.reserve(count);
    for (int s = 0; s < count; ++s) {
        batch.stream_indices.push_back(first_index + s);
        batch.spectra.push_back(sample_spectrum(spec, first_index + s));
    }
    return batch;
}

} // namespace rmt
