#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

// Eigenvalues of one matrix sample, sorted in decreasing order.
struct Spectrum {
    std::vector<double> values;

    int n() const { return static_cast<int>(values.size()); }
    double max() const { return values.front(); }
    double min() const { return values.back(); }

    // Ascending copy, convenient for CDF work.
    std::vector<double> ascending() const {
        std::vector<double> v(values.rbegin(), values.rend());
        return v;
    }
};

template <typename Scalar>
struct EigenDecomposition {
    Spectrum spectrum;
    // Columns ordered to match spectrum.values (descending eigenvalues).
    std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> vectors;
};

namespace detail {

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& m, const char* where) {
    if (!m.allFinite()) throw InputError(std::string(where) + ": non-finite entry");
}

template <typename Scalar>
EigenDecomposition<Scalar>
sym_eigen_impl(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, bool want_vectors) {
    check_finite(m, "sym_eigen");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver(
        m, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("sym_eigen: eigensolver failed to converge");

    const int n = static_cast<int>(m.rows());
    EigenDecomposition<Scalar> out;
    out.spectrum.values.resize(n);
    for (int i = 0; i < n; ++i) // Eigen returns ascending order
        out.spectrum.values[i] = solver.eigenvalues()(n - 1 - i);
    if (want_vectors) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> q(n, n);
        for (int i = 0; i < n; ++i) q.col(i) = solver.eigenvectors().col(n - 1 - i);
        out.vectors = std::move(q);
    }
    return out;
}

} // namespace detail

inline EigenDecomposition<double> sym_eigen(const Eigen::MatrixXd& m, bool want_vectors = false) {
    return detail::sym_eigen_impl<double>(m, want_vectors);
}

inline EigenDecomposition<std::complex<double>> sym_eigen(const Eigen::MatrixXcd& m,
                                                          bool want_vectors = false) {
    return detail::sym_eigen_impl<std::complex<double>>(m, want_vectors);
}

inline Spectrum eigenvalues_of(const Eigen::MatrixXd& m) { return sym_eigen(m).spectrum; }
inline Spectrum eigenvalues_of(const Eigen::MatrixXcd& m) { return sym_eigen(m).spectrum; }

} // namespace rmt
