#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cmalab {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major. Small n only (domain dimensions).
struct CMatrix {
    int n = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    explicit CMatrix(int size) : n(size), a(static_cast<size_t>(size) * size, cplx{0.0, 0.0}) {}

    static CMatrix identity(int size) {
        CMatrix m(size);
        for (int i = 0; i < size; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    bool is_hermitian(double tol = 1e-12) const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
        return true;
    }

    bool is_symmetric(double tol = 1e-12) const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }
};

/// Eigenvalues of a real symmetric matrix (row-major, size n*n) by cyclic Jacobi.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> m, int n) {
    auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = at(i, i);
    return ev;
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// [[Re H, -Im H], [Im H, Re H]]; each eigenvalue of H appears twice.
inline std::vector<double> hermitian_eigenvalues(const CMatrix& h) {
    if (!h.is_hermitian(1e-9)) throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");
    const int n = h.n;
    std::vector<double> m(static_cast<size_t>(2 * n) * (2 * n), 0.0);
    auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * 2 * n + j]; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            at(i, j) = h(i, j).real();
            at(i + n, j + n) = h(i, j).real();
            at(i, j + n) = -h(i, j).imag();
            at(i + n, j) = h(i, j).imag();
        }
    }
    auto ev = symmetric_eigenvalues(std::move(m), 2 * n);
    // deduplicate by sorting and taking every other entry
    std::vector<double> sorted = ev;
    for (size_t i = 1; i < sorted.size(); ++i)
        for (size_t j = i; j > 0 && sorted[j - 1] > sorted[j]; --j) std::swap(sorted[j - 1], sorted[j]);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = sorted[static_cast<size_t>(2 * i)];
    return out;
}

inline double hermitian_min_eigenvalue(const CMatrix& h) {
    auto ev = hermitian_eigenvalues(h);
    double mn = ev[0];
    for (double v : ev) mn = std::min(mn, v);
    return mn;
}

}  // namespace cmalab
