#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace skewexp {

/// Cyclic Jacobi eigensolver for a symmetric matrix held as a row-major
/// vector. Templated on the scalar so the extended-precision oracle can reuse
/// it. Eigenvectors accumulate in V (columns); eigenvalues land on the
/// diagonal of a, returned sorted descending.
template <typename Real>
void jacobi_eigh(std::vector<Real>& a, std::size_t n, std::vector<Real>& eigvals,
                 std::vector<Real>& V, Real rel_tol = Real(1e-15), int max_sweeps = 60) {
    using std::fabs;
    using std::sqrt;
    V.assign(n * n, Real(0));
    for (std::size_t i = 0; i < n; ++i) V[i * n + i] = Real(1);
    eigvals.assign(n, Real(0));
    if (n == 0) return;

    auto off = [&]() {
        Real s(0);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s = s + a[p * n + q] * a[p * n + q];
        return s;
    };
    Real scale(0);
    for (std::size_t i = 0; i < n * n; ++i) {
        Real v = fabs(a[i]);
        if (v > scale) scale = v;
    }
    const Real tiny = scale * rel_tol + Real(1e-300);
    const Real stop = tiny * tiny * Real(static_cast<double>(n * n));

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off() <= stop) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Real apq = a[p * n + q];
                if (fabs(apq) <= tiny) continue;
                const Real app = a[p * n + p], aqq = a[q * n + q];
                const Real tau = (aqq - app) / (Real(2) * apq);
                Real t;
                if (tau >= Real(0))
                    t = Real(1) / (tau + sqrt(Real(1) + tau * tau));
                else
                    t = Real(-1) / (-tau + sqrt(Real(1) + tau * tau));
                const Real c = Real(1) / sqrt(Real(1) + t * t);
                const Real s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const Real akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Real apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Real vkp = V[k * n + p], vkq = V[k * n + q];
                    V[k * n + p] = c * vkp - s * vkq;
                    V[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) eigvals[i] = a[i * n + i];

    // sort descending, moving eigenvector columns along
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t best = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (eigvals[j] > eigvals[best]) best = j;
        if (best != i) {
            std::swap(eigvals[i], eigvals[best]);
            for (std::size_t k = 0; k < n; ++k) std::swap(V[k * n + i], V[k * n + best]);
        }
    }
}

} // namespace skewexp
