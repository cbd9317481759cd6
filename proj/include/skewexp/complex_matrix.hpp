#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "dense_matrix.hpp"
#include "errors.hpp"

namespace skewexp {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Internal to the eigendecomposition bridge
/// and the Daletskii-Krein reference path; not part of the production API.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static ComplexMatrix from_real(const DenseMatrix& m) {
        ComplexMatrix c(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) c.a_[i] = m.data()[i];
        return c;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    cplx* row(std::size_t i) noexcept { return a_.data() + i * cols_; }
    const cplx* row(std::size_t i) const noexcept { return a_.data() + i * cols_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
        return t;
    }

    double max_imag() const {
        double best = 0.0;
        for (const cplx& v : a_) best = std::max(best, std::fabs(v.imag()));
        return best;
    }

    DenseMatrix real_part() const {
        DenseMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < rows_ * cols_; ++i) r.data()[i] = a_[i].real();
        return r;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

inline ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B,
                            GemmCounter* counter = nullptr) {
    if (A.cols() != B.rows()) throw domain_error("complex matmul: inner dimensions differ");
    ComplexMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        cplx* ci = C.row(i);
        const cplx* ai = A.row(i);
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const cplx aik = ai[k];
            const cplx* bk = B.row(k);
            for (std::size_t j = 0; j < B.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    if (counter) ++counter->products;
    return C;
}

/// C = A^H * B.
inline ComplexMatrix matmul_hn(const ComplexMatrix& A, const ComplexMatrix& B,
                               GemmCounter* counter = nullptr) {
    if (A.rows() != B.rows()) throw domain_error("complex matmul_hn: inner dimensions differ");
    ComplexMatrix C(A.cols(), B.cols());
    for (std::size_t k = 0; k < A.rows(); ++k) {
        const cplx* ak = A.row(k);
        const cplx* bk = B.row(k);
        for (std::size_t i = 0; i < A.cols(); ++i) {
            const cplx aki = std::conj(ak[i]);
            cplx* ci = C.row(i);
            for (std::size_t j = 0; j < B.cols(); ++j) ci[j] += aki * bk[j];
        }
    }
    if (counter) ++counter->products;
    return C;
}

/// C = A * B^H.
inline ComplexMatrix matmul_nh(const ComplexMatrix& A, const ComplexMatrix& B,
                               GemmCounter* counter = nullptr) {
    if (A.cols() != B.cols()) throw domain_error("complex matmul_nh: inner dimensions differ");
    ComplexMatrix C(A.rows(), B.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const cplx* ai = A.row(i);
        cplx* ci = C.row(i);
        for (std::size_t j = 0; j < B.rows(); ++j) {
            const cplx* bj = B.row(j);
            cplx s = 0.0;
            for (std::size_t k = 0; k < A.cols(); ++k) s += ai[k] * std::conj(bj[k]);
            ci[j] = s;
        }
    }
    if (counter) ++counter->products;
    return C;
}

} // namespace skewexp
