#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "dense_matrix.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace skewexp {

/// Real n x n matrix with A = -A^T held exactly as stored. The constructor
/// repairs asymmetric input by (A - A^T)/2 and zeroes the diagonal, so raw
/// ingestion of measured data is fine.
class SkewMatrix {
public:
    SkewMatrix() = default;

    explicit SkewMatrix(DenseMatrix raw) : m_(std::move(raw)) {
        if (!m_.square()) throw domain_error("SkewMatrix: matrix not square");
        if (!m_.all_finite()) throw domain_error("SkewMatrix: non-finite entry");
        const std::size_t n = m_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            m_(i, i) = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = 0.5 * (m_(i, j) - m_(j, i));
                m_(i, j) = v;
                m_(j, i) = -v;
            }
        }
    }

    static SkewMatrix zero(std::size_t n) { return SkewMatrix(DenseMatrix(n, n)); }

    std::size_t n() const noexcept { return m_.rows(); }
    const DenseMatrix& dense() const noexcept { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    /// Writes v at (i,j) and -v at (j,i); diagonal writes must be zero.
    void set(std::size_t i, std::size_t j, double v) {
        if (i == j) {
            if (v != 0.0) throw domain_error("SkewMatrix: nonzero diagonal entry");
            return;
        }
        m_(i, j) = v;
        m_(j, i) = -v;
    }

    SkewMatrix& operator+=(const SkewMatrix& o) { m_ += o.m_; return *this; }
    SkewMatrix& operator-=(const SkewMatrix& o) { m_ -= o.m_; return *this; }
    SkewMatrix& operator*=(double s) { m_ *= s; return *this; }
    friend SkewMatrix operator+(SkewMatrix x, const SkewMatrix& y) { return x += y; }
    friend SkewMatrix operator-(SkewMatrix x, const SkewMatrix& y) { return x -= y; }
    friend SkewMatrix operator*(SkewMatrix x, double s) { return x *= s; }
    friend SkewMatrix operator*(double s, SkewMatrix x) { return x *= s; }

private:
    DenseMatrix m_;
};

inline double frobenius_norm(const SkewMatrix& a) { return frobenius_norm(a.dense()); }

/// Q in SO(n). Validation: ||Q^T Q - I||_F <= orth_tol (default 1e-12 * n,
/// accumulated rounding in Schur-based products scales ~ n ulp) and det > 0.
class SpecialOrthogonal {
public:
    SpecialOrthogonal() = default;

    explicit SpecialOrthogonal(DenseMatrix q, double orth_tol = -1.0) : m_(std::move(q)) {
        if (!m_.square()) throw domain_error("SpecialOrthogonal: matrix not square");
        const std::size_t n = m_.rows();
        if (orth_tol < 0.0) orth_tol = 1e-12 * static_cast<double>(n);
        DenseMatrix g = matmul_tn(m_, m_);
        for (std::size_t i = 0; i < n; ++i) g(i, i) -= 1.0;
        const double resid = frobenius_norm(g);
        if (!(resid <= orth_tol))
            throw domain_error("SpecialOrthogonal: ||Q^T Q - I||_F = " + std::to_string(resid) +
                               " exceeds tolerance " + std::to_string(orth_tol));
        if (determinant_sign(m_) <= 0)
            throw domain_error("SpecialOrthogonal: det(Q) <= 0");
    }

    /// For products that are orthogonal by construction (R E R^T and friends);
    /// skips the O(n^3) validation.
    static SpecialOrthogonal from_trusted(DenseMatrix q) {
        SpecialOrthogonal s;
        s.m_ = std::move(q);
        if (!s.m_.square()) throw domain_error("SpecialOrthogonal: matrix not square");
        return s;
    }

    static SpecialOrthogonal identity(std::size_t n) {
        return from_trusted(DenseMatrix::identity(n));
    }

    std::size_t n() const noexcept { return m_.rows(); }
    const DenseMatrix& dense() const noexcept { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    DenseMatrix m_;
};

/// Size-2 block partition bookkeeping of Definition 2.1/2.2:
/// m = floor(n/2), k = ceil(n/2); indices are 1-based block coordinates.
struct BlockIndex {
    std::size_t i; ///< 1..k
    std::size_t j; ///< 1..k
    std::size_t m;
    std::size_t k;

    BlockIndex(std::size_t i_, std::size_t j_, std::size_t n) : i(i_), j(j_) {
        m = n / 2;
        k = (n + 1) / 2;
        if (i < 1 || i > k || j < 1 || j > k)
            throw bounds_error("BlockIndex (" + std::to_string(i) + "," + std::to_string(j) +
                               ") out of range for n = " + std::to_string(n));
    }

    std::size_t row_begin() const noexcept { return 2 * (i - 1); }
    std::size_t col_begin() const noexcept { return 2 * (j - 1); }
    std::size_t row_count(std::size_t n) const noexcept { return (2 * i <= n) ? 2 : 1; }
    std::size_t col_count(std::size_t n) const noexcept { return (2 * j <= n) ? 2 : 1; }
};

/// The 2x2 (or edge 1x2 / 2x1 / 1x1) block M_[i,j].
inline DenseMatrix block(const DenseMatrix& M, const BlockIndex& idx) {
    if (!M.square()) throw domain_error("block: matrix not square");
    const std::size_t n = M.rows();
    BlockIndex chk(idx.i, idx.j, n); // revalidates against this n
    const std::size_t r0 = chk.row_begin(), c0 = chk.col_begin();
    const std::size_t rc = chk.row_count(n), cc = chk.col_count(n);
    DenseMatrix out(rc, cc);
    for (std::size_t r = 0; r < rc; ++r)
        for (std::size_t c = 0; c < cc; ++c) out(r, c) = M(r0 + r, c0 + c);
    return out;
}

/// In-place variant: writes the block back.
inline void set_block(DenseMatrix& M, const BlockIndex& idx, const DenseMatrix& B) {
    if (!M.square()) throw domain_error("set_block: matrix not square");
    const std::size_t n = M.rows();
    BlockIndex chk(idx.i, idx.j, n);
    const std::size_t rc = chk.row_count(n), cc = chk.col_count(n);
    if (B.rows() != rc || B.cols() != cc)
        throw domain_error("set_block: block shape mismatch");
    const std::size_t r0 = chk.row_begin(), c0 = chk.col_begin();
    for (std::size_t r = 0; r < rc; ++r)
        for (std::size_t c = 0; c < cc; ++c) M(r0 + r, c0 + c) = B(r, c);
}

inline DenseMatrix block(const SkewMatrix& A, const BlockIndex& idx) {
    return block(A.dense(), idx);
}

/// Raw entries i.i.d. uniform on [-1,1] from the seeded deterministic
/// generator, then skew-symmetrized by the constructor.
inline SkewMatrix random_skew(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw domain_error("random_skew: n must be >= 1");
    SplitRng rng(seed);
    DenseMatrix raw(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) raw(i, j) = rng.next_symmetric();
    return SkewMatrix(std::move(raw));
}

} // namespace skewexp
