#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace skewexp {

/// Counts full n x n matrix-matrix products, the complexity proxy used by the
/// benchmark CLI. Per-call local state; never global.
struct GemmCounter {
    long long products = 0;
};

/// Dense real matrix, row-major. The only storage format in the library;
/// problem sizes here are dense-friendly.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    double* data() noexcept { return a_.data(); }
    const double* data() const noexcept { return a_.data(); }
    double* row(std::size_t i) noexcept { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const noexcept { return a_.data() + i * cols_; }

    bool all_finite() const {
        for (double v : a_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    DenseMatrix& operator-=(const DenseMatrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    DenseMatrix& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }

    friend DenseMatrix operator+(DenseMatrix x, const DenseMatrix& y) { return x += y; }
    friend DenseMatrix operator-(DenseMatrix x, const DenseMatrix& y) { return x -= y; }
    friend DenseMatrix operator*(DenseMatrix x, double s) { return x *= s; }
    friend DenseMatrix operator*(double s, DenseMatrix x) { return x *= s; }

private:
    void require_same_shape(const DenseMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw domain_error("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

inline double frobenius_norm(const DenseMatrix& m) {
    double s = 0.0;
    const double* p = m.data();
    const std::size_t len = m.rows() * m.cols();
    for (std::size_t i = 0; i < len; ++i) s += p[i] * p[i];
    return std::sqrt(s);
}

/// Maximum absolute column sum.
inline double one_norm(const DenseMatrix& m) {
    std::vector<double> col(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) col[j] += std::fabs(r[j]);
    }
    double best = 0.0;
    for (double v : col) best = std::max(best, v);
    return best;
}

inline double max_abs(const DenseMatrix& m) {
    double best = 0.0;
    const double* p = m.data();
    const std::size_t len = m.rows() * m.cols();
    for (std::size_t i = 0; i < len; ++i) best = std::max(best, std::fabs(p[i]));
    return best;
}

/// C = A * B. The k-middle loop keeps the inner updates contiguous.
inline DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B,
                          GemmCounter* counter = nullptr) {
    if (A.cols() != B.rows()) throw domain_error("matmul: inner dimensions differ");
    DenseMatrix C(A.rows(), B.cols());
    const std::size_t n = A.rows(), kk = A.cols(), mm = B.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = C.row(i);
        const double* ai = A.row(i);
        for (std::size_t k = 0; k < kk; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = B.row(k);
            for (std::size_t j = 0; j < mm; ++j) ci[j] += aik * bk[j];
        }
    }
    if (counter) ++counter->products;
    return C;
}

/// C = A^T * B without forming the transpose.
inline DenseMatrix matmul_tn(const DenseMatrix& A, const DenseMatrix& B,
                             GemmCounter* counter = nullptr) {
    if (A.rows() != B.rows()) throw domain_error("matmul_tn: inner dimensions differ");
    DenseMatrix C(A.cols(), B.cols());
    const std::size_t kk = A.rows(), n = A.cols(), mm = B.cols();
    for (std::size_t k = 0; k < kk; ++k) {
        const double* ak = A.row(k);
        const double* bk = B.row(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = C.row(i);
            for (std::size_t j = 0; j < mm; ++j) ci[j] += aki * bk[j];
        }
    }
    if (counter) ++counter->products;
    return C;
}

/// C = A * B^T; rows of both operands are contiguous dots.
inline DenseMatrix matmul_nt(const DenseMatrix& A, const DenseMatrix& B,
                             GemmCounter* counter = nullptr) {
    if (A.cols() != B.cols()) throw domain_error("matmul_nt: inner dimensions differ");
    DenseMatrix C(A.rows(), B.rows());
    const std::size_t n = A.rows(), kk = A.cols(), mm = B.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (std::size_t j = 0; j < mm; ++j) {
            const double* bj = B.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < kk; ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
    if (counter) ++counter->products;
    return C;
}

/// Determinant sign of a square matrix via LU with partial pivoting.
/// Returns -1, 0 or +1.
inline int determinant_sign(DenseMatrix m) {
    if (!m.square()) throw domain_error("determinant_sign: matrix not square");
    const std::size_t n = m.rows();
    int sign = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        double best = std::fabs(m(c, c));
        for (std::size_t r = c + 1; r < n; ++r) {
            const double v = std::fabs(m(r, c));
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0) return 0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
            sign = -sign;
        }
        if (m(c, c) < 0.0) sign = -sign;
        const double inv = 1.0 / m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) * inv;
            if (f == 0.0) continue;
            for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return sign;
}

// ---------------------------------------------------------------------------
// Matrix text format: line 1 = "rows cols", then rows of space-separated
// decimal literals at full round-trip precision; '#' lines are comments.
// ---------------------------------------------------------------------------

inline DenseMatrix read_matrix(std::istream& in, const std::string& what = "matrix") {
    std::string line;
    auto next_data_line = [&](std::string& out) -> bool {
        while (std::getline(in, line)) {
            std::size_t p = line.find_first_not_of(" \t\r");
            if (p == std::string::npos) continue;
            if (line[p] == '#') continue;
            out = line;
            return true;
        }
        return false;
    };

    std::string header;
    if (!next_data_line(header)) throw io_error(what + ": empty input");
    std::istringstream hs(header);
    long long r = 0, c = 0;
    if (!(hs >> r >> c) || r <= 0 || c <= 0)
        throw io_error(what + ": bad header line, expected \"rows cols\"");

    DenseMatrix m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    std::size_t got = 0;
    const std::size_t need = m.rows() * m.cols();
    std::string data;
    while (got < need && next_data_line(data)) {
        std::istringstream ds(data);
        double v;
        while (got < need && (ds >> v)) m.data()[got++] = v;
    }
    if (got != need)
        throw io_error(what + ": expected " + std::to_string(need) + " entries, got " +
                       std::to_string(got));
    if (!m.all_finite()) throw io_error(what + ": non-finite entry");
    return m;
}

inline void write_matrix(std::ostream& out, const DenseMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << buf << (j + 1 == m.cols() ? '\n' : ' ');
        }
    }
}

inline DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    return read_matrix(in, path);
}

inline void write_matrix_file(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    write_matrix(out, m);
}

} // namespace skewexp
