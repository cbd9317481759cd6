#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dense_matrix.hpp"
#include "errors.hpp"
#include "exp_log.hpp"
#include "schur_skew.hpp"
#include "skew_types.hpp"
#include "trig_kernels.hpp"

namespace skewexp {

/// 4x4 kernel acting on column-major vec of a 2x2 block. Under the change of
/// basis z1 = (v11+v22) + (v21-v12) i, z2 = (v11-v22) + (v21+v12) i this is
/// complex multiplication by (a+bi) on z1 and (c+di) on z2, which is where the
/// inversion formula and the singularity condition come from.
struct KernelX {
    double a, b, c, d;
    std::array<double, 16> matrix;

    KernelX(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
        matrix = {0.5 * (a + c), 0.5 * (-b - d), 0.5 * (b - d),  0.5 * (a - c),
                  0.5 * (b + d), 0.5 * (a + c),  0.5 * (-a + c), 0.5 * (b - d),
                  0.5 * (-b + d), 0.5 * (-a + c), 0.5 * (a + c), 0.5 * (-b - d),
                  0.5 * (a - c), 0.5 * (-b + d), 0.5 * (b + d),  0.5 * (a + c)};
    }

    std::array<double, 4> apply(const std::array<double, 4>& v) const {
        std::array<double, 4> out{};
        for (int r = 0; r < 4; ++r)
            out[r] = matrix[4 * r] * v[0] + matrix[4 * r + 1] * v[1] + matrix[4 * r + 2] * v[2] +
                     matrix[4 * r + 3] * v[3];
        return out;
    }
};

/// 2x2 kernel [[r, s], [-s, r]], complex multiplication by (r - si).
struct KernelY {
    double r, s;
    std::array<double, 4> matrix;

    KernelY(double r_, double s_) : r(r_), s(s_), matrix{r_, s_, -s_, r_} {}

    std::array<double, 2> apply(const std::array<double, 2>& v) const {
        return {r * v[0] + s * v[1], -s * v[0] + r * v[1]};
    }
};

inline KernelX kernel_x(double a, double b, double c, double d) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
        throw domain_error("kernel_x: non-finite parameter");
    return KernelX(a, b, c, d);
}

inline KernelY kernel_y(double r, double s) {
    if (!std::isfinite(r) || !std::isfinite(s))
        throw domain_error("kernel_y: non-finite parameter");
    return KernelY(r, s);
}

/// Inverse kernel parameters: complex reciprocals pairwise. Fails when a
/// parameter pair vanishes, which is exactly the rank-deficiency condition.
inline KernelX invert_kernel_x(const KernelX& k, double singular_tol = 0.0) {
    const double n1 = k.a * k.a + k.b * k.b;
    const double n2 = k.c * k.c + k.d * k.d;
    if (n1 <= singular_tol * singular_tol)
        throw singular_kernel_error("invert_kernel_x: pair (a, b) vanishes");
    if (n2 <= singular_tol * singular_tol)
        throw singular_kernel_error("invert_kernel_x: pair (c, d) vanishes");
    return KernelX(k.a / n1, -k.b / n1, k.c / n2, -k.d / n2);
}

inline KernelY invert_kernel_y(const KernelY& k, double singular_tol = 0.0) {
    const double n1 = k.r * k.r + k.s * k.s;
    if (n1 <= singular_tol * singular_tol)
        throw singular_kernel_error("invert_kernel_y: pair (r, s) vanishes");
    return KernelY(k.r / n1, -k.s / n1);
}

/// Invertibility of the core map / dexp at the given angles (the tangent
/// conjugate locus condition): theta_i +- theta_j != 2*l*pi for j < i <= m and
/// every nonzero integer l, plus theta_j != 2*l*pi for odd n. The i = j case
/// is deliberately not tested; that is the relaxation specific to the skew
/// restriction.
struct InvertibilityReport {
    bool invertible = true;
    std::vector<angle_violation> violations;
};

inline double default_angle_tol(const std::vector<double>& theta) {
    double amax = 0.0;
    for (double t : theta) amax = std::max(amax, std::fabs(t));
    return 1e-10 * std::max(1.0, amax);
}

inline InvertibilityReport dexp_invertible(const std::vector<double>& theta, std::size_t n,
                                           double angle_tol = -1.0) {
    if (angle_tol < 0.0) angle_tol = default_angle_tol(theta);
    InvertibilityReport rep;
    const std::size_t m = n / 2;
    const double two_pi = 2.0 * M_PI;
    auto check = [&](double z, angle_violation::kind kind, std::size_t i, std::size_t j) {
        const long l = std::lround(z / two_pi);
        if (l != 0 && std::fabs(z - static_cast<double>(l) * two_pi) <= angle_tol) {
            rep.invertible = false;
            rep.violations.push_back({kind, i, j, l});
        }
    };
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = j + 1; i < m; ++i) {
            check(theta[i] + theta[j], angle_violation::kind::sum, i + 1, j + 1);
            check(theta[i] - theta[j], angle_violation::kind::diff, i + 1, j + 1);
        }
    }
    if (n % 2 == 1) {
        for (std::size_t j = 0; j < m; ++j)
            check(theta[j], angle_violation::kind::star, j + 1, j + 1);
    }
    return rep;
}

inline InvertibilityReport dexp_invertible(const SchurSkew& s, double angle_tol = -1.0) {
    return dexp_invertible(s.theta, s.n, angle_tol);
}

/// Precomputed forward kernels for all strict lower block pairs (and the
/// left-over row for odd n): Algorithm 1's preprocessing stage.
class CoreMapCache {
public:
    explicit CoreMapCache(const std::vector<double>& theta, std::size_t n) : n_(n), m_(n / 2) {
        xs_.reserve(m_ * (m_ > 0 ? m_ - 1 : 0) / 2);
        for (std::size_t j = 0; j < m_; ++j)
            for (std::size_t i = j + 1; i < m_; ++i) {
                const double diff = theta[i] - theta[j];
                const double sum = theta[i] + theta[j];
                xs_.emplace_back(sinc(diff), cosc(diff), sinc(sum), cosc(sum));
            }
        if (n_ % 2 == 1)
            for (std::size_t j = 0; j < m_; ++j)
                ys_.emplace_back(sinc(theta[j]), -cosc(theta[j]));
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }
    const KernelX& x_kernel(std::size_t i, std::size_t j) const { return xs_[pair_index(i, j)]; }
    const KernelY& y_kernel(std::size_t j) const { return ys_[j]; }

protected:
    CoreMapCache(std::size_t n) : n_(n), m_(n / 2) {}

    // strict lower pairs (i, j), j < i < m, laid out j-major
    std::size_t pair_index(std::size_t i, std::size_t j) const {
        return j * m_ - j * (j + 1) / 2 + (i - j - 1);
    }

    std::size_t n_;
    std::size_t m_;
    std::vector<KernelX> xs_;
    std::vector<KernelY> ys_;
};

/// Inverse kernels with the cotc parameterization (Algorithm 2's
/// preprocessing), plus the rank-deficiency report. Construction never throws
/// for near-singular angles; callers consult the report (or pass force).
class InverseCoreMapCache : public CoreMapCache {
public:
    InverseCoreMapCache(const std::vector<double>& theta, std::size_t n, double angle_tol = -1.0)
        : CoreMapCache(n) {
        report_ = dexp_invertible(theta, n, angle_tol);
        // rank deficiency is reported, not thrown, during construction; sin of a
        // double is never exactly zero away from zero, so this stays finite
        auto cotc_unchecked = [](double x) {
            if (std::fabs(x) < default_trig_config.taylor_threshold) {
                const double x2 = x * x;
                return 1.0 - x2 / 3.0 - (x2 * x2) / 45.0;
            }
            return x * (std::cos(x) / std::sin(x));
        };
        for (std::size_t j = 0; j < m_; ++j)
            for (std::size_t i = j + 1; i < m_; ++i) {
                const double hd = 0.5 * (theta[i] - theta[j]);
                const double hs = 0.5 * (theta[i] + theta[j]);
                xs_.emplace_back(cotc_unchecked(hd), hd, cotc_unchecked(hs), hs);
            }
        if (n_ % 2 == 1)
            for (std::size_t j = 0; j < m_; ++j) {
                const double h = 0.5 * theta[j];
                ys_.emplace_back(cotc_unchecked(h), -h);
            }
    }

    const InvertibilityReport& report() const noexcept { return report_; }

private:
    InvertibilityReport report_;
};

namespace detail {

template <typename Cache>
SkewMatrix core_apply(const Cache& cache, const SkewMatrix& M) {
    const std::size_t n = cache.n(), m = cache.m();
    if (M.n() != n) throw domain_error("core_map: dimension mismatch");
    const DenseMatrix& Md = M.dense();
    DenseMatrix Nd(n, n);

    for (std::size_t j = 0; j < m; ++j) {
        // diagonal blocks are fixed points
        Nd(2 * j, 2 * j + 1) = Md(2 * j, 2 * j + 1);
        Nd(2 * j + 1, 2 * j) = Md(2 * j + 1, 2 * j);
        for (std::size_t i = j + 1; i < m; ++i) {
            const KernelX& K = cache.x_kernel(i, j);
            const std::array<double, 4> v = {Md(2 * i, 2 * j), Md(2 * i + 1, 2 * j),
                                             Md(2 * i, 2 * j + 1), Md(2 * i + 1, 2 * j + 1)};
            const std::array<double, 4> w = K.apply(v);
            Nd(2 * i, 2 * j) = w[0];
            Nd(2 * i + 1, 2 * j) = w[1];
            Nd(2 * i, 2 * j + 1) = w[2];
            Nd(2 * i + 1, 2 * j + 1) = w[3];
            // upper counterpart: N_[j,i] = -N_[i,j]^T
            Nd(2 * j, 2 * i) = -w[0];
            Nd(2 * j, 2 * i + 1) = -w[1];
            Nd(2 * j + 1, 2 * i) = -w[2];
            Nd(2 * j + 1, 2 * i + 1) = -w[3];
        }
        if (n % 2 == 1) {
            const KernelY& K = cache.y_kernel(j);
            const std::array<double, 2> v = {Md(n - 1, 2 * j), Md(n - 1, 2 * j + 1)};
            const std::array<double, 2> w = K.apply(v);
            Nd(n - 1, 2 * j) = w[0];
            Nd(n - 1, 2 * j + 1) = w[1];
            Nd(2 * j, n - 1) = -w[0];
            Nd(2 * j + 1, n - 1) = -w[1];
        }
    }
    // output is skew by construction; the constructor's repair is a no-op
    return SkewMatrix(std::move(Nd));
}

} // namespace detail

/// Blockwise core map: identity on diagonal blocks, kernel action on the
/// strict lower blocks, upper blocks by skew symmetry.
inline SkewMatrix core_map(const CoreMapCache& cache, const SkewMatrix& M) {
    return detail::core_apply(cache, M);
}

/// Blockwise inverse action. Refuses a rank-deficient cache unless forced.
inline SkewMatrix core_map_inverse(const InverseCoreMapCache& cache, const SkewMatrix& N,
                                   bool force = false) {
    if (!cache.report().invertible && !force) {
        std::string msg = "core_map_inverse: not invertible;";
        for (const auto& v : cache.report().violations) msg += " " + describe(v) + ";";
        throw not_invertible_error(msg, cache.report().violations);
    }
    return detail::core_apply(cache, N);
}

/// Algorithm 1 preprocessing bundled with the Schur data it came from.
struct LmapPlan {
    SchurSkew schur;
    CoreMapCache cache;

    explicit LmapPlan(SchurSkew s) : schur(std::move(s)), cache(schur.theta, schur.n) {}
};

/// Algorithm 2 preprocessing.
struct LmapInversePlan {
    SchurSkew schur;
    InverseCoreMapCache cache;

    explicit LmapInversePlan(SchurSkew s, double angle_tol = -1.0)
        : schur(std::move(s)), cache(schur.theta, schur.n, angle_tol) {}
};

/// Algorithm 1 computing stage: Y = R C_Theta(R^T X R) R^T.
/// Exactly four full n x n products when a counter is attached.
inline SkewMatrix l_map(const LmapPlan& plan, const SkewMatrix& X,
                        GemmCounter* counter = nullptr) {
    const SchurSkew& s = plan.schur;
    if (X.n() != s.n) throw domain_error("l_map: dimension mismatch");
    const DenseMatrix& R = s.R.dense();
    DenseMatrix M = matmul_tn(R, matmul(X.dense(), R, counter), counter);
    SkewMatrix N = core_map(plan.cache, SkewMatrix(std::move(M)));
    return SkewMatrix(matmul(R, matmul_nt(N.dense(), R, counter), counter));
}

inline SkewMatrix l_map(const SchurSkew& s, const SkewMatrix& X,
                        GemmCounter* counter = nullptr) {
    return l_map(LmapPlan(s), X, counter);
}

/// Algorithm 2 computing stage: X = R C_Theta^{-1}(R^T Y R) R^T.
inline SkewMatrix l_map_inverse(const LmapInversePlan& plan, const SkewMatrix& Y,
                                GemmCounter* counter = nullptr, bool force = false) {
    const SchurSkew& s = plan.schur;
    if (Y.n() != s.n) throw domain_error("l_map_inverse: dimension mismatch");
    const DenseMatrix& R = s.R.dense();
    DenseMatrix M = matmul_tn(R, matmul(Y.dense(), R, counter), counter);
    SkewMatrix N = core_map_inverse(plan.cache, SkewMatrix(std::move(M)), force);
    return SkewMatrix(matmul(R, matmul_nt(N.dense(), R, counter), counter));
}

inline SkewMatrix l_map_inverse(const SchurSkew& s, const SkewMatrix& Y,
                                GemmCounter* counter = nullptr, bool force = false) {
    return l_map_inverse(LmapInversePlan(s), Y, counter, force);
}

/// Full differentiation: dexp_A[X] = Q * L_A(X) with Q = exp(A) sharing A's
/// Schur vectors.
struct DexpResult {
    SpecialOrthogonal Q;
    SkewMatrix Y;

    DenseMatrix tangent(GemmCounter* counter = nullptr) const {
        return matmul(Q.dense(), Y.dense(), counter);
    }
};

inline DexpResult dexp(const SchurSkew& s, const SkewMatrix& X, GemmCounter* counter = nullptr) {
    DexpResult out{exp_skew(s, counter), l_map(s, X, counter)};
    return out;
}

inline DexpResult dexp(const SkewMatrix& A, const SkewMatrix& X,
                       GemmCounter* counter = nullptr) {
    return dexp(schur_skew(A), X, counter);
}

} // namespace skewexp
