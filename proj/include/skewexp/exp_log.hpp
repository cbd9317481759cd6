#pragma once

#include <cmath>
#include <string>

#include "dense_matrix.hpp"
#include "errors.hpp"
#include "schur_skew.hpp"
#include "skew_types.hpp"

namespace skewexp {

struct ExpLogConfig {
    double principal_margin = 1e-9; ///< rejection margin for angles at +-pi
};

inline constexpr ExpLogConfig default_explog_config{};

/// exp on Skew_n via the Schur form: Q = R exp(D) R^T with exp(D) assembled
/// blockwise from cos/sin of the angles.
inline SpecialOrthogonal exp_skew(const SchurSkew& s, GemmCounter* counter = nullptr) {
    const DenseMatrix& R = s.R.dense();
    // R * exp(D) costs O(n^2): exp(D) is block diagonal, rotate column pairs directly
    DenseMatrix RE = R;
    for (std::size_t p = 0; p < s.m; ++p) {
        const double c = std::cos(s.theta[p]), sn = std::sin(s.theta[p]);
        for (std::size_t r = 0; r < s.n; ++r) {
            const double a = R(r, 2 * p), b = R(r, 2 * p + 1);
            RE(r, 2 * p) = a * c + b * sn;
            RE(r, 2 * p + 1) = -a * sn + b * c;
        }
    }
    return SpecialOrthogonal::from_trusted(matmul_nt(RE, R, counter));
}

inline SpecialOrthogonal exp_skew(const SkewMatrix& A) { return exp_skew(schur_skew(A)); }

/// Principal logarithm on SO(n): A = R D R^T with theta_i = atan2(s_i, c_i)
/// in (-pi, pi); rejects angles within principal_margin of the branch cut.
inline SkewMatrix log_so(const SchurSO& so, const ExpLogConfig& cfg = default_explog_config) {
    const std::size_t n = so.n;
    SkewMatrix D = SkewMatrix::zero(n);
    for (std::size_t p = 0; p < so.m; ++p) {
        const double ang = std::atan2(so.sin_v[p], so.cos_v[p]);
        if (M_PI - std::fabs(ang) < cfg.principal_margin)
            throw principal_branch_error("log_so: angle " + std::to_string(ang) +
                                         " within margin of the principal branch cut");
        D.set(2 * p + 1, 2 * p, ang);
    }
    const DenseMatrix& R = so.R.dense();
    return SkewMatrix(matmul(R, matmul_nt(D.dense(), R)));
}

inline SkewMatrix log_so(const SpecialOrthogonal& Q,
                         const ExpLogConfig& cfg = default_explog_config) {
    return log_so(schur_so(Q), cfg);
}

} // namespace skewexp
