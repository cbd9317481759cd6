#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "core_map.hpp"
#include "errors.hpp"
#include "schur_skew.hpp"
#include "skew_types.hpp"

namespace skewexp {

/// Distance query result: the distance, which subset realizes it, and a
/// constructed touching point B with ||A - B||_2 = dist, B in that subset.
struct LocusDistance {
    enum class Subset { pm, star, empty };
    double dist = std::numeric_limits<double>::infinity();
    Subset subset = Subset::empty;
    long l = 0;
    std::size_t i = 0; ///< 1-based block indices; i == j for star
    std::size_t j = 0;
    SkewMatrix touching_point;

    const char* subset_name() const {
        switch (subset) {
            case Subset::pm: return "pm";
            case Subset::star: return "star";
            default: return "empty";
        }
    }
};

namespace detail {

/// B = R D' R^T where D' applies the given per-block angle shifts.
inline SkewMatrix shifted_point(const SchurSkew& s, const std::vector<double>& new_theta) {
    SkewMatrix D = SkewMatrix::zero(s.n);
    for (std::size_t p = 0; p < s.m; ++p) D.set(2 * p + 1, 2 * p, new_theta[p]);
    const DenseMatrix& R = s.R.dense();
    return SkewMatrix(matmul(R, matmul_nt(D.dense(), R)));
}

} // namespace detail

/// dist(A, S_{l,pm}) = min_{i != j} |theta_i +- theta_j - 2 l pi| / 2, with the
/// touching point splitting the shift evenly across the two angles;
/// dist(A, S_{l,star}) = min_i min(|theta_i - 2 l pi|, |theta_i + 2 l pi|)
/// with a single-angle shift (odd n only).
inline LocusDistance dist_to_subset(const SchurSkew& s, long l, LocusDistance::Subset which) {
    if (l == 0) throw domain_error("dist_to_subset: l must be nonzero");
    const double target = 2.0 * M_PI * static_cast<double>(l);
    LocusDistance out;
    out.l = l;
    out.subset = which;

    if (which == LocusDistance::Subset::star) {
        if (s.n % 2 == 0) throw domain_error("dist_to_subset: star subset requires odd n");
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        double btarget = 0.0;
        for (std::size_t i = 0; i < s.m; ++i) {
            for (double sign : {1.0, -1.0}) {
                const double gap = std::fabs(s.theta[i] - sign * target);
                if (gap < best) {
                    best = gap;
                    bi = i;
                    btarget = sign * target;
                }
            }
        }
        out.dist = best;
        out.i = out.j = bi + 1;
        std::vector<double> nt = s.theta;
        nt[bi] = btarget;
        out.touching_point = detail::shifted_point(s, nt);
        return out;
    }

    if (which != LocusDistance::Subset::pm)
        throw domain_error("dist_to_subset: unknown subset");
    if (s.m < 2) throw domain_error("dist_to_subset: pm subset needs at least two blocks");

    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    bool best_sum = true;
    for (std::size_t j = 0; j < s.m; ++j) {
        for (std::size_t i = 0; i < s.m; ++i) {
            if (i == j) continue;
            const double gsum = 0.5 * std::fabs(s.theta[i] + s.theta[j] - target);
            if (gsum < best) {
                best = gsum;
                bi = i;
                bj = j;
                best_sum = true;
            }
            const double gdiff = 0.5 * std::fabs(s.theta[i] - s.theta[j] - target);
            if (gdiff < best) {
                best = gdiff;
                bi = i;
                bj = j;
                best_sum = false;
            }
        }
    }
    out.dist = best;
    out.i = bi + 1;
    out.j = bj + 1;
    std::vector<double> nt = s.theta;
    if (best_sum) {
        const double e = 0.5 * (s.theta[bi] + s.theta[bj] - target);
        nt[bi] -= e;
        nt[bj] -= e;
    } else {
        const double e = 0.5 * (s.theta[bi] - s.theta[bj] - target);
        nt[bi] -= e;
        nt[bj] += e;
    }
    out.touching_point = detail::shifted_point(s, nt);
    return out;
}

/// Distance to the whole tangent conjugate locus: minimum over the finite
/// l-range |l| <= ceil(max|theta|/pi) + 1 (sufficient since
/// |theta_i +- theta_j| <= 2 max|theta|), over pm and, when n is odd, star.
/// Empty locus for n = 2 (no pairs, even): +infinity.
inline LocusDistance dist_to_locus(const SchurSkew& s) {
    const bool odd = (s.n % 2 == 1);
    double amax = 0.0;
    for (double t : s.theta) amax = std::max(amax, std::fabs(t));
    const long lmax = static_cast<long>(std::ceil(amax / M_PI)) + 1;

    LocusDistance best;
    if (s.m >= 2) {
        for (long l = 1; l <= lmax; ++l) {
            for (long sl : {l, -l}) {
                LocusDistance d = dist_to_subset(s, sl, LocusDistance::Subset::pm);
                if (d.dist < best.dist) best = d;
            }
        }
    }
    if (odd && s.m >= 1) {
        for (long l = 1; l <= lmax; ++l) {
            LocusDistance d = dist_to_subset(s, l, LocusDistance::Subset::star);
            if (d.dist < best.dist) best = d;
        }
    }
    return best;
}

inline LocusDistance dist_to_locus(const SkewMatrix& A) { return dist_to_locus(schur_skew(A)); }

/// Membership in S_0, the connected component of the complement of the locus
/// containing 0: |theta_i +- theta_j| < 2 pi for all i != j, and additionally
/// |theta_i| < 2 pi when n is odd (so that S_0 stays inside S).
inline bool in_s0(const SchurSkew& s) {
    const double two_pi = 2.0 * M_PI;
    for (std::size_t j = 0; j < s.m; ++j)
        for (std::size_t i = j + 1; i < s.m; ++i) {
            if (std::fabs(s.theta[i] + s.theta[j]) >= two_pi) return false;
            if (std::fabs(s.theta[i] - s.theta[j]) >= two_pi) return false;
        }
    if (s.n % 2 == 1)
        for (std::size_t i = 0; i < s.m; ++i)
            if (std::fabs(s.theta[i]) >= two_pi) return false;
    return true;
}

/// B with exp(B) = exp(A) and ||A - B||_2 = 2|l|pi exactly: shift one block
/// angle by a full number of turns. Requires A off the locus.
inline SkewMatrix separated_preimage(const SchurSkew& s, std::size_t block_i, long l) {
    if (block_i < 1 || block_i > s.m)
        throw bounds_error("separated_preimage: block index out of range");
    if (l == 0) throw domain_error("separated_preimage: l must be nonzero");
    InvertibilityReport rep = dexp_invertible(s);
    if (!rep.invertible) {
        std::string msg = "separated_preimage: A lies on the tangent conjugate locus;";
        for (const auto& v : rep.violations) msg += " " + describe(v) + ";";
        throw not_invertible_error(msg, rep.violations);
    }
    std::vector<double> nt = s.theta;
    nt[block_i - 1] += 2.0 * M_PI * static_cast<double>(l);
    return detail::shifted_point(s, nt);
}

} // namespace skewexp
