#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "complex_matrix.hpp"
#include "dense_matrix.hpp"
#include "errors.hpp"
#include "jacobi.hpp"
#include "skew_types.hpp"

namespace skewexp {

/// Canonical real Schur form of A in Skew_n: A = R D R^T with
/// D_[i,i] = [[0, -theta_i], [theta_i, 0]], trailing 1x1 zero for odd n.
/// Angles ordered by descending |theta_i|; D is stored exactly block diagonal.
struct SchurSkew {
    std::size_t n = 0;
    std::size_t m = 0; ///< floor(n/2)
    std::size_t k = 0; ///< ceil(n/2)
    std::vector<double> theta;
    SkewMatrix D;
    SpecialOrthogonal R;
};

/// Canonical Schur form of Q in SO(n): Q = R E R^T with 2x2 rotation blocks
/// E_[i,i] = [[c_i, -s_i], [s_i, c_i]] and trailing 1 for odd n.
struct SchurSO {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<double> cos_v;
    std::vector<double> sin_v;
    DenseMatrix E;
    SpecialOrthogonal R;
};

namespace detail {

struct GivensCS {
    double c, s, r;
};

/// (c, s) with c*y + s*z = r >= |.|, -s*y + c*z = 0.
inline GivensCS givens(double y, double z) {
    if (z == 0.0) return {1.0, 0.0, y};
    const double r = std::hypot(y, z);
    return {y / r, z / r, r};
}

/// Householder reduction of skew-symmetric A to tridiagonal form: A = H T H^T.
/// Returns the subdiagonal e (T(i+1,i) = e_i) and the accumulated H.
inline void householder_skew_tridiag(const SkewMatrix& A, std::vector<double>& e,
                                     DenseMatrix& H) {
    const std::size_t n = A.n();
    DenseMatrix T = A.dense();
    H = DenseMatrix::identity(n);
    std::vector<double> v(n), w(n);

    for (std::size_t c = 0; c + 2 < n; ++c) {
        const std::size_t lo = c + 1;
        double sigma = 0.0;
        for (std::size_t r = lo + 1; r < n; ++r) sigma += T(r, c) * T(r, c);
        if (sigma == 0.0) continue;
        const double x0 = T(lo, c);
        const double mu = std::sqrt(x0 * x0 + sigma);
        double v0 = (x0 <= 0.0) ? x0 - mu : -sigma / (x0 + mu);
        const double beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
        v[lo] = 1.0;
        for (std::size_t r = lo + 1; r < n; ++r) v[r] = T(r, c) / v0;

        // T <- P T, P = I - beta v v^T acting on rows lo..n-1
        for (std::size_t j = 0; j < n; ++j) w[j] = 0.0;
        for (std::size_t r = lo; r < n; ++r) {
            const double vr = v[r];
            const double* tr = T.row(r);
            for (std::size_t j = 0; j < n; ++j) w[j] += vr * tr[j];
        }
        for (std::size_t r = lo; r < n; ++r) {
            const double f = beta * v[r];
            double* tr = T.row(r);
            for (std::size_t j = 0; j < n; ++j) tr[j] -= f * w[j];
        }
        // T <- T P on columns lo..n-1
        for (std::size_t r = 0; r < n; ++r) {
            double* tr = T.row(r);
            double s = 0.0;
            for (std::size_t j = lo; j < n; ++j) s += tr[j] * v[j];
            s *= beta;
            for (std::size_t j = lo; j < n; ++j) tr[j] -= s * v[j];
        }
        // H <- H P
        for (std::size_t r = 0; r < n; ++r) {
            double* hr = H.row(r);
            double s = 0.0;
            for (std::size_t j = lo; j < n; ++j) s += hr[j] * v[j];
            s *= beta;
            for (std::size_t j = lo; j < n; ++j) hr[j] -= s * v[j];
        }
    }

    e.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = 0.5 * (T(i + 1, i) - T(i, i + 1));
}

/// Implicit-shift Golub-Kahan SVD of the upper bidiagonal (d, f), accumulating
/// column rotations into V (on columns col0..col0+mm-1) and row rotations into
/// U. Sweep budget per the decomposition contract.
inline void bidiagonal_svd(std::vector<double>& d, std::vector<double>& f, DenseMatrix& U,
                           DenseMatrix& V, long budget) {
    const std::size_t mm = d.size();
    if (mm == 0) return;
    const double tol = std::numeric_limits<double>::epsilon();
    long steps = 0;

    auto rot_cols_V = [&](std::size_t p, std::size_t q, double c, double s) {
        for (std::size_t r = 0; r < V.rows(); ++r) {
            const double vp = V(r, p), vq = V(r, q);
            V(r, p) = c * vp + s * vq;
            V(r, q) = -s * vp + c * vq;
        }
    };
    auto rot_cols_U = [&](std::size_t p, std::size_t q, double c, double s) {
        for (std::size_t r = 0; r < U.rows(); ++r) {
            const double up = U(r, p), uq = U(r, q);
            U(r, p) = c * up + s * uq;
            U(r, q) = -s * up + c * uq;
        }
    };

    std::size_t hi = mm - 1;
    while (hi > 0) {
        for (std::size_t i = 0; i < hi; ++i)
            if (std::fabs(f[i]) <= tol * (std::fabs(d[i]) + std::fabs(d[i + 1]))) f[i] = 0.0;
        if (f[hi - 1] == 0.0) {
            --hi;
            continue;
        }
        std::size_t lo = hi - 1;
        while (lo > 0 && f[lo - 1] != 0.0) --lo;

        double blockmax = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) blockmax = std::max(blockmax, std::fabs(d[i]));
        for (std::size_t i = lo; i < hi; ++i) blockmax = std::max(blockmax, std::fabs(f[i]));

        // negligible diagonal at the bottom: rotate f[hi-1] up the last column
        if (std::fabs(d[hi]) <= tol * blockmax) {
            d[hi] = 0.0;
            double b = f[hi - 1];
            f[hi - 1] = 0.0;
            for (std::size_t jj = hi; jj-- > lo;) {
                // zero entry (jj, hi) = b against d[jj] via column rotation (jj, hi)
                GivensCS g = givens(d[jj], b);
                d[jj] = g.r;
                rot_cols_V(jj, hi, g.c, g.s);
                if (jj > lo) {
                    b = -g.s * f[jj - 1];
                    f[jj - 1] *= g.c;
                } else {
                    b = 0.0;
                }
            }
            continue;
        }

        // negligible interior diagonal: push its superdiagonal off to the right
        bool cancelled = false;
        for (std::size_t i = lo; i < hi; ++i) {
            if (std::fabs(d[i]) <= tol * blockmax) {
                d[i] = 0.0;
                double b = f[i];
                f[i] = 0.0;
                for (std::size_t j = i + 1; j <= hi; ++j) {
                    // zero entry (i, j) = b against d[j] via row rotation (i, j)
                    GivensCS g = givens(d[j], -b);
                    // row mix: new row_i = c*row_i + s*row_j with c=g.c, s chosen so
                    // c*b + s*d[j] = 0  ->  s = -b/d-ish; use (c,s) = (d[j], -b)/r
                    const double c = g.c, s = g.s;
                    d[j] = c * d[j] - s * b;
                    rot_cols_U(j, i, c, -s); // U columns track rows (j then i ordering)
                    if (j < hi) {
                        b = s * f[j];
                        f[j] = c * f[j];
                    }
                }
                cancelled = true;
                break;
            }
        }
        if (cancelled) continue;

        if (++steps > budget)
            throw convergence_error("bidiagonal_svd: no convergence in " +
                                    std::to_string(budget) + " implicit QR sweeps");

        // Wilkinson shift from the trailing 2x2 of B^T B
        const double dm = d[hi - 1], dn = d[hi], fm = f[hi - 1];
        const double fprev = (hi - 1 > lo) ? f[hi - 2] : 0.0;
        const double t11 = dm * dm + fprev * fprev;
        const double t12 = dm * fm;
        const double t22 = dn * dn + fm * fm;
        const double delta = 0.5 * (t11 - t22);
        double mu;
        if (t12 == 0.0) {
            mu = t22;
        } else {
            const double root = std::hypot(delta, t12);
            const double denom = delta + std::copysign(root, delta == 0.0 ? 1.0 : delta);
            mu = t22 - t12 * t12 / denom;
        }

        double y = d[lo] * d[lo] - mu;
        double z = d[lo] * f[lo];
        for (std::size_t kx = lo; kx < hi; ++kx) {
            GivensCS g = givens(y, z);
            if (kx > lo) f[kx - 1] = g.r;
            // column rotation (kx, kx+1)
            const double dk = d[kx], fk = f[kx], dk1 = d[kx + 1];
            d[kx] = g.c * dk + g.s * fk;
            f[kx] = -g.s * dk + g.c * fk;
            const double brow = g.s * dk1;
            d[kx + 1] = g.c * dk1;
            rot_cols_V(kx, kx + 1, g.c, g.s);

            // row rotation (kx, kx+1) zeroing brow against d[kx]
            GivensCS h = givens(d[kx], brow);
            d[kx] = h.r;
            const double fk2 = f[kx], dk2 = d[kx + 1];
            f[kx] = h.c * fk2 + h.s * dk2;
            d[kx + 1] = -h.s * fk2 + h.c * dk2;
            rot_cols_U(kx, kx + 1, h.c, h.s);
            if (kx + 1 < hi) {
                y = f[kx];
                z = h.s * f[kx + 1];
                f[kx + 1] *= h.c;
            }
        }
    }
}

} // namespace detail

/// Schur decomposition (Theta, D, R) of a skew-symmetric matrix.
/// Householder tridiagonalization, perfect shuffle to an upper bidiagonal,
/// implicit-shift SVD with accumulation, then reassembly. Deterministic for a
/// fixed input; angle signs are whatever the accumulation produces.
inline SchurSkew schur_skew(const SkewMatrix& A) {
    const std::size_t n = A.n();
    if (n == 0) throw domain_error("schur_skew: empty matrix");
    SchurSkew out;
    out.n = n;
    out.m = n / 2;
    out.k = (n + 1) / 2;

    if (n == 1) {
        out.D = SkewMatrix::zero(1);
        out.R = SpecialOrthogonal::identity(1);
        return out;
    }

    std::vector<double> e;
    DenseMatrix H;
    detail::householder_skew_tridiag(A, e, H);

    const std::size_t m = out.m, kk = out.k;
    std::vector<double> d(m), f;
    for (std::size_t q = 0; q < m; ++q) d[q] = e[2 * q];
    const bool odd = (n % 2 == 1);
    const std::size_t nf = odd ? m : (m > 0 ? m - 1 : 0);
    f.assign(nf, 0.0);
    for (std::size_t q = 0; q < nf; ++q) f[q] = -e[2 * q + 1];

    DenseMatrix U = DenseMatrix::identity(m);
    DenseMatrix V = DenseMatrix::identity(kk);

    if (odd && m > 0) {
        // chase the extra-column entry out of the wide bidiagonal
        double b = f[m - 1];
        f.resize(m > 0 ? m - 1 : 0);
        for (std::size_t q = m; q-- > 0;) {
            detail::GivensCS g = detail::givens(d[q], b);
            d[q] = g.r;
            for (std::size_t r = 0; r < kk; ++r) {
                const double vq = V(r, q), vm = V(r, m);
                V(r, q) = g.c * vq + g.s * vm;
                V(r, m) = -g.s * vq + g.c * vm;
            }
            if (q > 0) {
                b = -g.s * f[q - 1];
                f[q - 1] *= g.c;
            }
        }
    }

    detail::bidiagonal_svd(d, f, U, V, 30 * static_cast<long>(n));

    // nonnegative singular values (sign absorbed into U), sorted descending
    for (std::size_t p = 0; p < m; ++p) {
        if (d[p] < 0.0) {
            d[p] = -d[p];
            for (std::size_t r = 0; r < m; ++r) U(r, p) = -U(r, p);
        }
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });

    out.theta.resize(m);
    DenseMatrix Rloc(n, n);
    auto shuffled_pos = [&](std::size_t i) {
        return (i % 2 == 0) ? i / 2 : kk + (i - 1) / 2;
    };
    // Rloc = P * diag(V, U) * P^T with sorted columns
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t si = shuffled_pos(i);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t sj = shuffled_pos(j);
            double val = 0.0;
            if (si < kk && sj < kk) {
                const std::size_t cj = (sj < m) ? order[sj] : sj;
                val = V(si, cj);
            } else if (si >= kk && sj >= kk) {
                val = U(si - kk, order[sj - kk]);
            }
            Rloc(i, j) = val;
        }
    }
    for (std::size_t p = 0; p < m; ++p) out.theta[p] = d[order[p]];

    DenseMatrix R = matmul(H, Rloc);

    // zero-angle snap keeps D's trailing structure exact
    const double top = out.theta.empty() ? 0.0 : out.theta.front();
    for (double& t : out.theta)
        if (std::fabs(t) <= 1e-14 * top) t = 0.0;

    if (determinant_sign(R) < 0) {
        if (m == 0) {
            throw domain_error("schur_skew: inconsistent orientation"); // n == 1 handled above
        }
        // flip the last column: the zero direction for odd n, else the second
        // column of the smallest-|theta| block (flips that angle's sign)
        for (std::size_t r = 0; r < n; ++r) R(r, n - 1) = -R(r, n - 1);
        if (!odd) out.theta[m - 1] = -out.theta[m - 1];
    }

    SkewMatrix D = SkewMatrix::zero(n);
    for (std::size_t p = 0; p < m; ++p) D.set(2 * p + 1, 2 * p, out.theta[p]);
    out.D = std::move(D);
    out.R = SpecialOrthogonal::from_trusted(std::move(R));
    return out;
}

/// ||A||_2 = max_i |theta_i| for skew-symmetric A.
inline double spectral_norm_skew(const SkewMatrix& A, const SchurSkew& s) {
    if (s.n != A.n()) throw domain_error("spectral_norm_skew: dimension mismatch");
    double best = 0.0;
    for (double t : s.theta) best = std::max(best, std::fabs(t));
    return best;
}

inline double spectral_norm_skew(const SkewMatrix& A) {
    return spectral_norm_skew(A, schur_skew(A));
}

/// Assembles exp(D) blockwise: 2x2 rotations cos/sin(theta_i), trailing 1.
inline DenseMatrix rotation_blocks_from_angles(const std::vector<double>& theta, std::size_t n) {
    DenseMatrix E = DenseMatrix::identity(n);
    for (std::size_t p = 0; p < theta.size(); ++p) {
        const double c = std::cos(theta[p]), s = std::sin(theta[p]);
        E(2 * p, 2 * p) = c;
        E(2 * p, 2 * p + 1) = -s;
        E(2 * p + 1, 2 * p) = s;
        E(2 * p + 1, 2 * p + 1) = c;
    }
    return E;
}

/// One set of Schur vectors serving both A = R D R^T and exp(A) = R E R^T.
inline std::pair<SchurSkew, SchurSO> simultaneous_schur(const SkewMatrix& A) {
    SchurSkew s = schur_skew(A);
    SchurSO so;
    so.n = s.n;
    so.m = s.m;
    so.cos_v.resize(s.m);
    so.sin_v.resize(s.m);
    for (std::size_t p = 0; p < s.m; ++p) {
        so.cos_v[p] = std::cos(s.theta[p]);
        so.sin_v[p] = std::sin(s.theta[p]);
    }
    so.E = rotation_blocks_from_angles(s.theta, s.n);
    so.R = s.R;
    return {std::move(s), std::move(so)};
}

/// Complex eigendecomposition (Lambda, V = R U_n) built from the Schur form.
/// Per-block eigenvalue order (+theta_i*i, -theta_i*i) so that V Lambda V^H
/// reproduces A with U = (sqrt(2)/2) [[1, 1], [-i, i]].
struct EigFromSchur {
    std::vector<cplx> lambda;
    ComplexMatrix V;
};

inline EigFromSchur eig_from_schur(const SchurSkew& s) {
    const std::size_t n = s.n;
    EigFromSchur out;
    out.lambda.assign(n, cplx(0.0, 0.0));
    for (std::size_t p = 0; p < s.m; ++p) {
        out.lambda[2 * p] = cplx(0.0, s.theta[p]);
        out.lambda[2 * p + 1] = cplx(0.0, -s.theta[p]);
    }
    static const double rt = std::sqrt(2.0) / 2.0;
    out.V = ComplexMatrix(n, n);
    const DenseMatrix& R = s.R.dense();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t p = 0; p < s.m; ++p) {
            const double r1 = R(r, 2 * p), r2 = R(r, 2 * p + 1);
            out.V(r, 2 * p) = rt * cplx(r1, -r2);
            out.V(r, 2 * p + 1) = rt * cplx(r1, r2);
        }
        if (n % 2 == 1) out.V(r, n - 1) = R(r, n - 1);
    }
    return out;
}

/// Schur form of Q in SO(n). Decomposes the skew part, then repairs any
/// coupled slots (equal |sin| across distinct rotation blocks) with a small
/// symmetric eigensolve and re-pairing inside each coupled subspace.
inline SchurSO schur_so(const SpecialOrthogonal& Q) {
    const std::size_t n = Q.n();
    const DenseMatrix& Qd = Q.dense();
    SkewMatrix K(Qd); // constructor takes the skew part
    SchurSkew sk = schur_skew(K);
    DenseMatrix R = sk.R.dense();
    DenseMatrix E1 = matmul_tn(R, matmul(Qd, R));

    const std::size_t m = n / 2;
    const bool odd = (n % 2 == 1);
    const std::size_t slots = m + (odd ? 1 : 0);
    auto slot_cols = [&](std::size_t sl) -> std::pair<std::size_t, std::size_t> {
        if (sl < m) return {2 * sl, 2};
        return {n - 1, 1};
    };

    // union slots coupled by |sin| proximity or by measured off-block mass
    std::vector<std::size_t> parent(slots);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

    auto sin_of = [&](std::size_t sl) { return sl < m ? std::fabs(sk.theta[sl]) : 0.0; };
    const double sin_tol = 1e-6;
    const double couple_tol = 1e-11 * static_cast<double>(n);
    for (std::size_t a = 0; a < slots; ++a) {
        for (std::size_t b = a + 1; b < slots; ++b) {
            if (std::fabs(sin_of(a) - sin_of(b)) < sin_tol) {
                unite(a, b);
                continue;
            }
            auto [ca, wa] = slot_cols(a);
            auto [cb, wb] = slot_cols(b);
            double mass = 0.0;
            for (std::size_t r = 0; r < wa; ++r)
                for (std::size_t c = 0; c < wb; ++c) mass += std::fabs(E1(ca + r, cb + c));
            if (mass > couple_tol) unite(a, b);
        }
    }

    std::vector<std::vector<std::size_t>> groups(slots);
    for (std::size_t sl = 0; sl < slots; ++sl) groups[find(sl)].push_back(sl);

    for (const auto& grp : groups) {
        if (grp.size() <= 1) continue;
        std::vector<std::size_t> cols;
        for (std::size_t sl : grp) {
            auto [c0, w] = slot_cols(sl);
            for (std::size_t t = 0; t < w; ++t) cols.push_back(c0 + t);
        }
        const std::size_t g = cols.size();
        std::vector<double> sym(g * g);
        DenseMatrix skew_g(g, g);
        for (std::size_t r = 0; r < g; ++r)
            for (std::size_t c = 0; c < g; ++c) {
                const double x = E1(cols[r], cols[c]);
                const double y = E1(cols[c], cols[r]);
                sym[r * g + c] = 0.5 * (x + y);
                skew_g(r, c) = 0.5 * (x - y);
            }
        std::vector<double> lam, Z;
        jacobi_eigh(sym, g, lam, Z);

        // subgroup by cos value; within a subgroup the skew part fixes the pairing
        std::vector<DenseMatrix> basis_cols; // n x 1 columns in final order
        std::vector<std::vector<std::size_t>> sub;
        for (std::size_t i = 0; i < g; ++i) {
            if (sub.empty() || std::fabs(lam[sub.back().front()] - lam[i]) > 1e-6)
                sub.emplace_back();
            sub.back().push_back(i);
        }
        // keep the +1 subgroup (largest cos) last for odd n so the leftover
        // single direction lands at the trailing slot
        std::reverse(sub.begin(), sub.end());

        DenseMatrix newbasis(g, g); // columns are the repaired basis in sym coords
        std::size_t outcol = 0;
        for (const auto& sg : sub) {
            const std::size_t h = sg.size();
            DenseMatrix W(g, h);
            for (std::size_t r = 0; r < g; ++r)
                for (std::size_t c = 0; c < h; ++c) W(r, c) = Z[r * g + sg[c]];
            DenseMatrix Kg = matmul_tn(W, matmul(skew_g, W));
            SchurSkew pair = schur_skew(SkewMatrix(Kg));
            DenseMatrix Wp = matmul(W, pair.R.dense());
            for (std::size_t c = 0; c < h; ++c, ++outcol)
                for (std::size_t r = 0; r < g; ++r) newbasis(r, outcol) = Wp(r, c);
        }

        // write back: columns cols[] of R replaced by R[:, cols] * newbasis
        DenseMatrix Rsub(n, g);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < g; ++c) Rsub(r, c) = R(r, cols[c]);
        DenseMatrix Rnew = matmul(Rsub, newbasis);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < g; ++c) R(r, cols[c]) = Rnew(r, c);
    }

    DenseMatrix E2 = matmul_tn(R, matmul(Qd, R));

    SchurSO out;
    out.n = n;
    out.m = m;
    out.cos_v.resize(m);
    out.sin_v.resize(m);
    double block_resid = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        double c = 0.5 * (E2(2 * p, 2 * p) + E2(2 * p + 1, 2 * p + 1));
        double s = 0.5 * (E2(2 * p + 1, 2 * p) - E2(2 * p, 2 * p + 1));
        const double r = std::hypot(c, s);
        block_resid = std::max(block_resid, std::fabs(r - 1.0));
        c /= r;
        s /= r;
        out.cos_v[p] = c;
        out.sin_v[p] = s;
    }
    if (odd) block_resid = std::max(block_resid, std::fabs(E2(n - 1, n - 1) - 1.0));
    if (block_resid > 1e-8)
        throw domain_error("schur_so: diagonal blocks fail to form rotations (residual " +
                           std::to_string(block_resid) + ")");
    out.E = DenseMatrix::identity(n);
    for (std::size_t p = 0; p < m; ++p) {
        out.E(2 * p, 2 * p) = out.cos_v[p];
        out.E(2 * p, 2 * p + 1) = -out.sin_v[p];
        out.E(2 * p + 1, 2 * p) = out.sin_v[p];
        out.E(2 * p + 1, 2 * p + 1) = out.cos_v[p];
    }
    out.R = SpecialOrthogonal::from_trusted(std::move(R));
    return out;
}

} // namespace skewexp
