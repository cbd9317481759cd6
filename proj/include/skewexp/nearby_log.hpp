#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "conjugate_locus.hpp"
#include "core_map.hpp"
#include "dense_matrix.hpp"
#include "errors.hpp"
#include "exp_log.hpp"
#include "schur_skew.hpp"
#include "skew_types.hpp"

namespace skewexp {

struct NearLogConfig {
    double residual_tol = 1e-12;  ///< on ||exp(B) - Q||_F / n^2
    int max_newton_iters = 50;
    double max_step = M_PI / 4.0; ///< spectral-norm cap between consecutive samples
    double min_dt = 1e-6;
    double initial_dt = 1.0 / 64.0;
    double crossing_tol = 1e-3;   ///< spectral distance that counts as "numerically crossing"
    int max_halvings = 20;        ///< damping budget per Newton iteration
};

inline constexpr NearLogConfig default_nearlog_config{};

namespace detail {

inline double exp_residual(const SpecialOrthogonal& E, const SpecialOrthogonal& Q) {
    const double nn = static_cast<double>(Q.n()) * static_cast<double>(Q.n());
    return frobenius_norm(E.dense() - Q.dense()) / nn;
}

} // namespace detail

/// Newton-type local inverse of exp around A0: solves exp(B) = Q for the
/// preimage near A0 via  S <- log_so(exp(B)^T Q),  B <- B + L_B^{-1}(S),
/// with residual-monotone damping. The update solves the first-order model
/// exp(B + X) ~ exp(B) exp(L_B(X)). Iterates are confined to B_pi(A0).
inline SkewMatrix nearby_log(const SkewMatrix& A0, const SpecialOrthogonal& Q,
                             const NearLogConfig& cfg = default_nearlog_config) {
    if (A0.n() != Q.n()) throw domain_error("nearby_log: dimension mismatch");
    const std::size_t n = A0.n();

    SkewMatrix B = A0;
    SchurSkew sB = schur_skew(B);
    SpecialOrthogonal EB = exp_skew(sB);
    double res = detail::exp_residual(EB, Q);

    for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
        if (res <= cfg.residual_tol) return B;

        {
            InvertibilityReport rep = dexp_invertible(sB);
            if (!rep.invertible) {
                LocusDistance d = dist_to_locus(sB);
                std::string msg = "nearby_log: iterate on the tangent conjugate locus "
                                  "(dist = " + std::to_string(d.dist) + ", subset " +
                                  d.subset_name() + ", l = " + std::to_string(d.l) + ")";
                throw not_invertible_error(msg, rep.violations);
            }
        }

        SkewMatrix S(DenseMatrix(n, n));
        try {
            SpecialOrthogonal resid =
                SpecialOrthogonal::from_trusted(matmul_tn(EB.dense(), Q.dense()));
            S = log_so(resid);
        } catch (const principal_branch_error& e) {
            throw step_too_large_error(std::string("nearby_log: residual rotation at the "
                                                   "principal branch cut: ") + e.what());
        }

        SkewMatrix X = l_map_inverse(sB, S);

        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            SkewMatrix Bc = B + lambda * X;
            const SkewMatrix diff = Bc - A0;
            bool in_ball = frobenius_norm(diff) < M_PI;
            if (!in_ball) in_ball = spectral_norm_skew(diff) < M_PI;
            if (!in_ball)
                throw out_of_domain_error("nearby_log: iterate left the ball B_pi(A0)");
            SchurSkew sC = schur_skew(Bc);
            SpecialOrthogonal EC = exp_skew(sC);
            const double rc = detail::exp_residual(EC, Q);
            if (rc < res) {
                B = std::move(Bc);
                sB = std::move(sC);
                EB = std::move(EC);
                res = rc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw convergence_error("nearby_log: residual stalled at " + std::to_string(res) +
                                    " after " + std::to_string(cfg.max_halvings) + " halvings");
    }
    throw convergence_error("nearby_log: no convergence in " +
                            std::to_string(cfg.max_newton_iters) + " iterations");
}

/// Q(t) for t in [0, 1]; must be callable repeatedly with any t.
using CurveOracle = std::function<SpecialOrthogonal(double)>;

struct TrackedSample {
    double t = 0.0;
    SkewMatrix A;
    double residual = 0.0;
    double dist_locus = 0.0;
    bool s0 = true;
    std::vector<double> theta; ///< raw Schur angles of A, descending |.|
};

struct TrackedPath {
    std::vector<TrackedSample> samples;
    std::vector<double> crossings; ///< t where dist_to_locus dipped below crossing_tol
};

/// Thrown when dt underflows min_dt; carries the partial path.
class tracking_stalled_error : public convergence_error {
public:
    tracking_stalled_error(const std::string& msg, TrackedPath partial)
        : convergence_error(msg), partial_(std::move(partial)) {}
    const TrackedPath& partial_path() const noexcept { return partial_; }

private:
    TrackedPath partial_;
};

namespace detail {

inline TrackedSample make_sample(double t, SkewMatrix A, const SpecialOrthogonal& Qt) {
    TrackedSample smp;
    smp.t = t;
    SchurSkew s = schur_skew(A);
    smp.residual = exp_residual(exp_skew(s), Qt);
    LocusDistance d = dist_to_locus(s);
    smp.dist_locus = d.dist;
    smp.s0 = in_s0(s);
    smp.theta = s.theta;
    smp.A = std::move(A);
    return smp;
}

} // namespace detail

/// Adaptive continuation of A(t) with exp(A(t)) = Q(t), seeded step by step
/// through nearby_log. Steps that fail (too large, stalled, or landing on the
/// locus) halve dt down to min_dt. Crossings of the locus are detected both by
/// direct proximity (dist < crossing_tol) and by an S_0 membership flip
/// between consecutive samples, which triggers bisection until a sample lands
/// inside crossing_tol.
inline TrackedPath track_curve(const CurveOracle& Q_of_t, const SkewMatrix& A_start,
                               const NearLogConfig& cfg = default_nearlog_config) {
    TrackedPath path;
    {
        SpecialOrthogonal Q0 = Q_of_t(0.0);
        TrackedSample first = detail::make_sample(0.0, A_start, Q0);
        if (first.residual > cfg.residual_tol)
            throw domain_error("track_curve: exp(A_start) does not match Q(0): residual " +
                               std::to_string(first.residual));
        if (first.dist_locus < cfg.crossing_tol) path.crossings.push_back(0.0);
        path.samples.push_back(std::move(first));
    }

    double t = 0.0;
    double dt = cfg.initial_dt;
    while (t < 1.0 - 1e-12) {
        const double tn = std::min(t + dt, 1.0);
        const TrackedSample& prev = path.samples.back();
        TrackedSample next;
        try {
            SpecialOrthogonal Qn = Q_of_t(tn);
            SkewMatrix B = nearby_log(prev.A, Qn, cfg);
            const SkewMatrix diff = B - prev.A;
            double move = frobenius_norm(diff);
            if (move > cfg.max_step) move = spectral_norm_skew(diff);
            if (move > cfg.max_step)
                throw step_too_large_error("track_curve: step of spectral size " +
                                           std::to_string(move) + " exceeds max_step");
            next = detail::make_sample(tn, std::move(B), Qn);
        } catch (const convergence_error&) {
            dt *= 0.5;
            if (dt < cfg.min_dt)
                throw tracking_stalled_error("track_curve: dt underflow at t = " +
                                             std::to_string(t), std::move(path));
            continue;
        } catch (const out_of_domain_error&) {
            dt *= 0.5;
            if (dt < cfg.min_dt)
                throw tracking_stalled_error("track_curve: dt underflow at t = " +
                                             std::to_string(t), std::move(path));
            continue;
        } catch (const not_invertible_error&) {
            dt *= 0.5;
            if (dt < cfg.min_dt)
                throw tracking_stalled_error("track_curve: dt underflow at t = " +
                                             std::to_string(t), std::move(path));
            continue;
        }

        if (next.dist_locus < cfg.crossing_tol) path.crossings.push_back(tn);

        if (next.s0 != prev.s0 && next.dist_locus >= cfg.crossing_tol &&
            prev.dist_locus >= cfg.crossing_tol) {
            // bracket the crossing until a sample lands within crossing_tol
            std::vector<TrackedSample> refined;
            TrackedSample lo = prev;
            TrackedSample hi = next;
            for (int depth = 0; depth < 60 && hi.t - lo.t > 1e-12; ++depth) {
                const double tm = 0.5 * (lo.t + hi.t);
                TrackedSample mid;
                try {
                    SpecialOrthogonal Qm = Q_of_t(tm);
                    SkewMatrix Bm = nearby_log(lo.A, Qm, cfg);
                    mid = detail::make_sample(tm, std::move(Bm), Qm);
                } catch (const error&) {
                    break; // refinement is best-effort; the flip itself is already known
                }
                refined.push_back(mid);
                if (mid.dist_locus < cfg.crossing_tol) {
                    path.crossings.push_back(tm);
                    break;
                }
                if (mid.s0 == lo.s0)
                    lo = std::move(mid);
                else
                    hi = std::move(mid);
            }
            std::sort(refined.begin(), refined.end(),
                      [](const TrackedSample& a, const TrackedSample& b) { return a.t < b.t; });
            for (auto& r : refined) path.samples.push_back(std::move(r));
        }

        path.samples.push_back(std::move(next));
        t = tn;
        dt = std::min(dt * 2.0, cfg.initial_dt);
    }
    return path;
}

/// Continuously assigned angle rows for plotting: each step matches the new
/// angle multiset to the previous row over permutations and sign flips,
/// minimizing the total move.
struct TrajectoryRow {
    double t;
    std::vector<double> theta;
    double dist_locus;
    double residual;
};

struct AngleTrajectory {
    std::size_t m = 0;
    std::vector<TrajectoryRow> rows;
};

inline AngleTrajectory angle_trajectory(const TrackedPath& path,
                                        const NearLogConfig& cfg = default_nearlog_config) {
    AngleTrajectory out;
    if (path.samples.empty()) return out;
    const std::size_t m = path.samples.front().theta.size();
    out.m = m;
    if (m > 8) throw domain_error("angle_trajectory: assignment search supports m <= 8");

    std::vector<double> prev = path.samples.front().theta;
    for (const TrackedSample& smp : path.samples) {
        const std::vector<double>& raw = smp.theta;
        std::vector<std::size_t> perm(m), best_perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        best_perm = perm;
        double best_cost = std::numeric_limits<double>::infinity();
        std::vector<int> best_signs(m, 1), signs(m, 1);
        do {
            double cost = 0.0;
            for (std::size_t p = 0; p < m; ++p) {
                const double plus = std::fabs(raw[perm[p]] - prev[p]);
                const double minus = std::fabs(-raw[perm[p]] - prev[p]);
                signs[p] = (minus < plus) ? -1 : 1;
                cost += std::min(plus, minus);
            }
            if (cost < best_cost) {
                best_cost = cost;
                best_perm = perm;
                best_signs = signs;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        TrajectoryRow row;
        row.t = smp.t;
        row.dist_locus = smp.dist_locus;
        row.residual = smp.residual;
        row.theta.resize(m);
        double worst = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
            row.theta[p] = best_signs[p] * raw[best_perm[p]];
            worst = std::max(worst, std::fabs(row.theta[p] - prev[p]));
        }
        if (&smp != &path.samples.front() && worst > cfg.max_step)
            throw domain_error("angle_trajectory: ambiguous assignment, best match moves " +
                               std::to_string(worst) + " > max_step");
        prev = row.theta;
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Header "t,theta_1,...,theta_m,dist_to_locus,residual".
inline void write_trajectory_csv(std::ostream& os, const AngleTrajectory& traj) {
    os << "t";
    for (std::size_t p = 1; p <= traj.m; ++p) os << ",theta_" << p;
    os << ",dist_to_locus,residual\n";
    char buf[40];
    for (const TrajectoryRow& r : traj.rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.t);
        os << buf;
        for (double th : r.theta) {
            std::snprintf(buf, sizeof buf, "%.17g", th);
            os << ',' << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g", r.dist_locus);
        os << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.17g", r.residual);
        os << ',' << buf << '\n';
    }
}

/// Closed-form curve Q * exp(t Y); exp(tY) reuses Y's Schur vectors.
inline CurveOracle subgroup_curve(const SpecialOrthogonal& Q, const SkewMatrix& Y) {
    if (Q.n() != Y.n()) throw domain_error("subgroup_curve: dimension mismatch");
    auto sY = std::make_shared<SchurSkew>(schur_skew(Y));
    DenseMatrix Qd = Q.dense();
    return [sY, Qd](double t) {
        SchurSkew st = *sY;
        for (double& th : st.theta) th *= t;
        SpecialOrthogonal Et = exp_skew(st);
        return SpecialOrthogonal::from_trusted(matmul(Qd, Et.dense()));
    };
}

/// Piecewise-geodesic interpolation through samples (t_i, Q_i):
/// Q(t) = Q_i exp(s * log(Q_i^T Q_{i+1})) on each segment.
inline CurveOracle sampled_curve(std::vector<std::pair<double, SpecialOrthogonal>> samples) {
    if (samples.size() < 2) throw domain_error("sampled_curve: need at least two samples");
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto segs = std::make_shared<std::vector<std::pair<double, SpecialOrthogonal>>>(samples);
    auto logs = std::make_shared<std::vector<SkewMatrix>>();
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        DenseMatrix rel = matmul_tn(samples[i].second.dense(), samples[i + 1].second.dense());
        logs->push_back(log_so(SpecialOrthogonal::from_trusted(std::move(rel))));
    }
    return [segs, logs](double t) {
        const auto& s = *segs;
        std::size_t i = 0;
        while (i + 2 < s.size() && t > s[i + 1].first) ++i;
        const double t0 = s[i].first, t1 = s[i + 1].first;
        const double frac = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
        SkewMatrix step = (*logs)[i] * frac;
        SpecialOrthogonal E = exp_skew(step);
        return SpecialOrthogonal::from_trusted(matmul(s[i].second.dense(), E.dense()));
    };
}

} // namespace skewexp
