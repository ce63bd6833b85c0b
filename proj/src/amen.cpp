#include "fsqtt/amen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "fsqtt/kernels.hpp"
#include "linalg.hpp"
#include "tt_internal.hpp"

namespace fsqtt {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Ei = Eigen::Index;

double residual_at(const TTMatrix& a, const TTVector& x, const TTVector& b, double tol) {
    if (a.row_sizes() != b.modes() || a.col_sizes() != x.modes())
        throw DimensionError("residual: operator, solution and right-hand side do not conform");
    const TTVector ax = matvec_round(a, x, tol);
    const double nb = norm(b);
    const double nr = norm(axpby(1.0, ax, -1.0, b));
    return nb > 0.0 ? nr / nb : nr;
}

struct LocalSolve {
    VectorXd sol;
    bool fallback = false;
};

LocalSolve solve_local(const MatrixXd& m, const VectorXd& rhs, double cutoff) {
    LocalSolve out;
    Eigen::PartialPivLU<MatrixXd> lu(m);
    if (lu.rcond() > cutoff) {
        out.sol = lu.solve(rhs);
        if (out.sol.allFinite()) return out;
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
    cod.setThreshold(cutoff);
    cod.compute(m);
    out.sol = cod.solve(rhs);
    out.fallback = true;
    return out;
}

// rhs(a, i, c) = sum Lb(a, p) b(p, i, q) Rb(c, q)
VectorXd project_rhs(const MatrixXd& lb, const Core& b, const MatrixXd& rb) {
    const MatrixXd t = lb * b.right_unfolding();  // rl x (n rb)
    Eigen::Map<const MatrixXd> t2(t.data(), t.rows() * Ei(b.mode), Ei(b.right));
    MatrixXd out = t2 * rb.transpose();
    return Eigen::Map<const VectorXd>(out.data(), out.size());
}

Core as_core(const VectorXd& v, Index l, Index n, Index r) {
    Core c(l, n, r);
    std::copy(v.data(), v.data() + v.size(), c.data.begin());
    return c;
}

double rel(double num, double den) { return den > 0.0 ? num / den : num; }

}  // namespace

void LinSolveConfig::validate() const {
    if (!(tol.value() > 0.0)) throw std::invalid_argument("amen: tolerance must be positive");
    if (max_sweeps < 1) throw std::invalid_argument("amen: max_sweeps must be >= 1");
    if (enrichment_rank < 1) throw std::invalid_argument("amen: enrichment_rank must be >= 1");
    if (rmax < 1) throw std::invalid_argument("amen: rmax must be >= 1");
}

double residual(const TTMatrix& a, const TTVector& x, const TTVector& b) { return residual_at(a, x, b, 1e-14); }

LinSolveResult amen_solve(const TTMatrix& a, const TTVector& b, const LinSolveConfig& cfg,
                          const std::optional<TTVector>& x0) {
    cfg.validate();
    const Index d = a.dim();
    if (a.row_sizes() != a.col_sizes()) throw DimensionError("amen: operator must be square per core");
    if (a.row_sizes() != b.modes()) throw DimensionError("amen: right-hand side does not match the operator");
    if (x0 && x0->modes() != b.modes()) throw DimensionError("amen: initial guess does not match the operator");
    const std::vector<Index> modes = b.modes();
    const double tol = cfg.tol.value();
    const double res_tol = tol / 10.0;

    LinSolveResult result;
    LinSolveReport& rep = result.report;

    if (norm(b) == 0.0) {
        result.x = zeros(modes);
        rep.converged = true;
        rep.final_residual = 0.0;
        return result;
    }

    if (d == 1) {
        const MatrixXd m = to_dense(a);
        const std::vector<double> bf = to_full(b);
        const VectorXd rhs = Eigen::Map<const VectorXd>(bf.data(), Ei(bf.size()));
        const LocalSolve s = solve_local(m, rhs, cfg.pinv_cutoff);
        result.x = TTVector({as_core(s.sol, 1, modes[0], 1)});
        rep.sweeps_used = 1;
        rep.final_residual = residual(a, result.x, b);
        rep.converged = rep.final_residual <= tol;
        return result;
    }

    std::vector<Core> x = x0 ? x0->cores() : detail::gaussian_cores(modes, 1, cfg.seed);
    std::vector<Core> z = detail::gaussian_cores(modes, cfg.enrichment_rank, cfg.seed + 1);
    for (Index k = d - 1; k >= 1; --k) {
        detail::right_orthogonalize(x, k);
        detail::right_orthogonalize(z, k);
    }

    // Interfaces at bond k (k = 0..d).  Left ones cover cores 0..k-1, right
    // ones cores k..d-1.
    std::vector<Interface> phi_l(d + 1), phi_r(d + 1), zphi_l(d + 1), zphi_r(d + 1);
    std::vector<MatrixXd> pb_l(d + 1, MatrixXd::Ones(1, 1)), pb_r(d + 1, MatrixXd::Ones(1, 1));
    std::vector<MatrixXd> zb_l(d + 1, MatrixXd::Ones(1, 1)), zb_r(d + 1, MatrixXd::Ones(1, 1));

    auto update_right = [&](Index k) {
        phi_r[k] = kernels::right_step(phi_r[k + 1], x[k], a.core(k), modes[k], x[k]);
        zphi_r[k] = kernels::right_step(zphi_r[k + 1], z[k], a.core(k), modes[k], x[k]);
        pb_r[k] = kernels::right_step(pb_r[k + 1], x[k], b.core(k));
        zb_r[k] = kernels::right_step(zb_r[k + 1], z[k], b.core(k));
    };
    auto update_left = [&](Index k) {
        phi_l[k + 1] = kernels::left_step(phi_l[k], x[k], a.core(k), modes[k], x[k]);
        zphi_l[k + 1] = kernels::left_step(zphi_l[k], z[k], a.core(k), modes[k], x[k]);
        pb_l[k + 1] = kernels::left_step(pb_l[k], x[k], b.core(k));
        zb_l[k + 1] = kernels::left_step(zb_l[k], z[k], b.core(k));
    };
    for (Index k = d - 1; k >= 1; --k) update_right(k);

    double tol_local = tol;
    double best_res = std::numeric_limits<double>::infinity();
    std::vector<Core> best_x = x;
    double prev_sweep_res = std::numeric_limits<double>::infinity();
    int growth = 0;
    double global_res = std::numeric_limits<double>::infinity();

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double max_res = 0.0;
        for (Index k = 0; k < d; ++k) {
            const Index n = modes[k];
            const Index rl = x[k].left, rr = x[k].right;
            const MatrixXd bloc = kernels::local_operator_parallel(phi_l[k], a.core(k), n, phi_r[k + 1]);
            const VectorXd rhs = project_rhs(pb_l[k], b.core(k), pb_r[k + 1]);
            const double rhs_norm = rhs.norm();
            const Eigen::Map<const VectorXd> xk(x[k].data.data(), Ei(x[k].size()));
            const double res_prev = rel((bloc * xk - rhs).norm(), rhs_norm);
            max_res = std::max(max_res, res_prev);

            const LocalSolve ls = solve_local(bloc, rhs, cfg.pinv_cutoff);
            const double res_new = rel((bloc * ls.sol - rhs).norm(), rhs_norm);

            if (k + 1 == d) {
                x[k] = as_core(ls.sol, rl, n, rr);
                const Core ax_zz = kernels::local_apply(zphi_l[k], a.core(k), n, x[k], zphi_r[k + 1]);
                const VectorXd b_zz = project_rhs(zb_l[k], b.core(k), zb_r[k + 1]);
                Core zc(z[k].left, n, 1);
                zc.left_unfolding() = ax_zz.left_unfolding() -
                                      Eigen::Map<const MatrixXd>(b_zz.data(), Ei(z[k].left * n), 1);
                const double zn = zc.left_unfolding().norm();
                if (zn > 0.0) zc.left_unfolding() /= zn;
                z[k] = std::move(zc);
                break;
            }

            // Smallest rank whose truncated local solution keeps the local
            // residual below the threshold.
            Eigen::Map<const MatrixXd> sm(ls.sol.data(), Ei(rl * n), Ei(rr));
            const detail::ThinSVD svd = detail::thin_svd(sm);
            const VectorXd& s = svd.s;
            const double thr = std::max(tol_local, 2.0 * res_new);
            auto trunc_res = [&](Ei r) {
                const MatrixXd approx = svd.u.leftCols(r) * s.head(r).asDiagonal() *
                                        svd.v.leftCols(r).transpose();
                const Eigen::Map<const VectorXd> av(approx.data(), approx.size());
                return rel((bloc * av - rhs).norm(), rhs_norm);
            };
            Ei hi = std::min<Ei>(s.size(), Ei(cfg.rmax));
            Ei lo = 1;
            if (hi < s.size() && trunc_res(hi) > thr) rep.rank_capped = true;
            while (lo < hi) {
                const Ei mid = (lo + hi) / 2;
                if (trunc_res(mid) <= thr)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            const Ei r = lo;
            MatrixXd u = svd.u.leftCols(r);
            MatrixXd v = s.head(r).asDiagonal() * svd.v.leftCols(r).transpose();  // r x rr

            Core xt(rl, n, rr);
            xt.left_unfolding() = u * v;

            // Residual projections for the enrichment (x on the left, z on the
            // right) and the new z core (z on both sides).
            const Core ax_xz = kernels::local_apply(phi_l[k], a.core(k), n, xt, zphi_r[k + 1]);
            const VectorXd b_xz = project_rhs(pb_l[k], b.core(k), zb_r[k + 1]);
            MatrixXd enrich = ax_xz.left_unfolding();
            enrich -= Eigen::Map<const MatrixXd>(b_xz.data(), Ei(rl * n), Ei(z[k].right));

            const Core ax_zz = kernels::local_apply(zphi_l[k], a.core(k), n, xt, zphi_r[k + 1]);
            const VectorXd b_zz = project_rhs(zb_l[k], b.core(k), zb_r[k + 1]);
            MatrixXd zres = ax_zz.left_unfolding();
            zres -= Eigen::Map<const MatrixXd>(b_zz.data(), Ei(z[k].left * n), Ei(z[k].right));
            {
                detail::ThinQR zq = detail::thin_qr(zres);
                const Index rz = std::min<Index>(Index(zq.q.cols()), cfg.enrichment_rank);
                Core zc(z[k].left, n, rz);
                zc.left_unfolding() = zq.q.leftCols(Ei(rz));
                z[k] = std::move(zc);
            }

            Ei extra = enrich.cols();
            if (Index(r + extra) > cfg.rmax) extra = std::max<Ei>(0, Ei(cfg.rmax) - r);
            MatrixXd aug(Ei(rl * n), r + extra);
            aug.leftCols(r) = u;
            aug.rightCols(extra) = enrich.leftCols(extra);
            detail::ThinQR qr = detail::thin_qr(aug);
            const Index rnew = Index(qr.q.cols());
            MatrixXd coef = MatrixXd::Zero(r + extra, Ei(rr));
            coef.topRows(r) = v;
            const MatrixXd carry = qr.r * coef;  // rnew x rr

            Core xk_new(rl, n, rnew);
            xk_new.left_unfolding() = qr.q;
            Core next(rnew, x[k + 1].mode, x[k + 1].right);
            next.right_unfolding() = carry * x[k + 1].right_unfolding();
            x[k] = std::move(xk_new);
            x[k + 1] = std::move(next);

            // z's next core only contributes its right rank; keep shapes in step.
            if (z[k + 1].left != z[k].right) {
                Core zn(z[k].right, z[k + 1].mode, z[k + 1].right);
                z[k + 1] = std::move(zn);
            }
            rep.max_rank_seen = std::max(rep.max_rank_seen, rnew);
            update_left(k);
        }

        // Back to right-orthogonal form for the next sweep.
        for (Index k = d - 1; k >= 1; --k) {
            detail::right_orthogonalize(x, k);
            detail::right_orthogonalize(z, k);
            update_right(k);
        }
        rep.sweeps_used = sweep;

        if (cfg.verbose) {
            std::fprintf(stderr, "amen sweep %d: local residual %.3e, max rank %zu, tol_local %.1e\n", sweep,
                         max_res, TTVector(x).max_rank(), tol_local);
        }

        if (max_res < best_res) {
            best_res = max_res;
            best_x = x;
        }
        growth = max_res > prev_sweep_res ? growth + 1 : 0;
        prev_sweep_res = max_res;

        // The local residuals only approximate the global one, so check the
        // latter once they are close.
        if (max_res <= 10.0 * tol_local) {
            global_res = residual_at(a, TTVector(x), b, res_tol);
            if (cfg.verbose) std::fprintf(stderr, "amen sweep %d: global residual %.3e\n", sweep, global_res);
            if (global_res <= tol) {
                best_x = x;
                rep.converged = true;
                break;
            }
            if (max_res <= tol_local) tol_local = std::max(tol_local / 10.0, 1e-15);
        }
        if (growth >= 3) break;
    }

    result.x = TTVector(rep.converged ? x : best_x);
    rep.final_residual = residual(a, result.x, b);
    rep.converged = rep.final_residual <= tol;
    return result;
}

}  // namespace fsqtt
