#include "fsqtt/kernels.hpp"

#include <omp.h>

namespace fsqtt::kernels {

namespace {

using Eigen::MatrixXd;
using ConstMap = Eigen::Map<const MatrixXd>;
using Map = Eigen::Map<MatrixXd>;

void check_mode(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace

Core matvec_core_serial(const Core& a, Index rows, Index cols, const Core& x) {
    check_mode(a.mode == rows * cols && x.mode == cols, "matvec core: mode mismatch");
    Core y(a.left * x.left, rows, a.right * x.right);
    for (Index b = 0; b < x.right; ++b)
        for (Index be = 0; be < a.right; ++be)
            for (Index j = 0; j < cols; ++j)
                for (Index xa = 0; xa < x.left; ++xa) {
                    const double xv = x(xa, j, b);
                    for (Index i = 0; i < rows; ++i)
                        for (Index al = 0; al < a.left; ++al)
                            y(al + a.left * xa, i, be + a.right * b) += a(al, i + rows * j, be) * xv;
                }
    return y;
}

Core matvec_core_parallel(const Core& a, Index rows, Index cols, const Core& x) {
    check_mode(a.mode == rows * cols && x.mode == cols, "matvec core: mode mismatch");
    Core y(a.left * x.left, rows, a.right * x.right);
    const auto nb = static_cast<long>(x.right);
    const auto nbe = static_cast<long>(a.right);
#pragma omp parallel for collapse(2) schedule(static) if (y.size() > 4096)
    for (long b = 0; b < nb; ++b)
        for (long be = 0; be < nbe; ++be) {
            const Index out_r = Index(be) + a.right * Index(b);
            for (Index j = 0; j < cols; ++j)
                for (Index xa = 0; xa < x.left; ++xa) {
                    const double xv = x(xa, j, Index(b));
                    if (xv == 0.0) continue;
                    for (Index i = 0; i < rows; ++i) {
                        const double* acol = &a.data[a.left * (i + rows * j + a.mode * Index(be))];
                        double* ycol = &y.data[a.left * xa + y.left * (i + rows * out_r)];
                        for (Index al = 0; al < a.left; ++al) ycol[al] += acol[al] * xv;
                    }
                }
        }
    return y;
}

Core matmat_core_serial(const Core& a, Index rows, Index inner, const Core& b, Index cols) {
    check_mode(a.mode == rows * inner && b.mode == inner * cols, "matmat core: mode mismatch");
    Core c(a.left * b.left, rows * cols, a.right * b.right);
    for (Index bb = 0; bb < b.right; ++bb)
        for (Index be = 0; be < a.right; ++be)
            for (Index k = 0; k < cols; ++k)
                for (Index j = 0; j < inner; ++j)
                    for (Index ba = 0; ba < b.left; ++ba) {
                        const double bv = b(ba, j + inner * k, bb);
                        for (Index i = 0; i < rows; ++i)
                            for (Index al = 0; al < a.left; ++al)
                                c(al + a.left * ba, i + rows * k, be + a.right * bb) +=
                                    a(al, i + rows * j, be) * bv;
                    }
    return c;
}

Core matmat_core_parallel(const Core& a, Index rows, Index inner, const Core& b, Index cols) {
    check_mode(a.mode == rows * inner && b.mode == inner * cols, "matmat core: mode mismatch");
    Core c(a.left * b.left, rows * cols, a.right * b.right);
    const auto nbb = static_cast<long>(b.right);
    const auto nbe = static_cast<long>(a.right);
#pragma omp parallel for collapse(2) schedule(static) if (c.size() > 4096)
    for (long bb = 0; bb < nbb; ++bb)
        for (long be = 0; be < nbe; ++be) {
            const Index out_r = Index(be) + a.right * Index(bb);
            for (Index k = 0; k < cols; ++k)
                for (Index j = 0; j < inner; ++j)
                    for (Index ba = 0; ba < b.left; ++ba) {
                        const double bv = b(ba, j + inner * k, Index(bb));
                        if (bv == 0.0) continue;
                        for (Index i = 0; i < rows; ++i) {
                            const double* acol = &a.data[a.left * (i + rows * j + a.mode * Index(be))];
                            double* ccol = &c.data[a.left * ba + c.left * (i + rows * k + c.mode * out_r)];
                            for (Index al = 0; al < a.left; ++al) ccol[al] += acol[al] * bv;
                        }
                    }
        }
    return c;
}

Eigen::MatrixXd local_operator_serial(const Interface& left, const Core& a, Index n,
                                      const Interface& right) {
    check_mode(a.mode == n * n && left.op == a.left && right.op == a.right,
               "local operator: shape mismatch");
    const Index rl = left.bra, rr = right.bra;
    const Index dim = rl * n * rr;
    MatrixXd out = MatrixXd::Zero(Eigen::Index(dim), Eigen::Index(dim));
    for (Index b2 = 0; b2 < rr; ++b2)
        for (Index j = 0; j < n; ++j)
            for (Index a2 = 0; a2 < rl; ++a2)
                for (Index b = 0; b < rr; ++b)
                    for (Index i = 0; i < n; ++i)
                        for (Index a1 = 0; a1 < rl; ++a1) {
                            double s = 0.0;
                            for (Index al = 0; al < a.left; ++al)
                                for (Index be = 0; be < a.right; ++be)
                                    s += left(a1, al, a2) * a(al, i + n * j, be) * right(b, be, b2);
                            out(Eigen::Index(a1 + rl * (i + n * b)), Eigen::Index(a2 + rl * (j + n * b2))) = s;
                        }
    return out;
}

Eigen::MatrixXd local_operator_parallel(const Interface& left, const Core& a, Index n,
                                        const Interface& right) {
    check_mode(a.mode == n * n && left.op == a.left && right.op == a.right,
               "local operator: shape mismatch");
    const Index rl = left.bra, rr = right.bra;
    const Index ral = a.left, rar = a.right;
    const auto erl = Eigen::Index(rl), err = Eigen::Index(rr);

    MatrixXd lp(erl * erl, Eigen::Index(ral));
    for (Index a2 = 0; a2 < rl; ++a2)
        for (Index al = 0; al < ral; ++al)
            for (Index a1 = 0; a1 < rl; ++a1) lp(Eigen::Index(a1 + rl * a2), Eigen::Index(al)) = left(a1, al, a2);
    MatrixXd rp(Eigen::Index(rar), err * err);
    for (Index b2 = 0; b2 < rr; ++b2)
        for (Index be = 0; be < rar; ++be)
            for (Index b = 0; b < rr; ++b) rp(Eigen::Index(be), Eigen::Index(b + rr * b2)) = right(b, be, b2);

    MatrixXd t = lp * a.right_unfolding();  // (rl*rl) x (n*n*rar)
    Map t2(t.data(), erl * erl * Eigen::Index(n * n), Eigen::Index(rar));
    MatrixXd u = t2 * rp;  // (rl*rl*n*n) x (rr*rr)

    const Index dim = rl * n * rr;
    MatrixXd out{Eigen::Index(dim), Eigen::Index(dim)};
    const auto nb2 = static_cast<long>(rr);
#pragma omp parallel for schedule(static) if (dim > 256)
    for (long b2 = 0; b2 < nb2; ++b2)
        for (Index j = 0; j < n; ++j)
            for (Index a2 = 0; a2 < rl; ++a2) {
                const Eigen::Index col = Eigen::Index(a2 + rl * (j + n * Index(b2)));
                for (Index b = 0; b < rr; ++b) {
                    const Eigen::Index ucol = Eigen::Index(b + rr * Index(b2));
                    for (Index i = 0; i < n; ++i) {
                        const Eigen::Index urow0 = Eigen::Index(rl * a2 + rl * rl * (i + n * j));
                        const Eigen::Index row0 = Eigen::Index(rl * (i + n * b));
                        for (Index a1 = 0; a1 < rl; ++a1) out(row0 + Eigen::Index(a1), col) = u(urow0 + Eigen::Index(a1), ucol);
                    }
                }
            }
    return out;
}

Core local_apply(const Interface& left, const Core& a, Index n, const Core& x,
                 const Interface& right) {
    check_mode(a.mode == n * n && x.mode == n && left.ket == x.left && right.ket == x.right,
               "local apply: shape mismatch");
    const Index rl = left.bra, ral = a.left, rar = a.right, rr = right.bra;
    ConstMap lm(left.data.data(), Eigen::Index(rl * ral), Eigen::Index(left.ket));
    MatrixXd t1 = lm * x.right_unfolding();  // (rl*ral) x (n*x.right)

    MatrixXd t2 = MatrixXd::Zero(Eigen::Index(rl * n), Eigen::Index(rar * x.right));
    for (Index b2 = 0; b2 < x.right; ++b2)
        for (Index be = 0; be < rar; ++be)
            for (Index j = 0; j < n; ++j)
                for (Index al = 0; al < ral; ++al) {
                    const double* tcol = &t1(Eigen::Index(rl * al), Eigen::Index(j + n * b2));
                    for (Index i = 0; i < n; ++i) {
                        const double av = a(al, i + n * j, be);
                        if (av == 0.0) continue;
                        double* ocol = &t2(Eigen::Index(rl * i), Eigen::Index(be + rar * b2));
                        for (Index a1 = 0; a1 < rl; ++a1) ocol[a1] += tcol[a1] * av;
                    }
                }
    ConstMap rm(right.data.data(), Eigen::Index(rr), Eigen::Index(rar * right.ket));
    Core y(rl, n, rr);
    y.left_unfolding() = t2 * rm.transpose();
    return y;
}

Interface left_step(const Interface& left, const Core& bra, const Core& a, Index n, const Core& ket) {
    check_mode(a.mode == n * n && bra.mode == n && ket.mode == n && left.bra == bra.left &&
                   left.op == a.left && left.ket == ket.left,
               "left interface step: shape mismatch");
    const Index p = left.bra, ral = a.left, rar = a.right, q1 = ket.right;
    ConstMap lm(left.data.data(), Eigen::Index(p * ral), Eigen::Index(left.ket));
    MatrixXd t1 = lm * ket.right_unfolding();  // (p*ral) x (n*q1)

    MatrixXd t2 = MatrixXd::Zero(Eigen::Index(p * n), Eigen::Index(rar * q1));
    for (Index c = 0; c < q1; ++c)
        for (Index be = 0; be < rar; ++be)
            for (Index j = 0; j < n; ++j)
                for (Index al = 0; al < ral; ++al) {
                    const double* tcol = &t1(Eigen::Index(p * al), Eigen::Index(j + n * c));
                    for (Index i = 0; i < n; ++i) {
                        const double av = a(al, i + n * j, be);
                        if (av == 0.0) continue;
                        double* ocol = &t2(Eigen::Index(p * i), Eigen::Index(be + rar * c));
                        for (Index s = 0; s < p; ++s) ocol[s] += tcol[s] * av;
                    }
                }
    Interface out(bra.right, rar, q1);
    Map om(out.data.data(), Eigen::Index(bra.right), Eigen::Index(rar * q1));
    om.noalias() = bra.left_unfolding().transpose() * t2;
    return out;
}

Interface right_step(const Interface& right, const Core& bra, const Core& a, Index n, const Core& ket) {
    check_mode(a.mode == n * n && bra.mode == n && ket.mode == n && right.bra == bra.right &&
                   right.op == a.right && right.ket == ket.right,
               "right interface step: shape mismatch");
    const Index q = ket.left, p1 = bra.right, ral = a.left, rar = a.right;
    ConstMap rm(right.data.data(), Eigen::Index(p1 * rar), Eigen::Index(right.ket));
    MatrixXd t1 = ket.left_unfolding() * rm.transpose();  // (q*n) x (p1*rar)

    MatrixXd t2 = MatrixXd::Zero(Eigen::Index(n * p1), Eigen::Index(ral * q));
    for (Index be = 0; be < rar; ++be)
        for (Index c = 0; c < p1; ++c)
            for (Index j = 0; j < n; ++j) {
                const double* tcol = &t1(Eigen::Index(q * j), Eigen::Index(c + p1 * be));
                for (Index al = 0; al < ral; ++al)
                    for (Index i = 0; i < n; ++i) {
                        const double av = a(al, i + n * j, be);
                        if (av == 0.0) continue;
                        const Eigen::Index row = Eigen::Index(i + n * c);
                        for (Index s = 0; s < q; ++s) t2(row, Eigen::Index(al + ral * s)) += av * tcol[s];
                    }
            }
    Interface out(bra.left, ral, q);
    Map om(out.data.data(), Eigen::Index(bra.left), Eigen::Index(ral * q));
    om.noalias() = bra.right_unfolding() * t2;
    return out;
}

Eigen::MatrixXd left_step(const Eigen::MatrixXd& left, const Core& bra, const Core& ket) {
    check_mode(bra.mode == ket.mode && Index(left.rows()) == bra.left && Index(left.cols()) == ket.left,
               "left projection step: shape mismatch");
    MatrixXd t = left * ket.right_unfolding();  // P x (n*Q1)
    Map t2(t.data(), Eigen::Index(bra.left * bra.mode), Eigen::Index(ket.right));
    return bra.left_unfolding().transpose() * t2;
}

Eigen::MatrixXd right_step(const Eigen::MatrixXd& right, const Core& bra, const Core& ket) {
    check_mode(bra.mode == ket.mode && Index(right.rows()) == bra.right && Index(right.cols()) == ket.right,
               "right projection step: shape mismatch");
    MatrixXd t = bra.left_unfolding() * right;  // (P*n) x Q1
    Map t2(t.data(), Eigen::Index(bra.left), Eigen::Index(bra.mode * ket.right));
    return t2 * ket.right_unfolding().transpose();
}

}  // namespace fsqtt::kernels
