#include "fsqtt/fd_reference.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace fsqtt {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_cap(int d, int cap, const char* what) {
    if (d < 1 || d > cap)
        throw std::out_of_range(std::string(what) + ": d = " + std::to_string(d) + " outside [1, " +
                                std::to_string(cap) + "]");
}

SpMat sparse_identity(Eigen::Index n) {
    SpMat m(n, n);
    m.setIdentity();
    return m;
}

struct Blocks1D {
    SpMat binv, j, z;
};

Blocks1D blocks_1d(int d) {
    const GridSpec g(d);
    const auto n = Eigen::Index(g.n);
    Blocks1D b;
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < n; ++i) {
        t.emplace_back(i, i, 1.0 / g.h);
        if (i > 0) t.emplace_back(i, i - 1, -1.0 / g.h);
    }
    b.binv.resize(n, n);
    b.binv.setFromTriplets(t.begin(), t.end());
    b.j = sparse_identity(n);
    b.j.coeffRef(n - 1, n - 1) = 0.0;
    b.j.prune(0.0);
    b.z.resize(n, n);
    b.z.insert(n - 1, n - 1) = 1.0;
    return b;
}

SpMat sparse_diag(const VectorXd& v) {
    SpMat m(v.size(), v.size());
    m.reserve(Eigen::VectorXi::Constant(v.size(), 1));
    for (Eigen::Index i = 0; i < v.size(); ++i) m.insert(i, i) = v[i];
    return m;
}

struct FdOperators {
    SpMat ax, ay;
    SpMat dx, dy;  // first differences along x and y
    SpMat jj;
};

FdOperators fd_operators(const ProblemSpec& p, int d) {
    const Blocks1D b = blocks_1d(d);
    const SpMat eye = sparse_identity(b.j.rows());
    const VectorXd kx = sample_grid(p.kx, d, 0.5, 1.0);
    const VectorXd ky = sample_grid(p.ky, d, 1.0, 0.5);
    FdOperators op;
    const SpMat jx = Eigen::kroneckerProduct(eye, b.j);
    const SpMat jy = Eigen::kroneckerProduct(b.j, eye);
    op.dx = Eigen::kroneckerProduct(eye, b.binv);
    op.dy = Eigen::kroneckerProduct(b.binv, eye);
    const SpMat gx = op.dx * jx;
    const SpMat gy = op.dy * jy;
    op.ax = SpMat(gx.transpose()) * sparse_diag(kx) * gx + SpMat(Eigen::kroneckerProduct(eye, b.z));
    op.ay = SpMat(gy.transpose()) * sparse_diag(ky) * gy + SpMat(Eigen::kroneckerProduct(b.z, eye));
    op.jj = Eigen::kroneckerProduct(b.j, b.j);
    return op;
}

MatrixXd kron_dense(const MatrixXd& slow, const MatrixXd& fast) {
    return Eigen::kroneckerProduct(slow, fast).eval();
}

}  // namespace

VectorXd sample_grid(const Field2D& fn, int d, double sx, double sy) {
    const GridSpec g(d);
    const auto n = Eigen::Index(g.n);
    VectorXd v(n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double val = fn((double(i) + sx) * g.h, (double(j) + sy) * g.h);
            if (!std::isfinite(val))
                throw DomainError("non-finite sample at grid index (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
            v[i + n * j] = val;
        }
    return v;
}

VectorXd sample_rhs(const ProblemSpec& p, int d) {
    if (p.f) return sample_grid(p.f, d, 1.0, 1.0);
    if (p.point_sources.empty()) throw std::invalid_argument("problem has neither a right-hand side nor point sources");
    const GridSpec g(d);
    const auto n = Eigen::Index(g.n);
    VectorXd v = VectorXd::Zero(n * n);
    for (const PointSource& s : p.point_sources)
        v[Eigen::Index(nearest_node(s.x, d)) + n * Eigen::Index(nearest_node(s.y, d))] += s.weight / (g.h * g.h);
    return v;
}

DenseSystem fd_assemble_dense(const ProblemSpec& p, int d) {
    check_cap(d, kFdDenseMaxD, "fd_assemble_dense");
    FdOperators op = fd_operators(p, d);
    DenseSystem sys;
    sys.matrix = op.ax + op.ay;
    sys.matrix.makeCompressed();
    sys.rhs = op.jj * sample_rhs(p, d);
    sys.d = d;
    return sys;
}

VectorXd fd_solve_dense(const DenseSystem& sys) {
    const double bn = sys.rhs.norm();
    if (bn == 0.0) return VectorXd::Zero(sys.rhs.size());
    Eigen::SparseLU<SpMat> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw DomainError("fd_solve_dense: factorization failed: " + lu.lastErrorMessage());
    VectorXd u = lu.solve(sys.rhs);
    const double res = (sys.matrix * u - sys.rhs).norm() / bn;
    if (!(res <= 1e-12)) throw DomainError("fd_solve_dense: relative residual " + std::to_string(res));
    return u;
}

FdDenseSolution fd_solve_dense_full(const ProblemSpec& p, int d) {
    check_cap(d, kFdDenseMaxD, "fd_solve_dense");
    const auto t0 = Clock::now();
    FdOperators op = fd_operators(p, d);
    DenseSystem sys;
    sys.matrix = op.ax + op.ay;
    sys.matrix.makeCompressed();
    sys.rhs = op.jj * sample_rhs(p, d);
    sys.d = d;
    FdDenseSolution out;
    out.time_assemble = seconds_since(t0);
    const auto t1 = Clock::now();
    out.u = fd_solve_dense(sys);
    out.time_solve = seconds_since(t1);
    const double bn = sys.rhs.norm();
    out.residual = bn > 0.0 ? (sys.matrix * out.u - sys.rhs).norm() / bn : 0.0;
    out.ux = op.dx * out.u;
    out.uy = op.dy * out.u;
    return out;
}

SolutionBundle fd_solve_qtt(const ProblemSpec& p, int d, const SchemeConfig& cfg) {
    const auto t0 = Clock::now();
    const Tolerance tau = cfg.tau_round;
    const std::size_t rmax = cfg.rmax;
    const CrossConfig cc = cfg.cross_config();

    const TTVector xc = coordinate_field(Axis::x, 0.5, d, tau);
    const TTVector xr = coordinate_field(Axis::x, 1.0, d, tau);
    const TTVector yc = coordinate_field(Axis::y, 0.5, d, tau);
    const TTVector yr = coordinate_field(Axis::y, 1.0, d, tau);
    auto sample = [&](const Field2D& fn, const TTVector& xs, const TTVector& ys) {
        const TTVector args[] = {xs, ys};
        return cross_elementwise([&](std::span<const double> v) { return fn(v[0], v[1]); }, args, cc).tt;
    };
    const TTVector kx = sample(p.kx, xc, yr);
    const TTVector ky = sample(p.ky, xr, yc);
    const DiscretizedProblem rhs_only = [&] {
        ProblemSpec q = p;
        q.kx = q.ky = [](double, double) { return 1.0; };
        return discretize_problem(q, d, cfg);
    }();

    const FdBlocks b = qtt_fd_blocks(d);
    const TTMatrix eye = qtt_eye(d);
    auto rnd = [&](const TTMatrix& m) { return round(m, tau, rmax); };
    const TTMatrix dx = kron(eye, b.binv);
    const TTMatrix dy = kron(b.binv, eye);
    const TTMatrix gx = rnd(matmat(dx, kron(eye, b.j)));
    const TTMatrix gy = rnd(matmat(dy, kron(b.j, eye)));
    const TTMatrix ax = rnd(axpby(1.0, rnd(matmat(transpose(gx), rnd(matmat(diag(kx), gx)))), 1.0, kron(eye, b.zlast)));
    const TTMatrix ay = rnd(axpby(1.0, rnd(matmat(transpose(gy), rnd(matmat(diag(ky), gy)))), 1.0, kron(b.zlast, eye)));
    const TTMatrix a = rnd(add(ax, ay));
    const TTVector rhs = round(matvec(kron(b.j, b.j), rhs_only.f), tau, rmax);
    const double t_assemble = seconds_since(t0);

    const auto t1 = Clock::now();
    LinSolveConfig lc = cfg.amen;
    lc.rmax = std::min(lc.rmax, rmax);
    LinSolveResult sol = amen_solve(a, rhs, lc);
    SolutionBundle out;
    out.u = std::move(sol.x);
    out.report = sol.report;
    out.ux = matvec_round(dx, out.u, tau, rmax);
    out.uy = matvec_round(dy, out.u, tau, rmax);
    const double t_solve = seconds_since(t1);
    out.eranks = {{"A", erank(a)}, {"u", erank(out.u)}};
    out.timings = {{"assemble", t_assemble}, {"solve", t_solve}, {"total", seconds_since(t0)}};
    out.f = rhs_only.f;
    return out;
}

DenseSchemeOperators dense_scheme_operators(const ProblemSpec& p, int d) {
    check_cap(d, kDenseSchemeMaxD, "dense_scheme_operators");
    const GridSpec g(d);
    const auto n = Eigen::Index(g.n);
    const MatrixXd eye = MatrixXd::Identity(n, n);
    const MatrixXd b = MatrixXd::Constant(n, n, g.h).triangularView<Eigen::Lower>();
    const VectorXd kx_inv = sample_grid(p.kx, d, 0.5, 1.0).cwiseInverse();
    const VectorXd ky_inv = sample_grid(p.ky, d, 1.0, 0.5).cwiseInverse();

    DenseSchemeOperators op;
    op.qx.resize(n);
    op.qy.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) op.qx[j] = 1.0 / kx_inv.segment(n * j, n).sum();
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) s += ky_inv[i + n * j];
        op.qy[i] = 1.0 / s;
    }
    const MatrixXd ones = MatrixXd::Ones(n, n);
    const MatrixXd wx = kron_dense(op.qx.asDiagonal().toDenseMatrix(), ones);
    const MatrixXd wy = kron_dense(ones, op.qy.asDiagonal().toDenseMatrix());
    op.bx = kron_dense(eye, b);
    op.by = kron_dense(b, eye);
    const MatrixXd eye2 = MatrixXd::Identity(n * n, n * n);
    op.rx = kx_inv.asDiagonal() * (eye2 - wx * kx_inv.asDiagonal()) * op.bx.transpose();
    op.ry = ky_inv.asDiagonal() * (eye2 - wy * ky_inv.asDiagonal()) * op.by.transpose();
    op.hx = op.bx * op.rx;
    op.hy = op.by * op.ry;
    return op;
}

DenseSchemeSolution dense_scheme_solve(const ProblemSpec& p, int d) {
    const DenseSchemeOperators op = dense_scheme_operators(p, d);
    const VectorXd f = sample_rhs(p, d);
    const MatrixXd a = op.hx + op.hy;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(a);
    cod.setThreshold(1e-13);
    DenseSchemeSolution s;
    s.mu = cod.solve(op.hy * f);
    s.ux = op.rx * s.mu;
    s.uy = op.ry * (f - s.mu);
    s.u = op.bx * s.ux;
    return s;
}

double check_scheme_fd_identity(const ProblemSpec& p, int d) {
    check_cap(d, kDenseSchemeMaxD, "check_scheme_fd_identity");
    const DenseSchemeOperators s = dense_scheme_operators(p, d);
    const FdOperators f = fd_operators(p, d);
    const Blocks1D b = blocks_1d(d);
    const MatrixXd eye = MatrixXd::Identity(b.j.rows(), b.j.rows());
    const MatrixXd j = MatrixXd(b.j);
    const double ex = (f.ax * s.hx - kron_dense(eye, j)).cwiseAbs().maxCoeff();
    const double ey = (f.ay * s.hy - kron_dense(j, eye)).cwiseAbs().maxCoeff();
    return std::max(ex, ey);
}

TTVector restrict_solution(const TTVector& u, int d_fine, int d_coarse) {
    if (d_coarse < 1 || d_coarse > d_fine)
        throw std::invalid_argument("restrict_solution: need 1 <= d_coarse <= d_fine, got " +
                                    std::to_string(d_coarse) + " and " + std::to_string(d_fine));
    if (u.dim() != std::size_t(2 * d_fine))
        throw DimensionError("restrict_solution: field has " + std::to_string(u.dim()) + " cores, expected " +
                             std::to_string(2 * d_fine));
    const int s = d_fine - d_coarse;
    if (s == 0) return u;
    const auto& g = u.cores();
    std::vector<Core> out;
    // Drop the s lowest bits of each axis, fixing them to 1, and absorb the
    // resulting matrix into the next kept core.
    for (int axis = 0; axis < 2; ++axis) {
        const int base = axis * d_fine;
        MatrixXd m = g[Index(base)].slice(1);
        for (int k = base + 1; k < base + s; ++k) m = m * g[Index(k)].slice(1);
        const Core& next = g[Index(base + s)];
        Core c(Index(m.rows()), next.mode, next.right);
        c.right_unfolding() = m * next.right_unfolding();
        out.push_back(std::move(c));
        for (int k = base + s + 1; k < base + d_fine; ++k) out.push_back(g[Index(k)]);
    }
    return TTVector(std::move(out));
}

}  // namespace fsqtt
