#include "fsqtt/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsqtt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double kcoef(double x, double y) { return 1.0 + x * y * y; }

Index max_rank_of(const TTVector& v) { return v.max_rank(); }

}  // namespace

// Problems ----------------------------------------------------------------------

ProblemSpec ProblemSpec::analytic() {
    constexpr double w1 = std::numbers::pi, w2 = 2.0 * std::numbers::pi;
    ProblemSpec p;
    p.name = "analytic";
    p.kx = kcoef;
    p.ky = kcoef;
    p.f = [](double x, double y) {
        const double s1 = std::sin(w1 * x * x), c1 = std::cos(w1 * x * x);
        const double s2 = std::sin(w2 * y), c2 = std::cos(w2 * y);
        return (4.0 * w1 * w1 * x * x + w2 * w2) * (1.0 + x * y * y) * s1 * s2 -
               2.0 * w1 * (1.0 + 2.0 * x * y * y) * c1 * s2 - 2.0 * w2 * x * y * s1 * c2;
    };
    p.exact_u = [](double x, double y) { return std::sin(w1 * x * x) * std::sin(w2 * y); };
    p.exact_ux = [](double x, double y) { return 2.0 * w1 * x * std::cos(w1 * x * x) * std::sin(w2 * y); };
    p.exact_uy = [](double x, double y) { return w2 * std::sin(w1 * x * x) * std::cos(w2 * y); };
    return p;
}

ProblemSpec ProblemSpec::constant_rhs() {
    ProblemSpec p;
    p.name = "constant-rhs";
    p.kx = kcoef;
    p.ky = kcoef;
    p.f = [](double, double) { return 1.0; };
    return p;
}

ProblemSpec ProblemSpec::point_sources_preset() {
    ProblemSpec p;
    p.name = "point-sources";
    p.kx = kcoef;
    p.ky = kcoef;
    p.point_sources = {{0.2, 0.2, 1.0}, {0.8, 0.2, 1.0}, {0.2, 0.8, 1.0}, {0.8, 0.8, 1.0}};
    return p;
}

ProblemSpec ProblemSpec::preset(const std::string& name) {
    if (name == "analytic") return analytic();
    if (name == "constant-rhs") return constant_rhs();
    if (name == "point-sources") return point_sources_preset();
    throw std::invalid_argument("unknown problem preset '" + name + "'");
}

SchemeConfig SchemeConfig::profile_a() {
    SchemeConfig c;
    c.tau_round = 1e-12;
    c.tau_cross = 1e-12;
    c.amen.tol = 1e-10;
    return c;
}

SchemeConfig SchemeConfig::profile_b() {
    SchemeConfig c;
    c.tau_round = 1e-8;
    c.tau_cross = 1e-8;
    c.amen.tol = 1e-6;
    return c;
}

CrossConfig SchemeConfig::cross_config() const {
    CrossConfig c;
    c.tol = tau_cross;
    c.seed = seed;
    c.rmax = rmax;
    return c;
}

// Discretization ----------------------------------------------------------------

TTVector coordinate_field(Axis axis, double shift, int d, Tolerance tol) {
    const GridSpec g(d);
    const TTVector e = qtt_ones(d);
    const TTVector ramp = axpby(1.0, qtt_xfun(d), shift, e);
    const TTVector raw = axis == Axis::x ? kron(e, ramp) : kron(ramp, e);
    return scale(g.h, round(raw, tol));
}

std::uint64_t nearest_node(double a, int d) {
    const GridSpec g(d);
    const double t = a / g.h - 1.0;
    const double i = std::ceil(t - 0.5);
    if (i <= 0.0) return 0;
    if (i >= double(g.n - 1)) return g.n - 1;
    return std::uint64_t(i);
}

DiscretizedProblem discretize_problem(const ProblemSpec& p, int d, const SchemeConfig& cfg) {
    const GridSpec g(d);
    if (!p.kx || !p.ky) throw std::invalid_argument("problem has no diffusion coefficients");
    const TTVector xc = coordinate_field(Axis::x, 0.5, d, cfg.tau_round);
    const TTVector xr = coordinate_field(Axis::x, 1.0, d, cfg.tau_round);
    const TTVector yc = coordinate_field(Axis::y, 0.5, d, cfg.tau_round);
    const TTVector yr = coordinate_field(Axis::y, 1.0, d, cfg.tau_round);
    const CrossConfig cc = cfg.cross_config();
    bool ok = true;

    auto sample = [&](const Field2D& fn, const TTVector& xs, const TTVector& ys, bool reciprocal) {
        const TTVector args[] = {xs, ys};
        CrossResult r = cross_elementwise(
            [&](std::span<const double> v) { return reciprocal ? 1.0 / fn(v[0], v[1]) : fn(v[0], v[1]); }, args,
            cc);
        ok = ok && r.converged;
        return std::move(r.tt);
    };

    TTVector f;
    if (p.f) {
        f = sample(p.f, xr, yr, false);
    } else if (!p.point_sources.empty()) {
        const double scale_h = 1.0 / (g.h * g.h);
        bool first = true;
        for (const PointSource& s : p.point_sources) {
            TTVector term = scale(s.weight * scale_h, kron(qtt_delta(d, nearest_node(s.y, d)),
                                                           qtt_delta(d, nearest_node(s.x, d))));
            f = first ? std::move(term) : round(axpby(1.0, f, 1.0, term), cfg.tau_round, cfg.rmax);
            first = false;
        }
    } else {
        throw std::invalid_argument("problem has neither a right-hand side nor point sources");
    }

    TTVector kx_inv = sample(p.kx, xc, yr, true);
    TTVector ky_inv = sample(p.ky, xr, yc, true);
    return DiscretizedProblem{g, std::move(f), std::move(kx_inv), std::move(ky_inv), ok};
}

// Operators ---------------------------------------------------------------------

WResult build_w(Axis axis, const TTVector& k_inv, int d, const SchemeConfig& cfg) {
    if (k_inv.dim() != std::size_t(2 * d)) throw DimensionError("build_w: coefficient must have 2d cores");
    const auto& g = k_inv.cores();
    auto summed = [&](Index k) {
        Eigen::MatrixXd s = g[k].slice(0);
        for (Index i = 1; i < g[k].mode; ++i) s += g[k].slice(i);
        return s;
    };
    std::vector<Core> cores;
    if (axis == Axis::x) {
        Eigen::MatrixXd m = summed(0);
        for (int k = 1; k < d; ++k) m = m * summed(Index(k));
        const Core& gd = g[Index(d)];
        Core hat(1, gd.mode, gd.right);
        hat.right_unfolding() = m * gd.right_unfolding();
        cores.push_back(std::move(hat));
        for (int k = d + 1; k < 2 * d; ++k) cores.push_back(g[Index(k)]);
    } else {
        Eigen::MatrixXd m = summed(Index(2 * d - 1));
        for (int k = 2 * d - 2; k >= d; --k) m = summed(Index(k)) * m;
        for (int k = 0; k + 1 < d; ++k) cores.push_back(g[Index(k)]);
        const Core& gd = g[Index(d - 1)];
        Core hat(gd.left, gd.mode, 1);
        hat.left_unfolding() = gd.left_unfolding() * m;
        cores.push_back(std::move(hat));
    }
    const TTVector q_inv(std::move(cores));
    const TTVector args[] = {q_inv};
    CrossResult qr = cross_elementwise([](std::span<const double> v) { return 1.0 / v[0]; }, args,
                                       cfg.cross_config());
    if (!qr.converged && qr.validation_error > 1e3 * cfg.tau_cross.value())
        throw DomainError(std::string("build_w: inversion of q_") + (axis == Axis::x ? "x" : "y") +
                          " failed, validation error " + std::to_string(qr.validation_error));
    TTVector q = std::move(qr.tt);
    const TTMatrix qm = diag(q);
    const TTMatrix e = qtt_ones_mat(d);
    TTMatrix w = round(axis == Axis::x ? kron(qm, e) : kron(e, qm), cfg.tau_round, cfg.rmax);
    return {std::move(q), std::move(w)};
}

Tolerance operator_tolerance(Tolerance tau_round, int d) {
    // Rounding noise in the operator products has to stay below the smallest
    // eigenvalues of A, which scale like h^2.
    const double h = std::ldexp(1.0, -d);
    return std::min(tau_round.value(), std::max(1e-14, 0.01 * h * h));
}

OperatorSet assemble_operators(const DiscretizedProblem& dp, const SchemeConfig& cfg) {
    const int d = dp.grid.d;
    const Tolerance tau = operator_tolerance(cfg.tau_round, d);
    const std::size_t rmax = cfg.rmax;
    OperatorSet ops;
    RoundInfo info;
    auto rnd = [&](const TTMatrix& m) {
        TTMatrix r = round(m, tau, rmax, &info);
        ops.rank_capped = ops.rank_capped || info.rank_capped;
        return r;
    };

    WResult wx = build_w(Axis::x, dp.kx_inv, d, cfg);
    WResult wy = build_w(Axis::y, dp.ky_inv, d, cfg);
    ops.qx = std::move(wx.q);
    ops.qy = std::move(wy.q);
    ops.wx = std::move(wx.w);
    ops.wy = std::move(wy.w);

    const TTMatrix eye = qtt_eye(d);
    const TTMatrix eye2 = qtt_eye(2 * d);
    const TTMatrix b = qtt_volterra(d);
    ops.bx = kron(eye, b);
    ops.by = kron(b, eye);

    auto build_r = [&](const TTVector& k_inv, const TTMatrix& w, const TTMatrix& bm) {
        const TTMatrix kinv = diag(k_inv);
        const TTMatrix wk = rnd(matmat(w, kinv));
        const TTMatrix proj = rnd(axpby(1.0, eye2, -1.0, wk));
        const TTMatrix left = rnd(matmat(kinv, proj));
        return rnd(matmat(left, transpose(bm)));
    };
    ops.rx = build_r(dp.kx_inv, ops.wx, ops.bx);
    ops.ry = build_r(dp.ky_inv, ops.wy, ops.by);
    ops.hx = rnd(matmat(ops.bx, ops.rx));
    ops.hy = rnd(matmat(ops.by, ops.ry));

    const TTMatrix a_raw = add(ops.hx, ops.hy);
    ops.a_rank_pre_round = a_raw.max_rank();
    ops.a = rnd(a_raw);

    const Index rkx = max_rank_of(dp.kx_inv), rky = max_rank_of(dp.ky_inv);
    const Index rqx = max_rank_of(ops.qx), rqy = max_rank_of(ops.qy);
    ops.hy_rank_bound = 4 * (1 + rky * rqy) * rky;
    ops.a_rank_bound = 4 * (1 + rkx * rqx) * rkx + ops.hy_rank_bound;
    return ops;
}

// Solve ---------------------------------------------------------------------------

SolutionBundle solve_fs(const ProblemSpec& p, int d, const SchemeConfig& cfg) {
    const auto t0 = Clock::now();
    const DiscretizedProblem dp = discretize_problem(p, d, cfg);
    const OperatorSet ops = assemble_operators(dp, cfg);
    const double t_assemble = seconds_since(t0);

    const auto t1 = Clock::now();
    const Tolerance tau = cfg.tau_round;
    SolutionBundle out;
    out.ranks.a_pre_round = ops.a_rank_pre_round;
    out.ranks.a_bound = ops.a_rank_bound;
    out.ranks.rhs_pre_round = matvec(ops.hy, dp.f).max_rank();
    out.ranks.rhs_bound = ops.hy_rank_bound * dp.f.max_rank();

    const TTVector rhs = matvec_round(ops.hy, dp.f, tau, cfg.rmax);
    LinSolveConfig lc = cfg.amen;
    lc.rmax = std::min(lc.rmax, cfg.rmax);
    LinSolveResult sol = amen_solve(ops.a, rhs, lc);
    out.mu = std::move(sol.x);
    out.report = sol.report;
    // A capped operator is a different operator; its exact solve is not ours.
    if (ops.rank_capped) out.report.converged = false;

    out.ux = matvec_round(ops.rx, out.mu, tau, cfg.rmax);
    const TTVector rest = round(axpby(1.0, dp.f, -1.0, out.mu), tau, cfg.rmax);
    out.uy = matvec_round(ops.ry, rest, tau, cfg.rmax);
    out.u = matvec_round(ops.bx, out.ux, tau, cfg.rmax);
    const double t_solve = seconds_since(t1);

    out.eranks = {{"kxinv", erank(dp.kx_inv)}, {"kyinv", erank(dp.ky_inv)}, {"qx", erank(ops.qx)},
                  {"qy", erank(ops.qy)},       {"Hx", erank(ops.hx)},       {"Hy", erank(ops.hy)},
                  {"A", erank(ops.a)},         {"u", erank(out.u)}};
    out.timings = {{"assemble", t_assemble}, {"solve", t_solve}, {"total", seconds_since(t0)}};
    out.f = dp.f;
    return out;
}

double energy_functional(const TTVector& u, const TTVector& f, double h) { return h * h * dot(u, f); }

double richardson(double j_h, double j_half_h) { return (4.0 * j_half_h - j_h) / 3.0; }

}  // namespace fsqtt
