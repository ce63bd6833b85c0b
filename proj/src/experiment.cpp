#include "fsqtt/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "fsqtt/fd_reference.hpp"
#include "fsqtt/io.hpp"

namespace fsqtt {

namespace {

std::optional<double> lookup(const std::map<std::string, double>& m, const char* key) {
    const auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

TTVector dense_to_tt(const Eigen::VectorXd& v, int d, Tolerance tol) {
    const std::vector<Index> modes(std::size_t(2 * d), 2);
    return from_full(std::span<const double>(v.data(), std::size_t(v.size())), modes, tol);
}

std::string dump_target(const RunConfig& cfg, int d) {
    if (cfg.d_min == cfg.d_max) return cfg.dump_path;
    return cfg.dump_path + ".d" + std::to_string(d);
}

void dump_solution(const RunConfig& cfg, int d, const TTVector& u) {
    int dc = d;
    TTVector out = u;
    if (cfg.restrict_to && *cfg.restrict_to < d) {
        dc = *cfg.restrict_to;
        out = restrict_solution(u, d, dc);
    }
    const std::string path = dump_target(cfg, d);
    save(path, out);
    if (dc <= 8) {
        const std::vector<double> full = to_full(out);
        const std::size_t n = std::size_t{1} << dc;
        std::ofstream os(path + ".txt");
        if (!os) throw std::runtime_error("cannot write " + path + ".txt");
        char buf[32];
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", full[i + n * j]);
                os << (i ? " " : "") << buf;
            }
            os << '\n';
        }
    }
}

RunRecord run_one(const RunConfig& cfg, const ProblemSpec& p, int d) {
    RunRecord r;
    r.solver = solver_name(cfg.solver);
    r.problem = p.name;
    r.d = d;
    const GridSpec g(d);
    const Tolerance tau = cfg.scheme.tau_round;

    TTVector u, ux, uy;
    if (cfg.solver == SolverKind::fd_dense) {
        const FdDenseSolution s = fd_solve_dense_full(p, d);
        r.time_assemble = s.time_assemble;
        r.time_solve = s.time_solve;
        r.time_total = s.time_assemble + s.time_solve;
        r.residual = s.residual;
        r.converged = true;
        r.energy = g.h * g.h * s.u.dot(sample_rhs(p, d));
        u = dense_to_tt(s.u, d, tau);
        ux = dense_to_tt(s.ux, d, tau);
        uy = dense_to_tt(s.uy, d, tau);
        r.erank_u = erank(u);
    } else {
        SolutionBundle b = cfg.solver == SolverKind::fs_qtt ? solve_fs(p, d, cfg.scheme) : fd_solve_qtt(p, d, cfg.scheme);
        r.time_assemble = b.timings.at("assemble");
        r.time_solve = b.timings.at("solve");
        r.time_total = b.timings.at("total");
        r.erank_kxinv = lookup(b.eranks, "kxinv");
        r.erank_kyinv = lookup(b.eranks, "kyinv");
        r.erank_qx = lookup(b.eranks, "qx");
        r.erank_qy = lookup(b.eranks, "qy");
        r.erank_hx = lookup(b.eranks, "Hx");
        r.erank_hy = lookup(b.eranks, "Hy");
        r.erank_a = lookup(b.eranks, "A");
        r.erank_u = lookup(b.eranks, "u");
        r.residual = b.report.final_residual;
        r.converged = b.report.converged;
        r.energy = energy_functional(b.u, b.f, g.h);
        u = std::move(b.u);
        ux = std::move(b.ux);
        uy = std::move(b.uy);
    }

    if (p.has_exact()) {
        const ReferenceFields ref = build_reference(p, d, cfg.reference_tol, cfg.scheme.seed);
        r.err_u = rel_error(u, ref.u).value;
        r.err_ux = rel_error(ux, ref.ux).value;
        r.err_uy = rel_error(uy, ref.uy).value;
    }
    if (!cfg.dump_path.empty()) dump_solution(cfg, d, u);
    return r;
}

void put(std::ostream& os, const std::optional<double>& v) {
    os << ',';
    if (v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", *v);
        os << buf;
    }
}

}  // namespace

SolverKind parse_solver(const std::string& name) {
    if (name == "fs-qtt") return SolverKind::fs_qtt;
    if (name == "fd-qtt") return SolverKind::fd_qtt;
    if (name == "fd-dense") return SolverKind::fd_dense;
    throw std::invalid_argument("unknown solver '" + name + "'");
}

std::string solver_name(SolverKind s) {
    switch (s) {
        case SolverKind::fs_qtt: return "fs-qtt";
        case SolverKind::fd_qtt: return "fd-qtt";
        case SolverKind::fd_dense: return "fd-dense";
    }
    return "?";
}

void RunConfig::validate() const {
    if (d_min < 1 || d_max < d_min)
        throw std::invalid_argument("empty grid-factor range [" + std::to_string(d_min) + ", " +
                                    std::to_string(d_max) + "]");
    if (d_max > 31) throw std::invalid_argument("grid factor above 31 is not supported");
    if (solver == SolverKind::fd_dense && d_max > kFdDenseMaxD)
        throw std::invalid_argument("fd-dense is limited to d <= " + std::to_string(kFdDenseMaxD));
    if (solver == SolverKind::fd_qtt && d_max > kFdQttMaxD)
        throw std::invalid_argument("fd-qtt is limited to d <= " + std::to_string(kFdQttMaxD));
    if (restrict_to && *restrict_to < 1) throw std::invalid_argument("restriction target must be >= 1");
    ProblemSpec::preset(problem);
    scheme.amen.validate();
}

RelError rel_error(const TTVector& a, const TTVector& b) {
    const double diff = norm(axpby(1.0, a, -1.0, b));
    const double bn = norm(b);
    if (bn == 0.0) return {diff, true};
    return {diff / bn, false};
}

ReferenceFields build_reference(const ProblemSpec& p, int d, double tol, std::uint64_t seed) {
    if (!p.has_exact() || !p.exact_ux || !p.exact_uy)
        throw std::invalid_argument("problem '" + p.name + "' has no closed-form solution");
    const Tolerance t = tol;
    CrossConfig cc;
    cc.tol = t;
    cc.seed = seed;
    const TTVector xc = coordinate_field(Axis::x, 0.5, d, t);
    const TTVector xr = coordinate_field(Axis::x, 1.0, d, t);
    const TTVector yc = coordinate_field(Axis::y, 0.5, d, t);
    const TTVector yr = coordinate_field(Axis::y, 1.0, d, t);
    ReferenceFields out;
    auto sample = [&](const Field2D& fn, const TTVector& xs, const TTVector& ys) {
        const TTVector args[] = {xs, ys};
        CrossResult r = cross_elementwise([&](std::span<const double> v) { return fn(v[0], v[1]); }, args, cc);
        out.converged = out.converged && r.converged;
        return std::move(r.tt);
    };
    out.u = sample(p.exact_u, xr, yr);
    out.ux = sample(p.exact_ux, xc, yr);
    out.uy = sample(p.exact_uy, xr, yc);
    return out;
}

std::vector<RunRecord> run_experiment(const RunConfig& cfg) {
    cfg.validate();
    const ProblemSpec p = ProblemSpec::preset(cfg.problem);
    std::vector<RunRecord> rows;
    for (int d = cfg.d_min; d <= cfg.d_max; ++d) {
        RunRecord r;
        try {
            r = run_one(cfg, p, d);
        } catch (const std::exception& e) {
            r = RunRecord{};
            r.solver = solver_name(cfg.solver);
            r.problem = p.name;
            r.d = d;
            r.converged = false;
            r.failure = e.what();
        }
        if (!rows.empty() && rows.back().failure.empty() && r.failure.empty())
            r.energy_re_diff = std::abs(r.energy - richardson(rows.back().energy, r.energy));
        rows.push_back(std::move(r));
    }
    return rows;
}

const char* const kCsvHeader =
    "solver,problem,d,time_total_s,time_assemble_s,time_solve_s,erank_kxinv,erank_kyinv,erank_qx,erank_qy,"
    "erank_Hx,erank_Hy,erank_A,erank_u,err_u,err_ux,err_uy,energy,energy_re_diff,residual,converged";

void write_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
    os << kCsvHeader << '\n';
    for (const RunRecord& r : rows) {
        os << r.solver << ',' << r.problem << ',' << r.d;
        const bool ok = r.failure.empty();
        auto opt = [&](double v) { return ok ? std::optional<double>(v) : std::nullopt; };
        put(os, opt(r.time_total));
        put(os, opt(r.time_assemble));
        put(os, opt(r.time_solve));
        for (const auto* v : {&r.erank_kxinv, &r.erank_kyinv, &r.erank_qx, &r.erank_qy, &r.erank_hx, &r.erank_hy,
                              &r.erank_a, &r.erank_u, &r.err_u, &r.err_ux, &r.err_uy})
            put(os, *v);
        put(os, opt(r.energy));
        put(os, r.energy_re_diff);
        put(os, opt(r.residual));
        os << ',' << (r.converged ? "true" : "false") << '\n';
    }
}

}  // namespace fsqtt
