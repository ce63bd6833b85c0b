// fsqtt: command-line runner for the finite-sum QTT diffusion solver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsqtt/experiment.hpp"
#include "fsqtt/fd_reference.hpp"

using namespace fsqtt;

namespace {

struct Options {
    std::string problem = "analytic";
    std::string solver = "fs-qtt";
    std::optional<int> d;
    std::optional<int> d_min, d_max;
    std::string profile;
    std::optional<double> tau_amen, tau_round, tau_cross;
    std::optional<std::size_t> rmax;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string dump;
    std::optional<int> restrict_to;
};

void add_common(CLI::App* cmd, Options& o, bool single_d) {
    cmd->add_option("--problem", o.problem, "analytic, constant-rhs or point-sources")
        ->check(CLI::IsMember({"analytic", "constant-rhs", "point-sources"}));
    cmd->add_option("--solver", o.solver, "fs-qtt, fd-qtt or fd-dense")
        ->check(CLI::IsMember({"fs-qtt", "fd-qtt", "fd-dense"}));
    if (single_d) {
        cmd->add_option("--d", o.d, "grid factor, n = 2^d per axis")->required()->check(CLI::Range(1, 31));
    } else {
        cmd->add_option("--d", o.d, "single grid factor")->check(CLI::Range(1, 31));
        cmd->add_option("--d-min", o.d_min, "first grid factor")->check(CLI::Range(1, 31));
        cmd->add_option("--d-max", o.d_max, "last grid factor")->check(CLI::Range(1, 31));
    }
    cmd->add_option("--profile", o.profile, "tolerance profile: A (tight) or B (loose)")
        ->check(CLI::IsMember({"A", "B"}));
    cmd->add_option("--tau-amen", o.tau_amen, "linear solver tolerance");
    cmd->add_option("--tau-round", o.tau_round, "rounding tolerance");
    cmd->add_option("--tau-cross", o.tau_cross, "cross tolerance");
    cmd->add_option("--rmax", o.rmax, "rank cap")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out", o.out, "CSV output path (default stdout)");
    cmd->add_option("--dump-solution", o.dump, "save u in the TT container format");
    cmd->add_option("--restrict-to", o.restrict_to, "restrict the dumped solution to this grid factor")
        ->check(CLI::Range(1, 31));
}

SchemeConfig scheme_from(const Options& o) {
    std::string profile = o.profile;
    if (profile.empty()) profile = o.problem == "analytic" ? "A" : "B";
    SchemeConfig s = profile == "A" ? SchemeConfig::profile_a() : SchemeConfig::profile_b();
    if (o.tau_amen) s.amen.tol = *o.tau_amen;
    if (o.tau_round) s.tau_round = *o.tau_round;
    if (o.tau_cross) s.tau_cross = *o.tau_cross;
    if (o.rmax) {
        s.rmax = *o.rmax;
        s.amen.rmax = *o.rmax;
    }
    if (o.seed) {
        s.seed = *o.seed;
        s.amen.seed = *o.seed;
    }
    return s;
}

RunConfig run_config_from(const Options& o, int default_min, int default_max) {
    RunConfig rc;
    rc.problem = o.problem;
    rc.solver = parse_solver(o.solver);
    rc.d_min = o.d ? *o.d : o.d_min.value_or(default_min);
    rc.d_max = o.d ? *o.d : o.d_max.value_or(default_max);
    rc.scheme = scheme_from(o);
    rc.dump_path = o.dump;
    rc.restrict_to = o.restrict_to;
    rc.validate();
    return rc;
}

void emit_csv(const Options& o, const std::vector<RunRecord>& rows) {
    if (o.out.empty()) {
        write_csv(std::cout, rows);
        return;
    }
    std::ofstream os(o.out);
    if (!os) throw std::runtime_error("cannot write " + o.out);
    write_csv(os, rows);
}

int status_of(const std::vector<RunRecord>& rows) {
    int status = 0;
    for (const RunRecord& r : rows) {
        if (!r.failure.empty()) std::cerr << "d = " << r.d << ": " << r.failure << '\n';
        if (!r.converged) status = 2;
    }
    return status;
}

int cmd_run(const Options& o, int default_min, int default_max) {
    const RunConfig rc = run_config_from(o, default_min, default_max);
    const auto rows = run_experiment(rc);
    emit_csv(o, rows);
    return status_of(rows);
}

int cmd_ranks(const Options& o) {
    if (o.solver != "fs-qtt") throw std::invalid_argument("ranks requires --solver fs-qtt");
    const RunConfig rc = run_config_from(o, 5, 10);
    const ProblemSpec p = ProblemSpec::preset(rc.problem);
    std::vector<RunRecord> rows;
    int status = 0;
    for (int d = rc.d_min; d <= rc.d_max; ++d) {
        const SolutionBundle b = solve_fs(p, d, rc.scheme);
        const RankCheck& rk = b.ranks;
        std::fprintf(stderr, "d=%d  A pre-round %zu <= %zu %s   Hy*f %zu <= %zu %s\n", d, rk.a_pre_round, rk.a_bound,
                     rk.a_pre_round <= rk.a_bound ? "ok" : "VIOLATED", rk.rhs_pre_round, rk.rhs_bound,
                     rk.rhs_pre_round <= rk.rhs_bound ? "ok" : "VIOLATED");
        RunRecord r;
        r.solver = "fs-qtt";
        r.problem = p.name;
        r.d = d;
        r.time_total = b.timings.at("total");
        r.time_assemble = b.timings.at("assemble");
        r.time_solve = b.timings.at("solve");
        r.erank_kxinv = b.eranks.at("kxinv");
        r.erank_kyinv = b.eranks.at("kyinv");
        r.erank_qx = b.eranks.at("qx");
        r.erank_qy = b.eranks.at("qy");
        r.erank_hx = b.eranks.at("Hx");
        r.erank_hy = b.eranks.at("Hy");
        r.erank_a = b.eranks.at("A");
        r.erank_u = b.eranks.at("u");
        r.energy = energy_functional(b.u, b.f, GridSpec(d).h);
        r.residual = b.report.final_residual;
        r.converged = b.report.converged;
        if (!r.converged) status = 2;
        rows.push_back(std::move(r));
    }
    emit_csv(o, rows);
    return status;
}

int cmd_equivalence(const Options& o, bool problem_given) {
    const int d_min = o.d ? *o.d : o.d_min.value_or(2);
    const int d_max = o.d ? *o.d : o.d_max.value_or(5);
    if (d_min < 1 || d_max < d_min || d_max > kDenseSchemeMaxD)
        throw std::invalid_argument("equivalence-check needs 1 <= d-min <= d-max <= " +
                                    std::to_string(kDenseSchemeMaxD));
    std::vector<std::string> problems = {"analytic", "constant-rhs", "point-sources"};
    if (problem_given) problems = {o.problem};
    Options oa = o;
    if (oa.profile.empty()) oa.profile = "A";
    const SchemeConfig s = scheme_from(oa);
    const double limit = std::max(1e-8, 10.0 * s.amen.tol.value());
    int status = 0;
    std::printf("problem,d,rel_error_fs_fd,identity_residual,pass\n");
    for (const std::string& name : problems) {
        const ProblemSpec p = ProblemSpec::preset(name);
        for (int d = d_min; d <= d_max; ++d) {
            const SolutionBundle b = solve_fs(p, d, s);
            const Eigen::VectorXd ufd = fd_solve_dense(fd_assemble_dense(p, d));
            const std::vector<double> ufs = to_full(b.u);
            const Eigen::Map<const Eigen::VectorXd> ufs_v(ufs.data(), Eigen::Index(ufs.size()));
            const double err = (ufs_v - ufd).norm() / ufd.norm();
            const double id = check_scheme_fd_identity(p, d);
            const bool pass = err <= limit && id <= 1e-10 && b.report.converged;
            if (!pass) status = 2;
            std::printf("%s,%d,%.3e,%.3e,%s\n", name.c_str(), d, err, id, pass ? "true" : "false");
        }
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-sum QTT solver for 2-D stationary diffusion"};
    app.require_subcommand(1);
    Options o;
    CLI::App* solve = app.add_subcommand("solve", "solve one preset at one grid factor");
    add_common(solve, o, true);
    CLI::App* conv = app.add_subcommand("convergence", "solve over a range of grid factors");
    add_common(conv, o, false);
    CLI::App* ranks = app.add_subcommand("ranks", "effective ranks and rank-bound checks");
    add_common(ranks, o, false);
    CLI::App* equiv = app.add_subcommand("equivalence-check", "compare against the finite-difference solution");
    add_common(equiv, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solve) return cmd_run(o, 0, 0);
        if (*conv) return cmd_run(o, 5, 10);
        if (*ranks) return cmd_ranks(o);
        return cmd_equivalence(o, equiv->count("--problem") > 0);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
