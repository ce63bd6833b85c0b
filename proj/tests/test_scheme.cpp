#include <cmath>

#include <doctest.h>

#include "fsqtt/fd_reference.hpp"
#include "fsqtt/scheme.hpp"
#include "test_util.hpp"

using namespace fsqtt;
using namespace fsqtt::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ProblemSpec unit_coefficient() {
    ProblemSpec p = ProblemSpec::constant_rhs();
    p.name = "unit";
    p.kx = p.ky = [](double, double) { return 1.0; };
    return p;
}

}  // namespace

TEST_CASE("presets") {
    CHECK(ProblemSpec::preset("analytic").has_exact());
    CHECK_FALSE(ProblemSpec::preset("constant-rhs").has_exact());
    CHECK(ProblemSpec::preset("point-sources").point_sources.size() == 4);
    CHECK_THROWS_AS(ProblemSpec::preset("nope"), std::invalid_argument);
    // The analytic right-hand side matches the operator applied to u.
    const ProblemSpec p = ProblemSpec::analytic();
    const double x = 0.37, y = 0.61, e = 1e-4;
    auto flux_x = [&](double s) {
        return p.kx(s, y) * (p.exact_u(s + e / 2, y) - p.exact_u(s - e / 2, y)) / e;
    };
    auto flux_y = [&](double s) {
        return p.ky(x, s) * (p.exact_u(x, s + e / 2) - p.exact_u(x, s - e / 2)) / e;
    };
    const double lhs = -(flux_x(x + e / 2) - flux_x(x - e / 2)) / e - (flux_y(y + e / 2) - flux_y(y - e / 2)) / e;
    CHECK(lhs == doctest::Approx(p.f(x, y)).epsilon(1e-5));
    CHECK(p.exact_ux(x, y) == doctest::Approx((p.exact_u(x + e, y) - p.exact_u(x - e, y)) / (2 * e)).epsilon(1e-6));
    CHECK(p.exact_uy(x, y) == doctest::Approx((p.exact_u(x, y + e) - p.exact_u(x, y - e)) / (2 * e)).epsilon(1e-6));
}

TEST_CASE("nearest node rule") {
    CHECK(nearest_node(0.2, 3) == 1);
    CHECK(nearest_node(0.8, 3) == 5);
    CHECK(nearest_node(0.0, 3) == 0);
    CHECK(nearest_node(1.0, 3) == 7);
    // 0.3125 sits halfway between nodes 1 and 2 at d = 3.
    CHECK(nearest_node(0.3125, 3) == 1);
}

TEST_CASE("discretization") {
    const SchemeConfig cfg = SchemeConfig::profile_a();
    SUBCASE("staggered coefficient samples") {
        const DiscretizedProblem dp = discretize_problem(ProblemSpec::analytic(), 1, cfg);
        // k_x at (0.25, 0.5) and k_y at (0.5, 0.25).
        CHECK(dp.kx_inv.at(0) == doctest::Approx(1.0 / 1.0625).epsilon(1e-12));
        CHECK(dp.ky_inv.at(0) == doctest::Approx(1.0 / (1.0 + 0.5 * 0.0625)).epsilon(1e-12));
    }
    SUBCASE("constant right-hand side has rank one") {
        const DiscretizedProblem dp = discretize_problem(ProblemSpec::constant_rhs(), 6, cfg);
        CHECK(dp.f.max_rank() == 1);
        CHECK(dp.f.at(123) == doctest::Approx(1.0));
    }
    SUBCASE("point sources") {
        const DiscretizedProblem dp = discretize_problem(ProblemSpec::point_sources_preset(), 3, cfg);
        CHECK(dp.f.max_rank() <= 4);
        const VectorXd f = dense(dp.f);
        CHECK((f.array().abs() > 1e-9).count() == 4);
        for (std::uint64_t i : {1u, 5u})
            for (std::uint64_t j : {1u, 5u}) CHECK(f[Eigen::Index(i + 8 * j)] == doctest::Approx(64.0));
        CHECK(rel_diff(f, sample_rhs(ProblemSpec::point_sources_preset(), 3)) < 1e-14);
    }
    SUBCASE("samples match the dense grid") {
        const ProblemSpec p = ProblemSpec::analytic();
        const DiscretizedProblem dp = discretize_problem(p, 4, cfg);
        CHECK(rel_diff(dense(dp.f), sample_rhs(p, 4)) < 1e-11);
        CHECK(rel_diff(dense(dp.kx_inv), VectorXd(sample_grid(p.kx, 4, 0.5, 1.0).cwiseInverse())) < 1e-11);
        CHECK(rel_diff(dense(dp.ky_inv), VectorXd(sample_grid(p.ky, 4, 1.0, 0.5).cwiseInverse())) < 1e-11);
    }
}

TEST_CASE("coordinate fields") {
    const VectorXd x = dense(coordinate_field(Axis::x, 1.0, 2, 1e-14));
    const VectorXd y = dense(coordinate_field(Axis::y, 0.5, 2, 1e-14));
    for (Eigen::Index j = 0; j < 4; ++j)
        for (Eigen::Index i = 0; i < 4; ++i) {
            CHECK(x[i + 4 * j] == doctest::Approx(0.25 * double(i + 1)));
            CHECK(y[i + 4 * j] == doctest::Approx(0.25 * (double(j) + 0.5)));
        }
}

TEST_CASE("W operators") {
    const SchemeConfig cfg = SchemeConfig::profile_a();
    SUBCASE("unit coefficient gives q = h") {
        const DiscretizedProblem dp = discretize_problem(unit_coefficient(), 3, cfg);
        const WResult w = build_w(Axis::x, dp.kx_inv, 3, cfg);
        CHECK(rel_diff(dense(w.q), VectorXd(VectorXd::Constant(8, 0.125))) < 1e-12);
    }
    SUBCASE("d = 1 dense") {
        const ProblemSpec p = ProblemSpec::analytic();
        const DiscretizedProblem dp = discretize_problem(p, 1, cfg);
        const WResult w = build_w(Axis::x, dp.kx_inv, 1, cfg);
        const DenseSchemeOperators op = dense_scheme_operators(p, 1);
        MatrixXd want = MatrixXd::Zero(4, 4);
        for (Eigen::Index j = 0; j < 2; ++j) want.block(2 * j, 2 * j, 2, 2).setConstant(op.qx[j]);
        CHECK((to_dense(w.w) - want).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("q against dense") {
        const ProblemSpec p = ProblemSpec::analytic();
        const DiscretizedProblem dp = discretize_problem(p, 3, cfg);
        const DenseSchemeOperators op = dense_scheme_operators(p, 3);
        CHECK(rel_diff(dense(build_w(Axis::x, dp.kx_inv, 3, cfg).q), op.qx) < 1e-11);
        CHECK(rel_diff(dense(build_w(Axis::y, dp.ky_inv, 3, cfg).q), op.qy) < 1e-11);
    }
    SUBCASE("shape check") {
        CHECK_THROWS_AS(build_w(Axis::x, qtt_ones(3), 2, cfg), DimensionError);
    }
}

TEST_CASE("assembled operators against dense") {
    const SchemeConfig cfg = SchemeConfig::profile_a();
    for (const char* name : {"analytic", "point-sources"}) {
        const ProblemSpec p = ProblemSpec::preset(name);
        for (int d = 1; d <= 4; ++d) {
            CAPTURE(name);
            CAPTURE(d);
            const OperatorSet ops = assemble_operators(discretize_problem(p, d, cfg), cfg);
            const DenseSchemeOperators op = dense_scheme_operators(p, d);
            CHECK(rel_diff(to_dense(ops.rx), op.rx) < 1e-9);
            CHECK(rel_diff(to_dense(ops.ry), op.ry) < 1e-9);
            CHECK(rel_diff(to_dense(ops.hx), op.hx) < 1e-9);
            CHECK(rel_diff(to_dense(ops.hy), op.hy) < 1e-9);
            const MatrixXd a = to_dense(ops.a);
            CHECK((a - a.transpose()).norm() <= 10 * cfg.tau_round.value() * a.norm());
            CHECK(ops.a_rank_pre_round <= ops.a_rank_bound);
        }
    }
}

TEST_CASE("operator tolerance") {
    CHECK(operator_tolerance(1e-12, 5).value() == 1e-12);
    CHECK(operator_tolerance(1e-12, 18).value() == doctest::Approx(0.01 * std::ldexp(1.0, -36)));
    CHECK(operator_tolerance(1e-12, 25).value() == 1e-14);
    CHECK(operator_tolerance(1e-8, 10).value() == doctest::Approx(0.01 * std::ldexp(1.0, -20)));
}

TEST_CASE("solutions against the dense scheme") {
    const SchemeConfig cfg = SchemeConfig::profile_a();
    SUBCASE("d = 1 unit problem") {
        const SolutionBundle b = solve_fs(unit_coefficient(), 1, cfg);
        const VectorXd u = dense(b.u);
        CHECK(u[0] == doctest::Approx(0.0625).epsilon(1e-8));
        CHECK(std::abs(u[1]) < 1e-12);
        CHECK(std::abs(u[2]) < 1e-12);
        CHECK(std::abs(u[3]) < 1e-12);
    }
    for (const char* name : {"analytic", "constant-rhs", "point-sources"}) {
        const ProblemSpec p = ProblemSpec::preset(name);
        for (int d = 2; d <= 4; ++d) {
            CAPTURE(name);
            CAPTURE(d);
            const SolutionBundle b = solve_fs(p, d, cfg);
            CHECK(b.report.converged);
            const DenseSchemeSolution s = dense_scheme_solve(p, d);
            CHECK(rel_diff(dense(b.u), s.u) < 1e-8);
            CHECK(rel_diff(dense(b.ux), s.ux) < 1e-8);
            CHECK(rel_diff(dense(b.uy), s.uy) < 1e-8);
            // Both partials integrate back to the same u.
            const DenseSchemeOperators op = dense_scheme_operators(p, d);
            const VectorXd via_x = op.bx * dense(b.ux), via_y = op.by * dense(b.uy);
            CHECK(rel_diff(via_x, via_y) < 1e-8);
            CHECK(b.ranks.rhs_pre_round <= b.ranks.rhs_bound);
            for (const char* key : {"kxinv", "kyinv", "qx", "qy", "Hx", "Hy", "A", "u"}) CHECK(b.eranks.count(key) == 1);
        }
    }
}

TEST_CASE("mu is determined up to the null space of A") {
    // Adding a null vector of H_x + H_y to mu changes neither u_x nor u_y
    // after integration.
    const ProblemSpec p = ProblemSpec::analytic();
    const int d = 3;
    const DenseSchemeOperators op = dense_scheme_operators(p, d);
    const MatrixXd a = op.hx + op.hy;
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::Index n = a.cols();
    const VectorXd z = svd.matrixV().col(n - 1);
    REQUIRE(svd.singularValues()[n - 1] < 1e-12 * svd.singularValues()[0]);
    CHECK((op.bx * op.rx * z).norm() < 1e-12);
    CHECK((op.by * op.ry * z).norm() < 1e-12);
}

TEST_CASE("analytic solution is recovered") {
    const ProblemSpec p = ProblemSpec::analytic();
    const int d = 8;
    const SolutionBundle b = solve_fs(p, d, SchemeConfig::profile_a());
    CHECK(b.report.converged);
    // Node ((i+1)h, (j+1)h) = (0.5, 0.25).
    const std::uint64_t n = 256;
    CHECK(b.u.at(127 + n * 63) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
}

TEST_CASE("energy and extrapolation") {
    CHECK(richardson(1.0, 2.0) == doctest::Approx(7.0 / 3.0));
    CHECK(richardson(3.0, 3.0) == doctest::Approx(3.0));
    const TTVector u = qtt_ones(4), f = scale(2.0, qtt_ones(4));
    CHECK(energy_functional(u, f, 0.25) == doctest::Approx(0.0625 * 32.0));
}
