#include <cmath>

#include <doctest.h>

#include "fsqtt/fd_reference.hpp"
#include "test_util.hpp"

using namespace fsqtt;
using namespace fsqtt::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Five-point stencil written out node by node.  Nodes on the last row or
// column of either axis are pinned by that axis' block.
MatrixXd stencil(const ProblemSpec& p, int d) {
    const Eigen::Index n = Eigen::Index(1) << d;
    const double h = 1.0 / double(n);
    MatrixXd a = MatrixXd::Zero(n * n, n * n);
    auto id = [n](Eigen::Index i, Eigen::Index j) { return i + n * j; };
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = double(i + 1) * h, y = double(j + 1) * h;
            const Eigen::Index r = id(i, j);
            if (i == n - 1) {
                a(r, r) += 1.0;
            } else {
                const double kw = p.kx(x - h / 2, y), ke = p.kx(x + h / 2, y);
                a(r, r) += (kw + ke) / (h * h);
                if (i > 0) a(r, id(i - 1, j)) -= kw / (h * h);
                if (i + 1 < n - 1) a(r, id(i + 1, j)) -= ke / (h * h);
            }
            if (j == n - 1) {
                a(r, r) += 1.0;
            } else {
                const double ks = p.ky(x, y - h / 2), kn = p.ky(x, y + h / 2);
                a(r, r) += (ks + kn) / (h * h);
                if (j > 0) a(r, id(i, j - 1)) -= ks / (h * h);
                if (j + 1 < n - 1) a(r, id(i, j + 1)) -= kn / (h * h);
            }
        }
    return a;
}

}  // namespace

TEST_CASE("assembled matrix matches the five-point stencil") {
    const ProblemSpec p = ProblemSpec::analytic();
    for (int d = 1; d <= 4; ++d) {
        CAPTURE(d);
        const DenseSystem sys = fd_assemble_dense(p, d);
        const MatrixXd want = stencil(p, d);
        CHECK((MatrixXd(sys.matrix) - want).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("right-hand side is masked on pinned nodes") {
    const DenseSystem sys = fd_assemble_dense(ProblemSpec::constant_rhs(), 2);
    for (Eigen::Index j = 0; j < 4; ++j)
        for (Eigen::Index i = 0; i < 4; ++i) CHECK(sys.rhs[i + 4 * j] == ((i < 3 && j < 3) ? 1.0 : 0.0));
}

TEST_CASE("d = 1 solution") {
    const VectorXd u = fd_solve_dense(fd_assemble_dense(ProblemSpec::constant_rhs(), 1));
    // 1 / (4 (k(1/4,1/2) + k(3/4,1/2) + k(1/2,1/4) + k(1/2,3/4))).
    CHECK(u[0] == doctest::Approx(1.0 / 18.25).epsilon(1e-14));
    CHECK(u.tail(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero source gives zero") {
    ProblemSpec p = ProblemSpec::constant_rhs();
    p.f = [](double, double) { return 0.0; };
    CHECK(fd_solve_dense(fd_assemble_dense(p, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid caps and bad samples") {
    CHECK_THROWS_AS(fd_assemble_dense(ProblemSpec::analytic(), kFdDenseMaxD + 1), std::out_of_range);
    CHECK_THROWS_AS(dense_scheme_operators(ProblemSpec::analytic(), kDenseSchemeMaxD + 1), std::out_of_range);
    CHECK_THROWS_AS(sample_grid([](double x, double) { return 1.0 / (x - 0.5); }, 1, 0.0, 1.0), DomainError);
}

TEST_CASE("full dense solution carries the partials") {
    const ProblemSpec p = ProblemSpec::analytic();
    const FdDenseSolution s = fd_solve_dense_full(p, 4);
    CHECK(s.residual <= 1e-12);
    // u_x at the first midpoint is u / h there.
    CHECK(s.ux[0] == doctest::Approx(s.u[0] * 16.0));
    CHECK(s.uy[0] == doctest::Approx(s.u[0] * 16.0));
}

TEST_CASE("QTT finite differences agree with the dense solver") {
    SchemeConfig cfg = SchemeConfig::profile_a();
    for (const char* name : {"analytic", "constant-rhs", "point-sources"}) {
        const ProblemSpec p = ProblemSpec::preset(name);
        for (int d = 2; d <= 6; ++d) {
            CAPTURE(name);
            CAPTURE(d);
            const SolutionBundle b = fd_solve_qtt(p, d, cfg);
            CHECK(b.report.converged);
            const FdDenseSolution s = fd_solve_dense_full(p, d);
            CHECK(rel_diff(dense(b.u), s.u) < 1e-8);
            CHECK(rel_diff(dense(b.ux), s.ux) < 1e-8);
            CHECK(b.eranks.count("A") == 1);
            CHECK(b.eranks.count("Hx") == 0);
        }
    }
}

TEST_CASE("finite-sum and finite-difference operators are inverse on the interior") {
    // A_x H_x = I (x) J at d = 1 is diag(1, 0, 1, 0).
    const ProblemSpec p = ProblemSpec::analytic();
    for (int d = 1; d <= 4; ++d) {
        CAPTURE(d);
        CHECK(check_scheme_fd_identity(p, d) <= 1e-10);
        CHECK(check_scheme_fd_identity(ProblemSpec::point_sources_preset(), d) <= 1e-10);
    }
}

TEST_CASE("finite-sum and finite-difference solutions coincide") {
    for (const char* name : {"analytic", "constant-rhs", "point-sources"}) {
        const ProblemSpec p = ProblemSpec::preset(name);
        for (int d = 1; d <= 4; ++d) {
            CAPTURE(name);
            CAPTURE(d);
            CHECK(rel_diff(dense_scheme_solve(p, d).u, fd_solve_dense(fd_assemble_dense(p, d))) < 1e-10);
        }
    }
}

TEST_CASE("restriction to a coarser grid") {
    const int df = 4, dc = 2;
    const TTVector u = random_tt(twos(2 * df), 3, 71);
    const VectorXd fine = dense(u);
    const VectorXd coarse = dense(restrict_solution(u, df, dc));
    REQUIRE(coarse.size() == 16);
    for (Eigen::Index j = 0; j < 4; ++j)
        for (Eigen::Index i = 0; i < 4; ++i) {
            const Eigen::Index fi = (i + 1) * 4 - 1, fj = (j + 1) * 4 - 1;
            CHECK(coarse[i + 4 * j] == doctest::Approx(fine[fi + 16 * fj]).epsilon(1e-13));
        }
    CHECK(rel_diff(dense(restrict_solution(u, df, df)), fine) == 0.0);
    CHECK_THROWS_AS(restrict_solution(u, df, df + 1), std::invalid_argument);
    CHECK_THROWS_AS(restrict_solution(u, df, 0), std::invalid_argument);
    CHECK_THROWS_AS(restrict_solution(u, df + 1, 2), DimensionError);
}
