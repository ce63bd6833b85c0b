#include <random>

#include <doctest.h>

#include "fsqtt/kernels.hpp"
#include "test_util.hpp"

using namespace fsqtt;
using namespace fsqtt::testing;
using Eigen::MatrixXd;

namespace {

Interface random_interface(Index p, Index a, Index q, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Interface f(p, a, q);
    for (double& v : f.data) v = nd(gen);
    return f;
}

double max_abs_diff(const Core& a, const Core& b) {
    REQUIRE(a.left == b.left);
    REQUIRE(a.mode == b.mode);
    REQUIRE(a.right == b.right);
    double m = 0.0;
    for (Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

double max_abs_diff(const Interface& a, const Interface& b) {
    REQUIRE(a.data.size() == b.data.size());
    double m = 0.0;
    for (Index i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
    std::mt19937_64 gen(3);
    for (auto [ra, rx] : {std::pair<Index, Index>{1, 1}, {3, 2}, {7, 5}, {12, 9}}) {
        const Core a = random_core(ra, 4, ra + 1, gen);
        const Core x = random_core(rx, 2, rx + 2, gen);
        CHECK(max_abs_diff(kernels::matvec_core_serial(a, 2, 2, x), kernels::matvec_core_parallel(a, 2, 2, x)) <
              1e-12);
        const Core b = random_core(rx, 4, rx, gen);
        CHECK(max_abs_diff(kernels::matmat_core_serial(a, 2, 2, b, 2), kernels::matmat_core_parallel(a, 2, 2, b, 2)) <
              1e-12);
        const Interface l = random_interface(rx, ra, rx, 7), r = random_interface(rx + 2, ra + 1, rx + 2, 8);
        const MatrixXd s = kernels::local_operator_serial(l, a, 2, r);
        const MatrixXd p = kernels::local_operator_parallel(l, a, 2, r);
        CHECK((s - p).cwiseAbs().maxCoeff() < 1e-11 * (1 + s.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("local_apply equals the assembled local operator times x") {
    std::mt19937_64 gen(5);
    const Index ra = 4, rl = 3, rr = 5, n = 2;
    const Core a = random_core(ra, n * n, ra + 1, gen);
    const Interface l = random_interface(rl, ra, rl, 1), r = random_interface(rr, ra + 1, rr, 2);
    const Core x = random_core(rl, n, rr, gen);
    const MatrixXd m = kernels::local_operator_serial(l, a, n, r);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data.data(), Eigen::Index(x.size()));
    const Eigen::VectorXd want = m * xv;
    const Core y = kernels::local_apply(l, a, n, x, r);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data.data(), Eigen::Index(y.size()));
    CHECK((yv - want).norm() < 1e-12 * want.norm());
}

TEST_CASE("interface sweeps reproduce the bilinear form") {
    // <y, A x> through left steps and through right steps.
    const int d = 4;
    const TTMatrix a = random_tt_matrix(twos(d), twos(d), 3, 41);
    const TTVector x = random_tt(twos(d), 2, 42), y = random_tt(twos(d), 3, 43);
    const double want = dense(y).dot(to_dense(a) * dense(x));
    Interface left;
    for (Index k = 0; k < Index(d); ++k) left = kernels::left_step(left, y.core(k), a.core(k), 2, x.core(k));
    CHECK(left.data.size() == 1);
    CHECK(left.data[0] == doctest::Approx(want).epsilon(1e-12));
    Interface right;
    for (Index k = Index(d); k-- > 0;) right = kernels::right_step(right, y.core(k), a.core(k), 2, x.core(k));
    CHECK(right.data[0] == doctest::Approx(want).epsilon(1e-12));

    MatrixXd lv = MatrixXd::Ones(1, 1), rv = MatrixXd::Ones(1, 1);
    for (Index k = 0; k < Index(d); ++k) lv = kernels::left_step(lv, y.core(k), x.core(k));
    for (Index k = Index(d); k-- > 0;) rv = kernels::right_step(rv, y.core(k), x.core(k));
    CHECK(lv(0, 0) == doctest::Approx(dot(y, x)).epsilon(1e-12));
    CHECK(rv(0, 0) == doctest::Approx(dot(y, x)).epsilon(1e-12));
}
