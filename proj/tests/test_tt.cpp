#include <cmath>
#include <numeric>

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "fsqtt/constructors.hpp"
#include "fsqtt/tt.hpp"
#include "test_util.hpp"

using namespace fsqtt;
using namespace fsqtt::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("tolerance rejects values outside [0, 1)") {
    CHECK_THROWS_AS(Tolerance(-1e-3), std::invalid_argument);
    CHECK_THROWS_AS(Tolerance(1.0), std::invalid_argument);
    CHECK_NOTHROW(Tolerance(0.0));
}

TEST_CASE("full tensor round trip") {
    const std::vector<Index> modes = {2, 3, 4};
    std::vector<double> data(24);
    std::iota(data.begin(), data.end(), 1.0);
    const TTVector x = from_full(data, modes, 0.0);
    const std::vector<double> back = to_full(x);
    for (std::size_t i = 0; i < data.size(); ++i) CHECK(back[i] == doctest::Approx(data[i]).epsilon(1e-13));

    SUBCASE("little-endian flattening") {
        // linear index i1 + 2 i2 + 6 i3
        const Index idx[] = {1, 2, 3};
        CHECK(x.element(idx) == doctest::Approx(data[1 + 2 * 2 + 6 * 3]));
        CHECK(x.at(17) == doctest::Approx(18.0));
    }
    SUBCASE("shape errors") {
        const std::vector<double> bad(5, 0.0);
        CHECK_THROWS_AS(from_full(bad, modes, 0.0), DimensionError);
        const Index out[] = {2, 0, 0};
        CHECK_THROWS_AS(x.element(out), std::out_of_range);
    }
}

TEST_CASE("to_full refuses oversized tensors") {
    const TTVector big = qtt_ones(40);
    CHECK_THROWS_AS(to_full(big), OversizeError);
}

TEST_CASE("axpby of constructors") {
    const TTVector v = axpby(2.0, qtt_xfun(2), 3.0, qtt_ones(2));
    const VectorXd want = (VectorXd(4) << 3, 5, 7, 9).finished();
    CHECK(rel_diff(dense(v), want) < 1e-15);
    // Ranks add without rounding.
    CHECK(v.ranks() == std::vector<Index>{1, 3, 1});
}

TEST_CASE("dot, norm and sum against dense") {
    const std::vector<Index> modes = {2, 3, 2, 2};
    const TTVector x = random_tt(modes, 3, 1), y = random_tt(modes, 4, 2);
    const VectorXd dx = dense(x), dy = dense(y);
    CHECK(dot(x, y) == doctest::Approx(dx.dot(dy)).epsilon(1e-12));
    CHECK(norm(x) == doctest::Approx(dx.norm()).epsilon(1e-12));
    CHECK(sum(x) == doctest::Approx(dx.sum()).epsilon(1e-12));
    // Norm stays accurate for a tiny difference of large terms.
    const TTVector z = axpby(1.0, x, -1.0, axpby(1.0, x, 1e-9, y));
    CHECK(norm(z) == doctest::Approx(1e-9 * dy.norm()).epsilon(1e-5));
}

TEST_CASE("rounding contract") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TTVector x = random_tt(twos(4), 8, seed);
        const TTVector y = axpby(1.0, x, 1.0, random_tt(twos(4), 2, seed + 100));
        for (double tol : {1e-2, 1e-6, 1e-12}) {
            const TTVector r = round(y, tol);
            CHECK(rel_diff(dense(r), dense(y)) <= tol * (1 + 1e-10));
            CHECK(norm(axpby(1.0, r, -1.0, y)) <= tol * norm(y) * (1 + 1e-8));
        }
    }
    SUBCASE("large d, norm based") {
        const TTVector x = axpby(1.0, qtt_xfun(30), 0.5, qtt_ones(30));
        const TTVector y = axpby(1.0, x, 1.0, x);  // rank 6, exact rank 2
        const TTVector r = round(y, 1e-12);
        CHECK(r.max_rank() == 2);
        CHECK(norm(axpby(1.0, r, -1.0, y)) <= 1e-12 * norm(y));
    }
    SUBCASE("rank cap is reported") {
        RoundInfo info;
        const TTVector r = round(random_tt(twos(6), 6, 9), 1e-14, 2, &info);
        CHECK(info.rank_capped);
        CHECK(r.max_rank() <= 2);
    }
    SUBCASE("zero tensor") {
        const TTVector z = axpby(1.0, qtt_ones(3), -1.0, qtt_ones(3));
        const TTVector r = round(z, 1e-8);
        CHECK(r.max_rank() == 1);
        CHECK(norm(r) <= 1e-15);
    }
}

TEST_CASE("kron places the fast factor first") {
    const TTVector slow = random_tt(twos(2), 2, 3), fast = random_tt(twos(3), 2, 4);
    const TTVector k = kron(slow, fast);
    CHECK(k.dim() == 5);
    const VectorXd want = Eigen::kroneckerProduct(dense(slow), dense(fast)).eval();
    CHECK(rel_diff(dense(k), want) < 1e-14);
    CHECK(k.max_rank() <= 2);

    const TTMatrix b = qtt_volterra(2);
    const TTMatrix ib = kron(qtt_eye(2), b);
    const MatrixXd wantm = Eigen::kroneckerProduct(MatrixXd::Identity(4, 4), to_dense(b)).eval();
    CHECK((to_dense(ib) - wantm).cwiseAbs().maxCoeff() < 1e-14);
    const VectorXd v = dense(random_tt(twos(4), 3, 5));
    CHECK(rel_diff(dense(matvec(ib, from_dense(v, twos(4)))), VectorXd(wantm * v)) < 1e-14);
}

TEST_CASE("matvec and matmat against dense") {
    const TTMatrix a = random_tt_matrix(twos(3), twos(3), 3, 11);
    const TTVector x = random_tt(twos(3), 2, 12);
    const TTVector y = matvec(a, x);
    CHECK(rel_diff(dense(y), VectorXd(to_dense(a) * dense(x))) < 1e-12);
    // Product ranks multiply.
    for (Index k = 0; k <= 3; ++k) CHECK(y.ranks()[k] == a.ranks()[k] * x.ranks()[k]);

    const TTMatrix b = random_tt_matrix(twos(3), twos(3), 2, 13);
    const TTMatrix ab = matmat(a, b);
    CHECK(rel_diff(to_dense(ab), MatrixXd(to_dense(a) * to_dense(b))) < 1e-12);

    SUBCASE("rectangular cores") {
        const TTMatrix r = random_tt_matrix({2, 3}, {3, 2}, 2, 14);
        const TTVector v = random_tt({3, 2}, 2, 15);
        CHECK(rel_diff(dense(matvec(r, v)), VectorXd(to_dense(r) * dense(v))) < 1e-12);
        CHECK_THROWS_AS(matvec(r, random_tt({2, 3}, 2, 1)), DimensionError);
    }
    SUBCASE("volterra examples") {
        const VectorXd want = (VectorXd(4) << 0.25, 0.5, 0.75, 1.0).finished();
        CHECK(rel_diff(dense(matvec(qtt_volterra(2), qtt_ones(2))), want) < 1e-15);
        const TTMatrix b1 = qtt_volterra(1);
        const MatrixXd bbt = to_dense(matmat(b1, transpose(b1)));
        const MatrixXd want2 = (MatrixXd(2, 2) << 0.25, 0.25, 0.25, 0.5).finished();
        CHECK((bbt - want2).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("sums of matrices add ranks") {
    const TTMatrix a = random_tt_matrix(twos(3), twos(3), 2, 21), b = random_tt_matrix(twos(3), twos(3), 3, 22);
    const TTMatrix s = add(a, b);
    CHECK(rel_diff(to_dense(s), MatrixXd(to_dense(a) + to_dense(b))) < 1e-13);
    for (Index k = 1; k < 3; ++k) CHECK(s.ranks()[k] == a.ranks()[k] + b.ranks()[k]);
}

TEST_CASE("transpose") {
    const TTMatrix a = random_tt_matrix({2, 3, 2}, {3, 2, 2}, 3, 31);
    const TTMatrix t = transpose(a);
    CHECK(t.ranks() == a.ranks());
    CHECK((to_dense(t) - to_dense(a).transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((to_dense(transpose(t)) - to_dense(a)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diag") {
    const MatrixXd d = to_dense(diag(qtt_xfun(2)));
    CHECK((d - VectorXd::LinSpaced(4, 0, 3).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() == 0.0);
    const TTVector v = random_tt(twos(4), 2, 41), w = random_tt(twos(4), 3, 42);
    CHECK(rel_diff(dense(matvec(diag(v), w)), VectorXd(dense(v).cwiseProduct(dense(w)))) < 1e-13);
    CHECK(diag(v).ranks() == v.ranks());
}

TEST_CASE("matrix from dense") {
    const MatrixXd m = MatrixXd::Random(8, 8);
    const TTMatrix a = matrix_from_dense(m, twos(3), twos(3), 0.0);
    CHECK((to_dense(a) - m).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(a.at(5, 3) == doctest::Approx(m(5, 3)));
}

TEST_CASE("randomized product rounding matches exact rounding") {
    // Operator and vector ranks large enough to take the sketching path.
    const TTMatrix a = random_tt_matrix(twos(8), twos(8), 12, 51);
    const TTVector x = random_tt(twos(8), 14, 52);
    const TTVector exact = matvec(a, x);
    for (double tol : {1e-3, 1e-8}) {
        const TTVector y = matvec_round(a, x, tol);
        CHECK(norm(axpby(1.0, y, -1.0, exact)) <= 10 * tol * norm(exact));
    }
}

TEST_CASE("effective rank") {
    // d = 3 with modes 2: 2 R^2 + 4 R = P.
    std::vector<Core> cores = {Core(1, 2, 2), Core(2, 2, 2), Core(2, 2, 1)};
    CHECK(erank(TTVector(cores)) == doctest::Approx(2.0));
    CHECK(erank(qtt_ones(5)) == doctest::Approx(1.0));
    CHECK(erank(qtt_ones(1)) == doctest::Approx(1.0));
    const TTVector x = random_tt(twos(6), 5, 61);
    CHECK(erank(x) >= 1.0);
    CHECK(erank(x) <= 5.0 + 1e-12);
}
