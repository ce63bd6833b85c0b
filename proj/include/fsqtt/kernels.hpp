#pragma once

// Core-level contraction kernels.  Every kernel has a plain serial version,
// kept as the reference the tests compare against, and an OpenMP version
// used by the library.

#include <vector>

#include <Eigen/Core>

#include "fsqtt/tt.hpp"

namespace fsqtt {

/// Three-index interface tensor (bra, op, ket) produced by contracting the
/// left or right part of a sandwich <y| A |x>, stored bra-fastest.
struct Interface {
    Index bra = 1;
    Index op = 1;
    Index ket = 1;
    std::vector<double> data;

    Interface() : data(1, 1.0) {}
    Interface(Index p, Index a, Index q) : bra(p), op(a), ket(q), data(p * a * q, 0.0) {}

    double& operator()(Index p, Index a, Index q) { return data[p + bra * (a + op * q)]; }
    double operator()(Index p, Index a, Index q) const { return data[p + bra * (a + op * q)]; }
};

namespace kernels {

/// Core of A*x: Y[(al + ra*a), i, (be + rb*b)] = sum_j A[al, i + rows*j, be] X[a, j, b].
Core matvec_core_serial(const Core& a, Index rows, Index cols, const Core& x);
Core matvec_core_parallel(const Core& a, Index rows, Index cols, const Core& x);

/// Core of A*B with merged output mode i + rows*k.
Core matmat_core_serial(const Core& a, Index rows, Index inner, const Core& b, Index cols);
Core matmat_core_parallel(const Core& a, Index rows, Index inner, const Core& b, Index cols);

/// Dense projected operator of one-site ALS:
/// B[(a,i,b),(a2,j,b2)] = sum_{al,be} left(a,al,a2) A[al, i + n j, be] right(b,be,b2),
/// with local vector index a + rl*(i + n*b).
Eigen::MatrixXd local_operator_serial(const Interface& left, const Core& a, Index n,
                                      const Interface& right);
Eigen::MatrixXd local_operator_parallel(const Interface& left, const Core& a, Index n,
                                        const Interface& right);

/// y = B x for the same projected operator without forming B.
Core local_apply(const Interface& left, const Core& a, Index n, const Core& x,
                 const Interface& right);

/// Left interface update: out(p1, be, q1) = sum bra(p,i,p1) left(p,al,q) A[al,i+n j,be] ket(q,j,q1).
Interface left_step(const Interface& left, const Core& bra, const Core& a, Index n, const Core& ket);
/// Right interface update: out(p, al, q) = sum bra(p,i,p1) A[al,i+n j,be] ket(q,j,q1) right(p1,be,q1).
Interface right_step(const Interface& right, const Core& bra, const Core& a, Index n, const Core& ket);

/// Projections without an operator, out(p1, q1) = sum_{p,q,i} bra(p,i,p1) left(p,q) ket(q,i,q1).
Eigen::MatrixXd left_step(const Eigen::MatrixXd& left, const Core& bra, const Core& ket);
Eigen::MatrixXd right_step(const Eigen::MatrixXd& right, const Core& bra, const Core& ket);

}  // namespace kernels
}  // namespace fsqtt
