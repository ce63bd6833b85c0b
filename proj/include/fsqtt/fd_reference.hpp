#pragma once

// Second-order finite-difference reference for the same boundary value
// problem, on the same staggered grid:
//
//   A_x = (I (x) J)(I (x) B^-T) K_x (I (x) B^-1)(I (x) J) + I (x) Z
//   A_y = (J (x) I)(B^-T (x) I) K_y (B^-1 (x) I)(J (x) I) + Z (x) I
//   (A_x + A_y) u = (J (x) J) f
//
// Z pins the nodes on the x = 1 and y = 1 lines; J removes them from the
// stencil.  Also holds a dense realization of the finite-sum operators for
// small grids, used as an oracle.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fsqtt/scheme.hpp"

namespace fsqtt {

inline constexpr int kFdDenseMaxD = 7;
inline constexpr int kDenseSchemeMaxD = 5;

/// Assembled finite-difference system.  Stored sparse; at the capped sizes
/// this is the same system a dense solver would see.
struct DenseSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    int d = 0;
};

/// Right-hand side on the corner nodes, x fastest.  Point sources use the
/// same nearest-node rule as the QTT path.
Eigen::VectorXd sample_rhs(const ProblemSpec& p, int d);

/// Samples fn at ((i + sx) h, (j + sy) h).
Eigen::VectorXd sample_grid(const Field2D& fn, int d, double sx, double sy);

DenseSystem fd_assemble_dense(const ProblemSpec& p, int d);

/// Throws DomainError if the relative residual exceeds 1e-12.
Eigen::VectorXd fd_solve_dense(const DenseSystem& sys);

struct FdDenseSolution {
    Eigen::VectorXd u, ux, uy;
    double residual = 0.0;
    double time_assemble = 0.0;
    double time_solve = 0.0;
};

FdDenseSolution fd_solve_dense_full(const ProblemSpec& p, int d);

/// QTT version of the finite-difference solver.  u, ux and uy are filled,
/// mu is empty; eranks carry A and u.
SolutionBundle fd_solve_qtt(const ProblemSpec& p, int d, const SchemeConfig& cfg);

/// Dense finite-sum operators, d <= 5.
struct DenseSchemeOperators {
    Eigen::MatrixXd bx, by, rx, ry, hx, hy;
    Eigen::VectorXd qx, qy;
};

DenseSchemeOperators dense_scheme_operators(const ProblemSpec& p, int d);

/// u, ux, uy of the finite-sum scheme solved densely (minimum-norm mu).
struct DenseSchemeSolution {
    Eigen::VectorXd u, ux, uy, mu;
};

DenseSchemeSolution dense_scheme_solve(const ProblemSpec& p, int d);

/// max |A_x H_x - I (x) J| and |A_y H_y - J (x) I| over all entries, d <= 5.
double check_scheme_fd_identity(const ProblemSpec& p, int d);

/// Values of a fine-grid field at the nodes of a coarser grid: coarse index
/// i maps to fine index (i + 1) 2^(d_f - d_c) - 1 along each axis.
TTVector restrict_solution(const TTVector& u, int d_fine, int d_coarse);

}  // namespace fsqtt
