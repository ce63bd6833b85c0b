#pragma once

// Derivative-free finite-sum discretization of
//
//   -d/dx(k_x du/dx) - d/dy(k_y du/dy) = f  on [0,1]^2,  u = 0 on the boundary,
//
// assembled and solved in QTT format.  The unknowns are split as
// f = mu + (f - mu), with
//
//   (H_x + H_y) mu = H_y f,   u_x = R_x mu,   u_y = R_y (f - mu),   u = B_x u_x,
//
// where B is the rectangle-rule antiderivative and
//
//   R_x = K_x^{-1} (I - W_x K_x^{-1}) B_x^T,   H_x = B_x R_x,   W_x = Q_x (x) E.
//
// Grid values: u and f at cell corners ((i+1)h, (j+1)h), k_x and u_x at
// ((i+1/2)h, (j+1)h), k_y and u_y at ((i+1)h, (j+1/2)h).  x is the fast index.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fsqtt/amen.hpp"
#include "fsqtt/constructors.hpp"
#include "fsqtt/cross.hpp"
#include "fsqtt/tt.hpp"

namespace fsqtt {

using Field2D = std::function<double(double, double)>;

struct PointSource {
    double x;
    double y;
    double weight;
};

struct ProblemSpec {
    std::string name;
    Field2D kx;
    Field2D ky;
    /// Empty when the right-hand side is a list of point sources.
    Field2D f;
    std::vector<PointSource> point_sources;
    /// Closed-form solution and its partials, when known.
    Field2D exact_u;
    Field2D exact_ux;
    Field2D exact_uy;

    bool has_exact() const { return static_cast<bool>(exact_u); }

    /// k = 1 + x y^2, u = sin(pi x^2) sin(2 pi y).
    static ProblemSpec analytic();
    /// k = 1 + x y^2, f = 1.
    static ProblemSpec constant_rhs();
    /// k = 1 + x y^2, unit sources at (0.2|0.8, 0.2|0.8).
    static ProblemSpec point_sources_preset();
    /// "analytic", "constant-rhs" or "point-sources".
    static ProblemSpec preset(const std::string& name);
};

struct SchemeConfig {
    Tolerance tau_round = 1e-12;
    Tolerance tau_cross = 1e-12;
    LinSolveConfig amen;
    std::size_t rmax = kDefaultRmax;
    std::uint64_t seed = 1;

    /// AMEn 1e-10, rounding and cross 1e-12.
    static SchemeConfig profile_a();
    /// AMEn 1e-6, rounding and cross 1e-8.
    static SchemeConfig profile_b();

    CrossConfig cross_config() const;
};

struct DiscretizedProblem {
    GridSpec grid;
    TTVector f;
    TTVector kx_inv;
    TTVector ky_inv;
    bool cross_converged = true;
};

enum class Axis { x, y };

struct OperatorSet {
    TTMatrix bx, by, wx, wy, rx, ry, hx, hy;
    /// H_x + H_y after rounding.
    TTMatrix a;
    TTVector qx, qy;
    /// Max bond rank of H_x + H_y before the final rounding, and its bound.
    Index a_rank_pre_round = 0;
    Index a_rank_bound = 0;
    Index hy_rank_bound = 0;
    bool rank_capped = false;
};

struct RankCheck {
    Index a_pre_round = 0;
    Index a_bound = 0;
    Index rhs_pre_round = 0;
    Index rhs_bound = 0;
};

struct SolutionBundle {
    TTVector u, ux, uy, mu;
    LinSolveReport report;
    /// Keys: kxinv, kyinv, qx, qy, Hx, Hy, A, u.
    std::map<std::string, double> eranks;
    /// Seconds.  Keys: assemble, solve, total.
    std::map<std::string, double> timings;
    RankCheck ranks;
    TTVector f;
};

/// Coordinate fields of length 2^{2d}: x or y at corner (shift 1) or
/// midpoint (shift 1/2) positions.
TTVector coordinate_field(Axis axis, double shift, int d, Tolerance tol);

DiscretizedProblem discretize_problem(const ProblemSpec& p, int d, const SchemeConfig& cfg);

/// Nearest grid node ((i+1)h) to a, ties toward the lower index.
std::uint64_t nearest_node(double a, int d);

struct WResult {
    TTVector q;
    TTMatrix w;
};

WResult build_w(Axis axis, const TTVector& k_inv, int d, const SchemeConfig& cfg);

/// Rounding tolerance for the operator products: tau_round capped at h^2 / 100,
/// floored at 1e-14.
Tolerance operator_tolerance(Tolerance tau_round, int d);

OperatorSet assemble_operators(const DiscretizedProblem& dp, const SchemeConfig& cfg);

SolutionBundle solve_fs(const ProblemSpec& p, int d, const SchemeConfig& cfg);

/// h^2 (u, f).
double energy_functional(const TTVector& u, const TTVector& f, double h);
/// (4 J_{h/2} - J_h) / 3.
double richardson(double j_h, double j_half_h);

}  // namespace fsqtt
