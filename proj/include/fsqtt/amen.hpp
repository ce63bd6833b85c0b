#pragma once

// Alternating minimal energy (AMEn) solver for A x = b in TT format.

#include <cstdint>
#include <optional>

#include "fsqtt/tt.hpp"

namespace fsqtt {

enum class LocalSolver { direct_dense };

struct LinSolveConfig {
    Tolerance tol = 1e-8;
    int max_sweeps = 40;
    Index enrichment_rank = 4;
    LocalSolver local_solver = LocalSolver::direct_dense;
    std::size_t rmax = kDefaultRmax;
    std::uint64_t seed = 12345;
    /// Relative singular value cutoff of the least-squares fallback used for
    /// rank-deficient local systems.
    double pinv_cutoff = 1e-13;
    bool verbose = false;

    void validate() const;
};

struct LinSolveReport {
    double final_residual = 0.0;
    int sweeps_used = 0;
    bool converged = false;
    Index max_rank_seen = 1;
    bool rank_capped = false;
};

struct LinSolveResult {
    TTVector x;
    LinSolveReport report;
};

LinSolveResult amen_solve(const TTMatrix& a, const TTVector& b, const LinSolveConfig& cfg,
                          const std::optional<TTVector>& x0 = std::nullopt);

/// ||A x - b|| / ||b|| (absolute when b = 0), products rounded at 1e-14.
double residual(const TTMatrix& a, const TTVector& x, const TTVector& b);

}  // namespace fsqtt
