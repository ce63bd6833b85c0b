#pragma once

// Experiment runner: solve a preset over a range of grid factors and collect
// errors, effective ranks, energies and timings as CSV rows.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsqtt/scheme.hpp"

namespace fsqtt {

enum class SolverKind { fs_qtt, fd_qtt, fd_dense };

SolverKind parse_solver(const std::string& name);
std::string solver_name(SolverKind s);

inline constexpr int kFdQttMaxD = 15;

struct RunConfig {
    std::string problem = "analytic";
    SolverKind solver = SolverKind::fs_qtt;
    int d_min = 5;
    int d_max = 5;
    SchemeConfig scheme = SchemeConfig::profile_a();
    /// Accuracy of the cross-built analytic reference fields.
    double reference_tol = 1e-14;
    /// Saved per d as <path> (single d) or <path>.d<d> (range).
    std::string dump_path;
    std::optional<int> restrict_to;

    /// Throws std::invalid_argument on an empty range or a solver cap.
    void validate() const;
};

struct RunRecord {
    std::string solver;
    std::string problem;
    int d = 0;
    double time_total = 0.0;
    double time_assemble = 0.0;
    double time_solve = 0.0;
    std::optional<double> erank_kxinv, erank_kyinv, erank_qx, erank_qy, erank_hx, erank_hy, erank_a, erank_u;
    std::optional<double> err_u, err_ux, err_uy;
    double energy = 0.0;
    std::optional<double> energy_re_diff;
    double residual = 0.0;
    bool converged = false;
    /// Set when the solve threw; the row then carries only solver/problem/d.
    std::string failure;
};

struct RelError {
    double value = 0.0;
    /// True when the reference was zero and the absolute norm was returned.
    bool absolute = false;
};

/// ||a - b|| / ||b||.
RelError rel_error(const TTVector& a, const TTVector& b);

struct ReferenceFields {
    TTVector u, ux, uy;
    bool converged = true;
};

/// Cross-built exact u, u_x, u_y on the staggered points.
ReferenceFields build_reference(const ProblemSpec& p, int d, double tol, std::uint64_t seed = 1);

std::vector<RunRecord> run_experiment(const RunConfig& cfg);

extern const char* const kCsvHeader;
void write_csv(std::ostream& os, const std::vector<RunRecord>& rows);

}  // namespace fsqtt
