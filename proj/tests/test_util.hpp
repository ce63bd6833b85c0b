#pragma once

// Shared helpers for the unit tests: random trains and dense views.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fsqtt/tt.hpp"

namespace fsqtt::testing {

inline Core random_core(Index l, Index n, Index r, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Core c(l, n, r);
    for (double& v : c.data) v = nd(gen);
    return c;
}

/// Random train with the given modes and interior bond rank.
inline TTVector random_tt(const std::vector<Index>& modes, Index rank, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<Core> cores;
    const Index d = modes.size();
    for (Index k = 0; k < d; ++k) {
        const Index l = k == 0 ? 1 : rank;
        const Index r = k + 1 == d ? 1 : rank;
        cores.push_back(random_core(l, modes[k], r, gen));
    }
    return TTVector(std::move(cores));
}

inline TTMatrix random_tt_matrix(const std::vector<Index>& rows, const std::vector<Index>& cols, Index rank,
                                 std::uint64_t seed) {
    std::vector<Index> merged(rows.size());
    for (Index k = 0; k < rows.size(); ++k) merged[k] = rows[k] * cols[k];
    return TTMatrix(rows, cols, random_tt(merged, rank, seed));
}

inline std::vector<Index> twos(int d) { return std::vector<Index>(std::size_t(d), 2); }

inline Eigen::VectorXd dense(const TTVector& x) {
    const std::vector<double> f = to_full(x);
    return Eigen::Map<const Eigen::VectorXd>(f.data(), Eigen::Index(f.size()));
}

inline TTVector from_dense(const Eigen::VectorXd& v, const std::vector<Index>& modes, double tol = 0.0) {
    return from_full(std::span<const double>(v.data(), std::size_t(v.size())), modes, tol);
}

inline double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }
inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace fsqtt::testing
