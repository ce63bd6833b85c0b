#pragma once

// TT-cross interpolation: build a train from entry evaluations only.

#include <cstdint>
#include <functional>
#include <span>

#include "fsqtt/tt.hpp"

namespace fsqtt {

struct CrossConfig {
    Tolerance tol = 1e-10;
    int max_sweeps = 20;
    Index initial_rank = 4;
    Index rank_step = 2;
    Index validation_size = 64;
    std::uint64_t seed = 1;
    std::size_t rmax = kDefaultRmax;

    void validate() const;
};

struct CrossResult {
    TTVector tt;
    bool converged = false;
    /// Relative RMS error on the validation sample, after the final rounding.
    double validation_error = 0.0;
    int sweeps = 0;
    std::uint64_t evaluations = 0;
};

using EntryFunction = std::function<double(std::span<const Index>)>;
using ElementwiseFunction = std::function<double(std::span<const double>)>;

CrossResult cross_from_indices(const EntryFunction& eval, std::span<const Index> shape, const CrossConfig& cfg);

/// fn applied entrywise to one or more trains of equal shape.
CrossResult cross_elementwise(const ElementwiseFunction& fn, std::span<const TTVector> args, const CrossConfig& cfg);

/// Rows of a tall matrix spanning a dominant (quasi maximum volume) square
/// submatrix.  Ties are broken toward the lowest index.
std::vector<Index> maxvol(const Eigen::MatrixXd& a, double tol = 1e-2, int max_iters = 200);

}  // namespace fsqtt
