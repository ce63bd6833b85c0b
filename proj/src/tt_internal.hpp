#pragma once

// Library-internal TT helpers shared by rounding, cross and the solver.

#include <cstdint>
#include <vector>

#include "fsqtt/tt.hpp"

namespace fsqtt::detail {

/// QR of core k's left unfolding; R is pushed into core k+1.
void left_orthogonalize(std::vector<Core>& cores, Index k);
/// LQ of core k's right unfolding; L is pushed into core k-1.
void right_orthogonalize(std::vector<Core>& cores, Index k);

/// Gaussian TT with bond ranks min(rank, attainable rank).
std::vector<Core> gaussian_cores(std::span<const Index> modes, Index rank, std::uint64_t seed);

/// Bond ranks capped by the products of modes on either side.
std::vector<Index> attainable_ranks(std::span<const Index> modes, Index rank);

}  // namespace fsqtt::detail
