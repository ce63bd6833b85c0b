#pragma once

// Closed-form QTT representations of the structured vectors and matrices of
// the scheme.  Every object lives on 2^d points with one mode-2 core per bit,
// least significant bit first.

#include <cstdint>

#include "fsqtt/io.hpp"
#include "fsqtt/tt.hpp"

namespace fsqtt {

struct GridSpec {
    int d;
    std::uint64_t n;
    double h;

    explicit GridSpec(int d_);
};

enum class QttKind { ones, xfun, eye, ones_mat };

/// ones and xfun give vectors, eye and ones_mat give matrices.
TTObject qtt_generate(QttKind kind, int d);

TTVector qtt_ones(int d);
/// The ramp [0, 1, ..., 2^d - 1], rank 2.
TTVector qtt_xfun(int d);
TTMatrix qtt_eye(int d);
/// The all-ones matrix E.
TTMatrix qtt_ones_mat(int d);

/// Lower-triangular matrix with all entries h = 2^-d on and below the
/// diagonal (rectangle-rule antiderivative).  Ranks 2.
TTMatrix qtt_volterra(int d);

/// Unit vector e_index, rank 1.
TTVector qtt_delta(int d, std::uint64_t index);

struct FdBlocks {
    TTMatrix binv;   // (1/h)(I - S), S the down shift
    TTMatrix j;      // I with the last diagonal entry zeroed
    TTMatrix zlast;  // single 1 at (n-1, n-1)
};

FdBlocks qtt_fd_blocks(int d);

}  // namespace fsqtt
