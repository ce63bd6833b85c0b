#include "fsqtt/constructors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsqtt {

namespace {

void check_d(int d) {
    if (d < 1 || d > 62) throw std::out_of_range("grid factor d = " + std::to_string(d) + " outside [1, 62]");
}

std::vector<Index> twos(int d) { return std::vector<Index>(std::size_t(d), 2); }

// Merged index of (i, j) in a 2x2 operator core.
constexpr Index mi(Index i, Index j) { return i + 2 * j; }

}  // namespace

GridSpec::GridSpec(int d_) : d(d_), n(0), h(0.0) {
    check_d(d_);
    n = std::uint64_t{1} << d_;
    h = std::ldexp(1.0, -d_);
}

TTVector qtt_ones(int d) {
    check_d(d);
    std::vector<Core> cores;
    for (int k = 0; k < d; ++k) {
        Core c(1, 2, 1);
        c.data = {1.0, 1.0};
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

TTVector qtt_xfun(int d) {
    check_d(d);
    std::vector<Core> cores;
    if (d == 1) {
        Core c(1, 2, 1);
        c.data = {0.0, 1.0};
        cores.push_back(std::move(c));
        return TTVector(std::move(cores));
    }
    // Row state [partial sum, 1].
    Core first(1, 2, 2);
    for (Index i = 0; i < 2; ++i) {
        first(0, i, 0) = double(i);
        first(0, i, 1) = 1.0;
    }
    cores.push_back(std::move(first));
    for (int k = 1; k + 1 < d; ++k) {
        Core c(2, 2, 2);
        const double w = std::ldexp(1.0, k);
        for (Index i = 0; i < 2; ++i) {
            c(0, i, 0) = 1.0;
            c(1, i, 0) = double(i) * w;
            c(1, i, 1) = 1.0;
        }
        cores.push_back(std::move(c));
    }
    Core last(2, 2, 1);
    const double w = std::ldexp(1.0, d - 1);
    for (Index i = 0; i < 2; ++i) {
        last(0, i, 0) = 1.0;
        last(1, i, 0) = double(i) * w;
    }
    cores.push_back(std::move(last));
    return TTVector(std::move(cores));
}

TTMatrix qtt_eye(int d) {
    check_d(d);
    std::vector<Core> cores;
    for (int k = 0; k < d; ++k) {
        Core c(1, 4, 1);
        c.data = {1.0, 0.0, 0.0, 1.0};
        cores.push_back(std::move(c));
    }
    return TTMatrix(twos(d), twos(d), std::move(cores));
}

TTMatrix qtt_ones_mat(int d) {
    check_d(d);
    std::vector<Core> cores;
    for (int k = 0; k < d; ++k) {
        Core c(1, 4, 1);
        c.data = {1.0, 1.0, 1.0, 1.0};
        cores.push_back(std::move(c));
    }
    return TTMatrix(twos(d), twos(d), std::move(cores));
}

namespace {

// Comparison automaton state after reading the low bits: 0 means i >= j so
// far, 1 means i < j.
Index compare_step(Index state, Index i, Index j) {
    if (i > j) return 0;
    if (i < j) return 1;
    return state;
}

}  // namespace

TTMatrix qtt_volterra(int d) {
    check_d(d);
    std::vector<Core> cores;
    for (int k = 0; k < d; ++k) {
        const Index l = k == 0 ? 1 : 2;
        const Index r = k + 1 == d ? 1 : 2;
        Core c(l, 4, r);
        for (Index s = 0; s < l; ++s)
            for (Index i = 0; i < 2; ++i)
                for (Index j = 0; j < 2; ++j) {
                    const Index next = compare_step(s, i, j);
                    if (r == 1) {
                        if (next == 0) c(s, mi(i, j), 0) = 0.5;
                    } else {
                        c(s, mi(i, j), next) = 0.5;
                    }
                }
        cores.push_back(std::move(c));
    }
    return TTMatrix(twos(d), twos(d), std::move(cores));
}

TTVector qtt_delta(int d, std::uint64_t index) {
    check_d(d);
    if (index >= (std::uint64_t{1} << d))
        throw std::out_of_range("delta index " + std::to_string(index) + " outside [0, 2^" + std::to_string(d) + ")");
    std::vector<Core> cores;
    for (int k = 0; k < d; ++k) {
        Core c(1, 2, 1);
        c.data[(index >> k) & 1u] = 1.0;
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

FdBlocks qtt_fd_blocks(int d) {
    check_d(d);
    // I - S as a carry automaton: i = j + c with c in {0, 1} entering at the
    // lowest bit with weight +1 or -1, and no carry leaving the top bit.
    std::vector<Core> cores;
    for (int k = 0; k < d; ++k) {
        const Index r = k + 1 == d ? 1 : 2;
        Core c(k == 0 ? 1 : 2, 4, r);
        for (Index cin = 0; cin < 2; ++cin) {
            const Index row = k == 0 ? 0 : cin;
            const double w = (k == 0 && cin == 1) ? -2.0 : 2.0;
            for (Index j = 0; j < 2; ++j) {
                const Index t = j + cin;
                const Index i = t % 2, cout = t / 2;
                if (r == 1) {
                    if (cout == 0) c(row, mi(i, j), 0) += w;
                } else {
                    c(row, mi(i, j), cout) += w;
                }
            }
        }
        cores.push_back(std::move(c));
    }
    TTMatrix binv(twos(d), twos(d), std::move(cores));

    std::vector<Core> zc;
    for (int k = 0; k < d; ++k) {
        Core c(1, 4, 1);
        c(0, mi(1, 1), 0) = 1.0;
        zc.push_back(std::move(c));
    }
    TTMatrix zlast(twos(d), twos(d), std::move(zc));
    TTMatrix j = axpby(1.0, qtt_eye(d), -1.0, zlast);
    return {std::move(binv), std::move(j), std::move(zlast)};
}

TTObject qtt_generate(QttKind kind, int d) {
    switch (kind) {
        case QttKind::ones: return qtt_ones(d);
        case QttKind::xfun: return qtt_xfun(d);
        case QttKind::eye: return qtt_eye(d);
        case QttKind::ones_mat: return qtt_ones_mat(d);
    }
    throw std::invalid_argument("unknown QTT kind");
}

}  // namespace fsqtt
