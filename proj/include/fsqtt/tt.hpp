#pragma once

// Tensor-train vectors and matrices.
//
// A TTVector with mode sizes I_1..I_d stores an order-d tensor as a chain of
// order-3 cores G_k of shape R_{k-1} x I_k x R_k, R_0 = R_d = 1.  Flattening
// is little-endian: the linear index is i_1 + i_2 I_1 + i_3 I_1 I_2 + ...,
// so core 1 carries the fastest index.  For QTT fields on a 2^d x 2^d grid
// the first d cores hold the x bits and the last d cores the y bits.
//
// A TTMatrix is stored as a TTVector over the merged mode (i_k, j_k) with
// merged index i_k + I_k j_k.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fsqtt {

using Index = std::size_t;
using MultiIndex = std::vector<Index>;

inline constexpr std::size_t kDefaultRmax = 2048;
inline constexpr std::size_t kDefaultFullCap = std::size_t{1} << 24;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class OversizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Relative Frobenius accuracy, 0 <= value < 1.
class Tolerance {
public:
    constexpr Tolerance(double value) : value_(value) {  // NOLINT: implicit by intent
        if (!(value >= 0.0 && value < 1.0)) {
            throw std::invalid_argument("tolerance must lie in [0, 1), got " + std::to_string(value));
        }
    }
    constexpr double value() const { return value_; }

private:
    double value_;
};

/// Order-3 core, stored with the left rank index fastest:
/// (a, i, b) -> a + left * (i + mode * b).  Both the left unfolding
/// (left*mode x right) and the right unfolding (left x mode*right) are
/// column-major views of the same buffer.
struct Core {
    Index left = 1;
    Index mode = 1;
    Index right = 1;
    std::vector<double> data;

    Core() : data(1, 0.0) {}
    Core(Index l, Index n, Index r) : left(l), mode(n), right(r), data(l * n * r, 0.0) {}

    Index size() const { return data.size(); }

    double& operator()(Index a, Index i, Index b) { return data[a + left * (i + mode * b)]; }
    double operator()(Index a, Index i, Index b) const { return data[a + left * (i + mode * b)]; }

    Eigen::Map<Eigen::MatrixXd> left_unfolding() {
        return {data.data(), Eigen::Index(left * mode), Eigen::Index(right)};
    }
    Eigen::Map<const Eigen::MatrixXd> left_unfolding() const {
        return {data.data(), Eigen::Index(left * mode), Eigen::Index(right)};
    }
    Eigen::Map<Eigen::MatrixXd> right_unfolding() {
        return {data.data(), Eigen::Index(left), Eigen::Index(mode * right)};
    }
    Eigen::Map<const Eigen::MatrixXd> right_unfolding() const {
        return {data.data(), Eigen::Index(left), Eigen::Index(mode * right)};
    }

    /// The R_{k-1} x R_k matrix G(i).
    Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>> slice(Index i) const {
        return {data.data() + left * i, Eigen::Index(left), Eigen::Index(right),
                Eigen::OuterStride<>(Eigen::Index(left * mode))};
    }
};

class TTVector {
public:
    TTVector() = default;
    explicit TTVector(std::vector<Core> cores);

    Index dim() const { return cores_.size(); }
    bool empty() const { return cores_.empty(); }
    const std::vector<Core>& cores() const { return cores_; }
    const Core& core(Index k) const { return cores_.at(k); }

    std::vector<Index> modes() const;
    /// R_0..R_d.
    std::vector<Index> ranks() const;
    Index max_rank() const;
    /// Number of stored floating point values.
    Index parameter_count() const;
    /// Product of the mode sizes, saturating at UINT64_MAX.
    std::uint64_t numel() const;

    double element(std::span<const Index> idx) const;
    double at(std::uint64_t linear) const;
    MultiIndex unravel(std::uint64_t linear) const;

private:
    std::vector<Core> cores_;
};

class TTMatrix {
public:
    TTMatrix() = default;
    TTMatrix(std::vector<Index> row_sizes, std::vector<Index> col_sizes, TTVector flat);
    TTMatrix(std::vector<Index> row_sizes, std::vector<Index> col_sizes, std::vector<Core> cores);

    Index dim() const { return flat_.dim(); }
    const std::vector<Index>& row_sizes() const { return rows_; }
    const std::vector<Index>& col_sizes() const { return cols_; }
    /// Underlying train over merged modes i_k + I_k j_k.
    const TTVector& flat() const { return flat_; }
    const Core& core(Index k) const { return flat_.core(k); }
    std::vector<Index> ranks() const { return flat_.ranks(); }
    Index max_rank() const { return flat_.max_rank(); }
    std::uint64_t num_rows() const;
    std::uint64_t num_cols() const;

    double element(std::span<const Index> row_idx, std::span<const Index> col_idx) const;
    double at(std::uint64_t row, std::uint64_t col) const;

private:
    std::vector<Index> rows_;
    std::vector<Index> cols_;
    TTVector flat_;
};

struct RoundInfo {
    bool rank_capped = false;
};

// Construction and conversion ------------------------------------------------

TTVector zeros(std::span<const Index> modes);
TTVector from_full(std::span<const double> data, std::span<const Index> modes, Tolerance tol,
                   std::size_t rmax = kDefaultRmax);
std::vector<double> to_full(const TTVector& x, std::size_t cap = kDefaultFullCap);
Eigen::MatrixXd to_dense(const TTMatrix& a, std::size_t cap = kDefaultFullCap);
TTMatrix matrix_from_dense(const Eigen::MatrixXd& m, std::span<const Index> row_sizes,
                           std::span<const Index> col_sizes, Tolerance tol);

// Linear algebra ------------------------------------------------------------

/// a*x + b*y with block-diagonal core concatenation; ranks add, no rounding.
TTVector axpby(double a, const TTVector& x, double b, const TTVector& y);
TTMatrix axpby(double a, const TTMatrix& x, double b, const TTMatrix& y);
TTMatrix add(const TTMatrix& a, const TTMatrix& b);
TTVector scale(double a, const TTVector& x);
TTMatrix scale(double a, const TTMatrix& x);

double dot(const TTVector& x, const TTVector& y);
/// Frobenius norm computed through orthogonalization, accurate when the
/// represented tensor is a small difference of large terms.
double norm(const TTVector& x);
double norm(const TTMatrix& a);
/// Sum of all entries.
double sum(const TTVector& x);

/// SVD re-compression to relative accuracy tol, ranks capped at rmax.
TTVector round(const TTVector& x, Tolerance tol, std::size_t rmax = kDefaultRmax,
               RoundInfo* info = nullptr);
TTMatrix round(const TTMatrix& a, Tolerance tol, std::size_t rmax = kDefaultRmax,
               RoundInfo* info = nullptr);

/// slow (x) fast: dense entry [j * len(fast) + i] = slow[j] * fast[i].  The
/// fast factor's cores come first.
TTVector kron(const TTVector& slow, const TTVector& fast);
TTMatrix kron(const TTMatrix& slow, const TTMatrix& fast);

TTVector matvec(const TTMatrix& a, const TTVector& x);
TTMatrix matmat(const TTMatrix& a, const TTMatrix& b);
TTMatrix transpose(const TTMatrix& a);
TTMatrix diag(const TTVector& v);

/// A*x re-compressed to relative accuracy tol without forming the full-rank
/// product first (randomized sketch followed by SVD rounding).
TTVector matvec_round(const TTMatrix& a, const TTVector& x, Tolerance tol,
                      std::size_t rmax = kDefaultRmax, std::uint64_t seed = 7);

/// Constant rank giving the same parameter count as the actual rank chain.
double erank(const TTVector& x);
double erank(const TTMatrix& a);

}  // namespace fsqtt
