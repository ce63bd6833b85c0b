#include "fsqtt/tt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "fsqtt/kernels.hpp"
#include "linalg.hpp"
#include "tt_internal.hpp"

namespace fsqtt {

namespace {

using Eigen::MatrixXd;
using Ei = Eigen::Index;

// Relative singular-value floor so that a zero tolerance still drops
// round-off directions.
constexpr double kRoundFloor = 1e-15;

std::uint64_t saturating_product(std::span<const Index> modes) {
    std::uint64_t p = 1;
    for (Index n : modes) {
        if (n != 0 && p > std::numeric_limits<std::uint64_t>::max() / n)
            return std::numeric_limits<std::uint64_t>::max();
        p *= n;
    }
    return p;
}

void require_same_modes(const TTVector& x, const TTVector& y, const char* what) {
    if (x.modes() != y.modes()) throw DimensionError(std::string(what) + ": mode sizes differ");
}

void require_same_shape(const TTMatrix& a, const TTMatrix& b, const char* what) {
    if (a.row_sizes() != b.row_sizes() || a.col_sizes() != b.col_sizes())
        throw DimensionError(std::string(what) + ": operator shapes differ");
}

double truncation_delta(double tol, double nrm, Index d) {
    const double t = std::max(tol, kRoundFloor);
    return t * nrm / std::sqrt(double(std::max<Index>(d, 2) - 1));
}

std::vector<Index> concat(const std::vector<Index>& a, const std::vector<Index>& b) {
    std::vector<Index> out(a);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Decode the flat position of a merged-mode train into (row, col).
std::pair<std::uint64_t, std::uint64_t> split_merged(std::uint64_t linear, const std::vector<Index>& rows,
                                                     const std::vector<Index>& cols) {
    std::uint64_t row = 0, col = 0, rs = 1, cs = 1;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::uint64_t m = rows[k] * cols[k];
        const std::uint64_t digit = linear % m;
        linear /= m;
        row += (digit % rows[k]) * rs;
        col += (digit / rows[k]) * cs;
        rs *= rows[k];
        cs *= cols[k];
    }
    return {row, col};
}

}  // namespace

// TTVector --------------------------------------------------------------------

TTVector::TTVector(std::vector<Core> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw DimensionError("TT vector needs at least one core");
    if (cores_.front().left != 1 || cores_.back().right != 1)
        throw DimensionError("TT boundary ranks must be 1");
    for (std::size_t k = 0; k < cores_.size(); ++k) {
        const Core& c = cores_[k];
        if (c.mode == 0 || c.left == 0 || c.right == 0)
            throw DimensionError("TT core " + std::to_string(k) + " has a zero extent");
        if (c.data.size() != c.left * c.mode * c.right)
            throw DimensionError("TT core " + std::to_string(k) + " storage does not match its shape");
        if (k + 1 < cores_.size() && c.right != cores_[k + 1].left)
            throw DimensionError("TT rank chain broken between cores " + std::to_string(k) + " and " +
                                 std::to_string(k + 1));
    }
}

std::vector<Index> TTVector::modes() const {
    std::vector<Index> m(cores_.size());
    for (std::size_t k = 0; k < cores_.size(); ++k) m[k] = cores_[k].mode;
    return m;
}

std::vector<Index> TTVector::ranks() const {
    std::vector<Index> r(cores_.size() + 1, 1);
    for (std::size_t k = 0; k < cores_.size(); ++k) r[k + 1] = cores_[k].right;
    if (!cores_.empty()) r[0] = cores_[0].left;
    return r;
}

Index TTVector::max_rank() const {
    Index r = 1;
    for (const Core& c : cores_) r = std::max(r, c.right);
    return r;
}

Index TTVector::parameter_count() const {
    Index p = 0;
    for (const Core& c : cores_) p += c.size();
    return p;
}

std::uint64_t TTVector::numel() const {
    const auto m = modes();
    return saturating_product(m);
}

double TTVector::element(std::span<const Index> idx) const {
    if (idx.size() != cores_.size())
        throw DimensionError("element: index has " + std::to_string(idx.size()) + " components, expected " +
                             std::to_string(cores_.size()));
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (std::size_t k = 0; k < cores_.size(); ++k) {
        if (idx[k] >= cores_[k].mode)
            throw std::out_of_range("element: component " + std::to_string(k) + " = " + std::to_string(idx[k]) +
                                    " exceeds mode size " + std::to_string(cores_[k].mode));
        Eigen::RowVectorXd next = v * cores_[k].slice(idx[k]);
        v.swap(next);
    }
    return v(0);
}

MultiIndex TTVector::unravel(std::uint64_t linear) const {
    if (linear >= numel()) throw std::out_of_range("linear index " + std::to_string(linear) + " out of range");
    MultiIndex idx(cores_.size());
    for (std::size_t k = 0; k < cores_.size(); ++k) {
        idx[k] = Index(linear % cores_[k].mode);
        linear /= cores_[k].mode;
    }
    return idx;
}

double TTVector::at(std::uint64_t linear) const {
    const MultiIndex idx = unravel(linear);
    return element(idx);
}

// TTMatrix --------------------------------------------------------------------

TTMatrix::TTMatrix(std::vector<Index> row_sizes, std::vector<Index> col_sizes, TTVector flat)
    : rows_(std::move(row_sizes)), cols_(std::move(col_sizes)), flat_(std::move(flat)) {
    if (rows_.size() != flat_.dim() || cols_.size() != flat_.dim())
        throw DimensionError("TT matrix: size lists do not match the number of cores");
    for (std::size_t k = 0; k < rows_.size(); ++k)
        if (flat_.core(k).mode != rows_[k] * cols_[k])
            throw DimensionError("TT matrix core " + std::to_string(k) + " mode is not rows*cols");
}

TTMatrix::TTMatrix(std::vector<Index> row_sizes, std::vector<Index> col_sizes, std::vector<Core> cores)
    : TTMatrix(std::move(row_sizes), std::move(col_sizes), TTVector(std::move(cores))) {}

std::uint64_t TTMatrix::num_rows() const { return saturating_product(rows_); }
std::uint64_t TTMatrix::num_cols() const { return saturating_product(cols_); }

double TTMatrix::element(std::span<const Index> row_idx, std::span<const Index> col_idx) const {
    if (row_idx.size() != dim() || col_idx.size() != dim()) throw DimensionError("element: wrong index length");
    MultiIndex merged(dim());
    for (std::size_t k = 0; k < dim(); ++k) {
        if (row_idx[k] >= rows_[k] || col_idx[k] >= cols_[k])
            throw std::out_of_range("element: matrix index out of range at core " + std::to_string(k));
        merged[k] = row_idx[k] + rows_[k] * col_idx[k];
    }
    return flat_.element(merged);
}

double TTMatrix::at(std::uint64_t row, std::uint64_t col) const {
    if (row >= num_rows() || col >= num_cols()) throw std::out_of_range("matrix entry out of range");
    MultiIndex merged(dim());
    for (std::size_t k = 0; k < dim(); ++k) {
        merged[k] = Index(row % rows_[k]) + rows_[k] * Index(col % cols_[k]);
        row /= rows_[k];
        col /= cols_[k];
    }
    return flat_.element(merged);
}

// Construction ------------------------------------------------------------------

TTVector zeros(std::span<const Index> modes) {
    if (modes.empty()) throw DimensionError("zeros: no modes");
    std::vector<Core> cores;
    cores.reserve(modes.size());
    for (Index n : modes) cores.emplace_back(1, n, 1);
    return TTVector(std::move(cores));
}

TTVector from_full(std::span<const double> data, std::span<const Index> modes, Tolerance tol, std::size_t rmax) {
    if (modes.empty()) throw DimensionError("from_full: no modes");
    const std::uint64_t total = saturating_product(modes);
    if (total != data.size())
        throw DimensionError("from_full: data length " + std::to_string(data.size()) +
                             " does not match the mode product " + std::to_string(total));
    for (double v : data)
        if (!std::isfinite(v)) throw DomainError("from_full: non-finite entry");
    const Index d = modes.size();
    Eigen::Map<const Eigen::VectorXd> flat(data.data(), Ei(data.size()));
    const double nrm = flat.norm();
    if (nrm == 0.0) return zeros(modes);
    const double delta = truncation_delta(tol.value(), nrm, d);

    std::vector<Core> cores;
    cores.reserve(d);
    MatrixXd c = flat;
    Index r = 1;
    for (Index k = 0; k + 1 < d; ++k) {
        const Ei rows = Ei(r * modes[k]);
        const Ei cols = Ei(c.size()) / rows;
        Eigen::Map<MatrixXd> m(c.data(), rows, cols);
        detail::TruncatedSVD svd = detail::truncated_svd(m, delta, rmax);
        const Index rn = Index(svd.s.size());
        Core g(r, modes[k], rn);
        g.left_unfolding() = svd.u;
        cores.push_back(std::move(g));
        MatrixXd next = svd.s.asDiagonal() * svd.v.transpose();
        c = std::move(next);
        r = rn;
    }
    Core last(r, modes[d - 1], 1);
    std::copy(c.data(), c.data() + c.size(), last.data.begin());
    cores.push_back(std::move(last));
    return TTVector(std::move(cores));
}

std::vector<double> to_full(const TTVector& x, std::size_t cap) {
    if (x.numel() > cap)
        throw OversizeError("to_full: " + std::to_string(x.numel()) + " entries exceed the cap of " +
                            std::to_string(cap));
    MatrixXd m = MatrixXd::Ones(1, 1);
    for (const Core& c : x.cores()) {
        MatrixXd t = m * c.right_unfolding();
        m = Eigen::Map<MatrixXd>(t.data(), t.rows() * Ei(c.mode), Ei(c.right));
    }
    return {m.data(), m.data() + m.size()};
}

Eigen::MatrixXd to_dense(const TTMatrix& a, std::size_t cap) {
    const std::uint64_t nr = a.num_rows(), nc = a.num_cols();
    if (nc != 0 && nr > cap / nc)
        throw OversizeError("to_dense: " + std::to_string(nr) + " x " + std::to_string(nc) + " exceeds the cap");
    const std::vector<double> full = to_full(a.flat(), cap);
    MatrixXd out{Ei(nr), Ei(nc)};
    for (std::uint64_t p = 0; p < full.size(); ++p) {
        const auto [row, col] = split_merged(p, a.row_sizes(), a.col_sizes());
        out(Ei(row), Ei(col)) = full[p];
    }
    return out;
}

TTMatrix matrix_from_dense(const Eigen::MatrixXd& m, std::span<const Index> row_sizes,
                           std::span<const Index> col_sizes, Tolerance tol) {
    std::vector<Index> rows(row_sizes.begin(), row_sizes.end()), cols(col_sizes.begin(), col_sizes.end());
    if (rows.size() != cols.size() || rows.empty()) throw DimensionError("matrix_from_dense: size lists");
    if (std::uint64_t(m.rows()) != saturating_product(rows) || std::uint64_t(m.cols()) != saturating_product(cols))
        throw DimensionError("matrix_from_dense: dense matrix does not match the size lists");
    std::vector<Index> merged(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) merged[k] = rows[k] * cols[k];
    std::vector<double> flat(std::size_t(m.size()));
    for (std::uint64_t p = 0; p < flat.size(); ++p) {
        const auto [row, col] = split_merged(p, rows, cols);
        flat[p] = m(Ei(row), Ei(col));
    }
    return TTMatrix(rows, cols, from_full(flat, merged, tol));
}

// Linear algebra ----------------------------------------------------------------

TTVector axpby(double a, const TTVector& x, double b, const TTVector& y) {
    require_same_modes(x, y, "axpby");
    const Index d = x.dim();
    std::vector<Core> out;
    out.reserve(d);
    if (d == 1) {
        Core c(1, x.core(0).mode, 1);
        for (Index i = 0; i < c.mode; ++i) c.data[i] = a * x.core(0).data[i] + b * y.core(0).data[i];
        out.push_back(std::move(c));
        return TTVector(std::move(out));
    }
    for (Index k = 0; k < d; ++k) {
        const Core& cx = x.core(k);
        const Core& cy = y.core(k);
        const Index n = cx.mode;
        const bool first = k == 0, last = k + 1 == d;
        const Index l = first ? 1 : cx.left + cy.left;
        const Index r = last ? 1 : cx.right + cy.right;
        Core c(l, n, r);
        const double sx = first ? a : 1.0, sy = first ? b : 1.0;
        const Index ox_l = 0, oy_l = first ? 0 : cx.left;
        const Index ox_r = 0, oy_r = last ? 0 : cx.right;
        for (Index be = 0; be < cx.right; ++be)
            for (Index i = 0; i < n; ++i)
                for (Index al = 0; al < cx.left; ++al) c(ox_l + al, i, ox_r + be) = sx * cx(al, i, be);
        for (Index be = 0; be < cy.right; ++be)
            for (Index i = 0; i < n; ++i)
                for (Index al = 0; al < cy.left; ++al) c(oy_l + al, i, oy_r + be) = sy * cy(al, i, be);
        out.push_back(std::move(c));
    }
    return TTVector(std::move(out));
}

TTMatrix axpby(double a, const TTMatrix& x, double b, const TTMatrix& y) {
    require_same_shape(x, y, "axpby");
    return TTMatrix(x.row_sizes(), x.col_sizes(), axpby(a, x.flat(), b, y.flat()));
}

TTMatrix add(const TTMatrix& a, const TTMatrix& b) { return axpby(1.0, a, 1.0, b); }

TTVector scale(double a, const TTVector& x) {
    std::vector<Core> cores = x.cores();
    for (double& v : cores[0].data) v *= a;
    return TTVector(std::move(cores));
}

TTMatrix scale(double a, const TTMatrix& x) { return TTMatrix(x.row_sizes(), x.col_sizes(), scale(a, x.flat())); }

double dot(const TTVector& x, const TTVector& y) {
    require_same_modes(x, y, "dot");
    MatrixXd l = MatrixXd::Ones(1, 1);
    for (Index k = 0; k < x.dim(); ++k) l = kernels::left_step(l, x.core(k), y.core(k));
    return l(0, 0);
}

double norm(const TTVector& x) {
    std::vector<Core> cores = x.cores();
    for (Index k = 0; k + 1 < cores.size(); ++k) detail::left_orthogonalize(cores, k);
    return cores.back().left_unfolding().norm();
}

double norm(const TTMatrix& a) { return norm(a.flat()); }

double sum(const TTVector& x) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (const Core& c : x.cores()) {
        MatrixXd s = MatrixXd::Zero(Ei(c.left), Ei(c.right));
        for (Index i = 0; i < c.mode; ++i) s += c.slice(i);
        Eigen::RowVectorXd next = v * s;
        v.swap(next);
    }
    return v(0);
}

TTVector round(const TTVector& x, Tolerance tol, std::size_t rmax, RoundInfo* info) {
    if (rmax == 0) throw std::invalid_argument("round: rmax must be positive");
    if (info) info->rank_capped = false;
    const Index d = x.dim();
    std::vector<Core> cores = x.cores();
    if (d == 1) return TTVector(std::move(cores));
    for (Index k = d - 1; k >= 1; --k) detail::right_orthogonalize(cores, k);
    const double nrm = cores[0].left_unfolding().norm();
    if (nrm == 0.0 || !std::isfinite(nrm)) {
        if (!std::isfinite(nrm)) throw DomainError("round: non-finite tensor");
        return zeros(x.modes());
    }
    const double delta = truncation_delta(tol.value(), nrm, d);
    for (Index k = 0; k + 1 < d; ++k) {
        Core& c = cores[k];
        detail::TruncatedSVD svd = detail::truncated_svd(c.left_unfolding(), delta, rmax);
        if (svd.capped && info) info->rank_capped = true;
        const Index r = Index(svd.s.size());
        Core u(c.left, c.mode, r);
        u.left_unfolding() = svd.u;
        const MatrixXd sv = svd.s.asDiagonal() * svd.v.transpose();
        Core& nx = cores[k + 1];
        Core nn(r, nx.mode, nx.right);
        nn.right_unfolding() = sv * nx.right_unfolding();
        c = std::move(u);
        nx = std::move(nn);
    }
    return TTVector(std::move(cores));
}

TTMatrix round(const TTMatrix& a, Tolerance tol, std::size_t rmax, RoundInfo* info) {
    return TTMatrix(a.row_sizes(), a.col_sizes(), round(a.flat(), tol, rmax, info));
}

TTVector kron(const TTVector& slow, const TTVector& fast) {
    std::vector<Core> cores = fast.cores();
    cores.insert(cores.end(), slow.cores().begin(), slow.cores().end());
    return TTVector(std::move(cores));
}

TTMatrix kron(const TTMatrix& slow, const TTMatrix& fast) {
    return TTMatrix(concat(fast.row_sizes(), slow.row_sizes()), concat(fast.col_sizes(), slow.col_sizes()),
                    kron(slow.flat(), fast.flat()));
}

TTVector matvec(const TTMatrix& a, const TTVector& x) {
    if (a.col_sizes() != x.modes()) throw DimensionError("matvec: column sizes do not match the vector modes");
    std::vector<Core> cores;
    cores.reserve(x.dim());
    for (Index k = 0; k < x.dim(); ++k)
        cores.push_back(kernels::matvec_core_parallel(a.core(k), a.row_sizes()[k], a.col_sizes()[k], x.core(k)));
    return TTVector(std::move(cores));
}

TTMatrix matmat(const TTMatrix& a, const TTMatrix& b) {
    if (a.col_sizes() != b.row_sizes()) throw DimensionError("matmat: inner sizes do not match");
    std::vector<Core> cores;
    cores.reserve(a.dim());
    for (Index k = 0; k < a.dim(); ++k)
        cores.push_back(kernels::matmat_core_parallel(a.core(k), a.row_sizes()[k], a.col_sizes()[k], b.core(k),
                                                      b.col_sizes()[k]));
    return TTMatrix(a.row_sizes(), b.col_sizes(), std::move(cores));
}

TTMatrix transpose(const TTMatrix& a) {
    std::vector<Core> cores;
    cores.reserve(a.dim());
    for (Index k = 0; k < a.dim(); ++k) {
        const Core& c = a.core(k);
        const Index ni = a.row_sizes()[k], nj = a.col_sizes()[k];
        Core t(c.left, c.mode, c.right);
        for (Index b = 0; b < c.right; ++b)
            for (Index j = 0; j < nj; ++j)
                for (Index i = 0; i < ni; ++i)
                    for (Index al = 0; al < c.left; ++al) t(al, j + nj * i, b) = c(al, i + ni * j, b);
        cores.push_back(std::move(t));
    }
    return TTMatrix(a.col_sizes(), a.row_sizes(), std::move(cores));
}

TTMatrix diag(const TTVector& v) {
    std::vector<Core> cores;
    cores.reserve(v.dim());
    for (const Core& c : v.cores()) {
        const Index n = c.mode;
        Core m(c.left, n * n, c.right);
        for (Index b = 0; b < c.right; ++b)
            for (Index i = 0; i < n; ++i)
                for (Index a = 0; a < c.left; ++a) m(a, i + n * i, b) = c(a, i, b);
        cores.push_back(std::move(m));
    }
    const auto modes = v.modes();
    return TTMatrix(modes, modes, std::move(cores));
}

namespace {

// C(r', i, (be, q1)) = sum L(r', al, q) A(al, i + n j, be) X(q, j, q1), returned
// as an (r' n) x (ra_r rx_r) matrix.
MatrixXd apply_left(const Interface& left, const Core& a, Index n, const Core& x) {
    const Index p = left.bra, ral = a.left, rar = a.right;
    Eigen::Map<const MatrixXd> lm(left.data.data(), Ei(p * ral), Ei(left.ket));
    const MatrixXd t1 = lm * x.right_unfolding();  // (p ral) x (n rx_r)
    MatrixXd out = MatrixXd::Zero(Ei(p * n), Ei(rar * x.right));
    for (Index q1 = 0; q1 < x.right; ++q1)
        for (Index be = 0; be < rar; ++be)
            for (Index j = 0; j < n; ++j)
                for (Index al = 0; al < ral; ++al) {
                    const double* tcol = &t1(Ei(p * al), Ei(j + n * q1));
                    for (Index i = 0; i < n; ++i) {
                        const double av = a(al, i + n * j, be);
                        if (av == 0.0) continue;
                        double* ocol = &out(Ei(p * i), Ei(be + rar * q1));
                        for (Index s = 0; s < p; ++s) ocol[s] += tcol[s] * av;
                    }
                }
    return out;
}

constexpr Index kExactProductRank = 128;
constexpr Index kOversample = 8;

}  // namespace

TTVector matvec_round(const TTMatrix& a, const TTVector& x, Tolerance tol, std::size_t rmax, std::uint64_t seed) {
    if (a.col_sizes() != x.modes()) throw DimensionError("matvec_round: column sizes do not match the vector modes");
    const Index d = x.dim();
    bool square = a.row_sizes() == a.col_sizes();
    Index product_rank = 1;
    for (Index k = 0; k + 1 < d; ++k) product_rank = std::max(product_rank, a.core(k).right * x.core(k).right);
    if (!square || d == 1 || product_rank <= kExactProductRank) return round(matvec(a, x), tol, rmax);

    const auto modes = x.modes();
    Index ell = std::min(product_rank, std::max<Index>(32, x.max_rank() + 2 * kOversample));
    while (true) {
        // Right-to-left sketch of the product against a Gaussian train.
        const std::vector<Core> omega = detail::gaussian_cores(modes, ell, seed);
        std::vector<Interface> w(d + 1);
        for (Index k = d - 1; k >= 1; --k)
        {
            w[k] = kernels::right_step(w[k + 1], omega[k], a.core(k), modes[k], x.core(k));
            // Only the range matters; rescale to stay clear of under/overflow.
            Eigen::Map<Eigen::VectorXd> wv(w[k].data.data(), Ei(w[k].data.size()));
            const double wn = wv.norm();
            if (wn > 0.0 && std::isfinite(wn)) wv /= wn;
        }

        std::vector<Core> cores;
        cores.reserve(d);
        Interface left;
        for (Index k = 0; k + 1 < d; ++k) {
            const Index n = modes[k];
            const MatrixXd c = apply_left(left, a.core(k), n, x.core(k));
            Eigen::Map<const MatrixXd> wm(w[k + 1].data.data(), Ei(w[k + 1].bra), Ei(w[k + 1].op * w[k + 1].ket));
            const MatrixXd sketch = c * wm.transpose();
            detail::ThinQR qr = detail::thin_qr(sketch);
            const Index r = Index(qr.q.cols());
            Core g(left.bra, n, r);
            g.left_unfolding() = qr.q;
            cores.push_back(std::move(g));
            Interface next(r, a.core(k).right, x.core(k).right);
            Eigen::Map<MatrixXd>(next.data.data(), Ei(r), Ei(next.op * next.ket)) = qr.q.transpose() * c;
            left = std::move(next);
        }
        const MatrixXd c = apply_left(left, a.core(d - 1), modes[d - 1], x.core(d - 1));
        Core last(left.bra, modes[d - 1], 1);
        last.left_unfolding() = c;
        cores.push_back(std::move(last));

        TTVector y = round(TTVector(std::move(cores)), tol, rmax);
        if (y.max_rank() + kOversample <= ell || ell >= product_rank || y.max_rank() >= rmax) return y;
        ell = std::min(product_rank, 2 * ell);
        ++seed;
    }
}

double erank(const TTVector& x) {
    const Index d = x.dim();
    const auto m = x.modes();
    const double p = double(x.parameter_count());
    if (d == 1) return 1.0;
    const double b = double(m.front() + m.back());
    if (d == 2) return p / b;
    double a = 0.0;
    for (Index k = 1; k + 1 < d; ++k) a += double(m[k]);
    return (-b + std::sqrt(b * b + 4.0 * a * p)) / (2.0 * a);
}

double erank(const TTMatrix& a) { return erank(a.flat()); }

// Internal helpers ------------------------------------------------------------

namespace detail {

void left_orthogonalize(std::vector<Core>& cores, Index k) {
    Core& c = cores[k];
    ThinQR qr = thin_qr(c.left_unfolding());
    const Index r = Index(qr.q.cols());
    Core q(c.left, c.mode, r);
    q.left_unfolding() = qr.q;
    Core& nx = cores[k + 1];
    Core nn(r, nx.mode, nx.right);
    nn.right_unfolding() = qr.r * nx.right_unfolding();
    c = std::move(q);
    nx = std::move(nn);
}

void right_orthogonalize(std::vector<Core>& cores, Index k) {
    Core& c = cores[k];
    ThinQR qr = thin_qr(c.right_unfolding().transpose());
    const Index r = Index(qr.q.cols());
    Core q(r, c.mode, c.right);
    q.right_unfolding() = qr.q.transpose();
    Core& pv = cores[k - 1];
    Core np(pv.left, pv.mode, r);
    np.left_unfolding() = pv.left_unfolding() * qr.r.transpose();
    c = std::move(q);
    pv = std::move(np);
}

std::vector<Index> attainable_ranks(std::span<const Index> modes, Index rank) {
    const Index d = modes.size();
    std::vector<Index> r(d + 1, 1);
    for (Index k = 1; k < d; ++k) {
        const std::uint64_t left = saturating_product(modes.subspan(0, k));
        const std::uint64_t right = saturating_product(modes.subspan(k));
        r[k] = Index(std::min<std::uint64_t>({rank, left, right}));
    }
    return r;
}

std::vector<Core> gaussian_cores(std::span<const Index> modes, Index rank, std::uint64_t seed) {
    const std::vector<Index> r = attainable_ranks(modes, rank);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist;
    std::vector<Core> cores;
    cores.reserve(modes.size());
    for (Index k = 0; k < modes.size(); ++k) {
        Core c(r[k], modes[k], r[k + 1]);
        const double s = 1.0 / std::sqrt(double(r[k + 1]));
        for (double& v : c.data) v = dist(gen) * s;
        cores.push_back(std::move(c));
    }
    return cores;
}

}  // namespace detail

}  // namespace fsqtt
