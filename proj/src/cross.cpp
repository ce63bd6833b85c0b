#include "fsqtt/cross.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "linalg.hpp"
#include "tt_internal.hpp"

namespace fsqtt {

namespace {

using Eigen::MatrixXd;
using Ei = Eigen::Index;

std::string format_index(std::span<const Index> idx) {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "," : "") << idx[k];
    os << ')';
    return os.str();
}

// Entry access used by the sweeps: whole fibers at once plus single entries
// for validation.
class EntrySource {
public:
    virtual ~EntrySource() = default;
    virtual void fiber(Index k, const std::vector<MultiIndex>& left, const std::vector<MultiIndex>& right,
                       Core& out) = 0;
    virtual double entry(std::span<const Index> idx) = 0;
    std::uint64_t evaluations = 0;
};

class CallbackSource final : public EntrySource {
public:
    CallbackSource(const EntryFunction& f, Index d) : f_(f), idx_(d) {}

    void fiber(Index k, const std::vector<MultiIndex>& left, const std::vector<MultiIndex>& right,
               Core& out) override {
        for (Index b = 0; b < right.size(); ++b)
            for (Index i = 0; i < out.mode; ++i)
                for (Index a = 0; a < left.size(); ++a) {
                    std::copy(left[a].begin(), left[a].end(), idx_.begin());
                    idx_[k] = i;
                    std::copy(right[b].begin(), right[b].end(), idx_.begin() + Ei(k + 1));
                    out(a, i, b) = entry(idx_);
                }
    }

    double entry(std::span<const Index> idx) override {
        ++evaluations;
        const double v = f_(idx);
        if (!std::isfinite(v)) throw DomainError("cross: non-finite value at index " + format_index(idx));
        return v;
    }

private:
    const EntryFunction& f_;
    MultiIndex idx_;
};

class ElementwiseSource final : public EntrySource {
public:
    ElementwiseSource(const ElementwiseFunction& f, std::span<const TTVector> args)
        : f_(f), args_(args), vals_(args.size()) {}

    void fiber(Index k, const std::vector<MultiIndex>& left, const std::vector<MultiIndex>& right,
               Core& out) override {
        const Index rl = left.size(), rr = right.size(), n = out.mode;
        std::vector<std::vector<MatrixXd>> slabs(args_.size());
        for (std::size_t t = 0; t < args_.size(); ++t) {
            const auto& cores = args_[t].cores();
            MatrixXd lm(Ei(rl), Ei(cores[k].left));
            for (Index a = 0; a < rl; ++a) {
                Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
                for (Index p = 0; p < k; ++p) {
                    Eigen::RowVectorXd nv = v * cores[p].slice(left[a][p]);
                    v.swap(nv);
                }
                lm.row(Ei(a)) = v;
            }
            MatrixXd rm(Ei(cores[k].right), Ei(rr));
            for (Index b = 0; b < rr; ++b) {
                Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
                for (Index p = cores.size(); p-- > k + 1;) {
                    Eigen::VectorXd nv = cores[p].slice(right[b][p - k - 1]) * v;
                    v.swap(nv);
                }
                rm.col(Ei(b)) = v;
            }
            slabs[t].resize(n);
            for (Index i = 0; i < n; ++i) slabs[t][i] = lm * cores[k].slice(i) * rm;
        }
        MultiIndex idx(args_.front().dim());
        for (Index b = 0; b < rr; ++b)
            for (Index i = 0; i < n; ++i)
                for (Index a = 0; a < rl; ++a) {
                    for (std::size_t t = 0; t < args_.size(); ++t) vals_[t] = slabs[t][i](Ei(a), Ei(b));
                    ++evaluations;
                    const double v = f_(vals_);
                    if (!std::isfinite(v)) {
                        std::copy(left[a].begin(), left[a].end(), idx.begin());
                        idx[k] = i;
                        std::copy(right[b].begin(), right[b].end(), idx.begin() + Ei(k + 1));
                        throw DomainError("cross: function is not finite at index " + format_index(idx));
                    }
                    out(a, i, b) = v;
                }
    }

    double entry(std::span<const Index> idx) override {
        for (std::size_t t = 0; t < args_.size(); ++t) vals_[t] = args_[t].element(idx);
        ++evaluations;
        const double v = f_(vals_);
        if (!std::isfinite(v)) throw DomainError("cross: function is not finite at index " + format_index(idx));
        return v;
    }

private:
    const ElementwiseFunction& f_;
    std::span<const TTVector> args_;
    std::vector<double> vals_;
};

struct Sample {
    std::vector<MultiIndex> idx;
    std::vector<double> val;
    double norm = 0.0;
};

double sample_error(const TTVector& x, const Sample& s) {
    double err = 0.0;
    for (std::size_t p = 0; p < s.idx.size(); ++p) {
        const double e = x.element(s.idx[p]) - s.val[p];
        err += e * e;
    }
    err = std::sqrt(err);
    return s.norm > 0.0 ? err / s.norm : err;
}

MultiIndex random_tuple(std::mt19937_64& gen, std::span<const Index> modes) {
    MultiIndex t(modes.size());
    for (std::size_t p = 0; p < modes.size(); ++p)
        t[p] = std::uniform_int_distribution<Index>(0, modes[p] - 1)(gen);
    return t;
}

// Pad an index set with distinct random tuples up to the requested size.
void augment(std::vector<MultiIndex>& set, Index target, std::span<const Index> modes, std::mt19937_64& gen) {
    if (set.size() >= target) return;
    std::set<MultiIndex> seen(set.begin(), set.end());
    int misses = 0;
    while (set.size() < target && misses < 64) {
        MultiIndex t = random_tuple(gen, modes);
        if (seen.insert(t).second) {
            set.push_back(std::move(t));
            misses = 0;
        } else {
            ++misses;
        }
    }
}

// Q * Q(piv, :)^{-1}
MatrixXd interpolation_basis(const MatrixXd& q, const std::vector<Index>& piv) {
    MatrixXd sub(Ei(piv.size()), q.cols());
    for (std::size_t r = 0; r < piv.size(); ++r) sub.row(Ei(r)) = q.row(Ei(piv[r]));
    return sub.transpose().partialPivLu().solve(q.transpose()).transpose();
}

}  // namespace

void CrossConfig::validate() const {
    if (max_sweeps < 1) throw std::invalid_argument("cross: max_sweeps must be >= 1");
    if (initial_rank < 1) throw std::invalid_argument("cross: initial_rank must be >= 1");
    if (rank_step < 1) throw std::invalid_argument("cross: rank_step must be >= 1");
    if (validation_size < 32) throw std::invalid_argument("cross: validation_size must be >= 32");
    if (rmax < 1) throw std::invalid_argument("cross: rmax must be >= 1");
}

std::vector<Index> maxvol(const Eigen::MatrixXd& a, double tol, int max_iters) {
    const Index n = Index(a.rows()), r = Index(a.cols());
    if (r > n) throw DimensionError("maxvol: matrix must be tall");
    // Initial rows by Gaussian elimination with row pivoting.
    MatrixXd w = a;
    std::vector<Index> perm(n);
    for (Index p = 0; p < n; ++p) perm[p] = p;
    std::vector<Index> piv(r);
    for (Index c = 0; c < r; ++c) {
        Index best = c;
        double bv = -1.0;
        for (Index p = c; p < n; ++p) {
            const double v = std::abs(w(Ei(p), Ei(c)));
            if (v > bv || (v == bv && perm[p] < perm[best])) {
                bv = v;
                best = p;
            }
        }
        w.row(Ei(c)).swap(w.row(Ei(best)));
        std::swap(perm[c], perm[best]);
        piv[c] = perm[c];
        const double d = w(Ei(c), Ei(c));
        if (d != 0.0)
            for (Index p = c + 1; p < n; ++p) {
                const double f = w(Ei(p), Ei(c)) / d;
                if (f != 0.0) w.row(Ei(p)).tail(Ei(r - c)) -= f * w.row(Ei(c)).tail(Ei(r - c));
            }
    }
    for (int it = 0; it < max_iters; ++it) {
        const MatrixXd b = interpolation_basis(a, piv);
        Index bi = 0, bj = 0;
        double bv = -1.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < r; ++j) {
                const double v = std::abs(b(Ei(i), Ei(j)));
                if (v > bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                }
            }
        if (!(bv > 1.0 + tol)) break;
        piv[bj] = bi;
    }
    return piv;
}

namespace {

CrossResult run_cross(EntrySource& src, std::span<const Index> shape, const CrossConfig& cfg) {
    cfg.validate();
    const Index d = shape.size();
    if (d == 0) throw DimensionError("cross: empty shape");
    for (Index n : shape)
        if (n == 0) throw DimensionError("cross: zero mode size");
    const std::vector<Index> modes(shape.begin(), shape.end());
    std::mt19937_64 gen(cfg.seed);

    Sample sample;
    for (Index p = 0; p < cfg.validation_size; ++p) {
        sample.idx.push_back(random_tuple(gen, modes));
        sample.val.push_back(src.entry(sample.idx.back()));
        sample.norm += sample.val.back() * sample.val.back();
    }
    sample.norm = std::sqrt(sample.norm);

    CrossResult res;
    const double target = 0.5 * cfg.tol.value();
    const double round_tol = 0.5 * cfg.tol.value();

    if (d == 1) {
        Core c(1, modes[0], 1);
        src.fiber(0, {MultiIndex{}}, {MultiIndex{}}, c);
        res.tt = TTVector({std::move(c)});
        res.validation_error = sample_error(res.tt, sample);
        res.converged = res.validation_error <= cfg.tol.value();
        res.sweeps = 1;
        res.evaluations = src.evaluations;
        return res;
    }

    // left[k]: tuples over cores 0..k-1; right[k]: tuples over cores k..d-1.
    std::vector<std::vector<MultiIndex>> left(d + 1), right(d + 1);
    left[0] = {MultiIndex{}};
    right[d] = {MultiIndex{}};
    Index rank = std::min<Index>(cfg.initial_rank, cfg.rmax);
    std::vector<Index> cap = detail::attainable_ranks(modes, std::numeric_limits<Index>::max());
    for (Index k = 1; k < d; ++k) cap[k] = std::min<Index>(cap[k], cfg.rmax);

    TTVector best;
    double best_err = std::numeric_limits<double>::infinity();
    bool done = false;
    int half = 0;
    int stalls = 0;
    for (; half < 2 * cfg.max_sweeps && !done; ++half) {
        std::vector<Core> cores(d);
        const bool forward = half % 2 == 0;
        if (forward) {
            for (Index k = 1; k < d; ++k) {
                augment(right[k], std::min(rank, cap[k]), std::span<const Index>(modes).subspan(k), gen);
            }
            for (Index k = 0; k + 1 < d; ++k) {
                Core c(left[k].size(), modes[k], right[k + 1].size());
                src.fiber(k, left[k], right[k + 1], c);
                const detail::ThinQR qr = detail::thin_qr(c.left_unfolding());
                const std::vector<Index> piv = maxvol(qr.q);
                const MatrixXd basis = interpolation_basis(qr.q, piv);
                Core g(c.left, c.mode, piv.size());
                g.left_unfolding() = basis;
                cores[k] = std::move(g);
                std::vector<MultiIndex> next;
                next.reserve(piv.size());
                for (Index p : piv) {
                    MultiIndex t = left[k][p % c.left];
                    t.push_back(p / c.left);
                    next.push_back(std::move(t));
                }
                left[k + 1] = std::move(next);
            }
            Core last(left[d - 1].size(), modes[d - 1], 1);
            src.fiber(d - 1, left[d - 1], right[d], last);
            cores[d - 1] = std::move(last);
        } else {
            for (Index k = 1; k < d; ++k) {
                augment(left[k], std::min(rank, cap[k]), std::span<const Index>(modes).subspan(0, k), gen);
            }
            for (Index k = d - 1; k >= 1; --k) {
                Core c(left[k].size(), modes[k], right[k + 1].size());
                src.fiber(k, left[k], right[k + 1], c);
                const detail::ThinQR qr = detail::thin_qr(c.right_unfolding().transpose());
                const std::vector<Index> piv = maxvol(qr.q);
                const MatrixXd basis = interpolation_basis(qr.q, piv);
                Core g(piv.size(), c.mode, c.right);
                g.right_unfolding() = basis.transpose();
                cores[k] = std::move(g);
                std::vector<MultiIndex> next;
                next.reserve(piv.size());
                for (Index p : piv) {
                    MultiIndex t{p % c.mode};
                    const MultiIndex& tail = right[k + 1][p / c.mode];
                    t.insert(t.end(), tail.begin(), tail.end());
                    next.push_back(std::move(t));
                }
                right[k] = std::move(next);
            }
            Core first(1, modes[0], right[1].size());
            src.fiber(0, left[0], right[1], first);
            cores[0] = std::move(first);
        }
        TTVector x(std::move(cores));
        const double err = sample_error(x, sample);
        if (err < best_err) {
            stalls = 0;
            best_err = err;
            best = std::move(x);
        } else {
            ++stalls;
        }
        if (best_err <= target) {
            done = true;
            break;
        }
        bool at_cap = true;
        for (Index k = 1; k < d; ++k) at_cap = at_cap && rank >= cap[k];
        if (at_cap && stalls >= 2) break;
        if (stalls >= 6) break;
        rank += cfg.rank_step;
    }

    res.tt = round(best, round_tol, cfg.rmax);
    res.validation_error = sample_error(res.tt, sample);
    res.converged = res.validation_error <= cfg.tol.value();
    res.sweeps = (std::min(half + 1, 2 * cfg.max_sweeps) + 1) / 2;
    res.evaluations = src.evaluations;
    return res;
}

}  // namespace

CrossResult cross_from_indices(const EntryFunction& eval, std::span<const Index> shape, const CrossConfig& cfg) {
    CallbackSource src(eval, shape.size());
    return run_cross(src, shape, cfg);
}

CrossResult cross_elementwise(const ElementwiseFunction& fn, std::span<const TTVector> args, const CrossConfig& cfg) {
    if (args.empty()) throw std::invalid_argument("cross_elementwise: no arguments");
    const auto modes = args.front().modes();
    for (const TTVector& a : args)
        if (a.modes() != modes) throw DimensionError("cross_elementwise: arguments differ in shape");
    ElementwiseSource src(fn, args);
    return run_cross(src, modes, cfg);
}

}  // namespace fsqtt
