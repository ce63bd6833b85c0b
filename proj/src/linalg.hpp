#pragma once

// Small dense helpers shared by the TT routines.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace fsqtt::detail {

struct ThinQR {
    Eigen::MatrixXd q;
    Eigen::MatrixXd r;
};

inline ThinQR thin_qr(const Eigen::MatrixXd& a) {
    const Eigen::Index k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    ThinQR out;
    out.q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return out;
}

/// Smallest rank whose discarded tail has squared sum <= delta^2.
inline Eigen::Index truncation_rank(const Eigen::VectorXd& s, double delta) {
    Eigen::Index r = s.size();
    double tail = 0.0;
    const double budget = delta * delta;
    while (r > 1) {
        const double next = tail + s(r - 1) * s(r - 1);
        if (next > budget) break;
        tail = next;
        --r;
    }
    return r;
}

struct TruncatedSVD {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
    bool capped = false;
};

struct ThinSVD {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
};

/// Divide-and-conquer SVD, redone with one-sided Jacobi when the former
/// returns non-finite factors (seen with Eigen 3.4.0 on some inputs).
inline ThinSVD thin_svd(const Eigen::MatrixXd& a) {
    Eigen::BDCSVD<Eigen::MatrixXd> bdc(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ThinSVD out{bdc.matrixU(), bdc.singularValues(), bdc.matrixV()};
    if (out.u.allFinite() && out.s.allFinite() && out.v.allFinite()) return out;
    Eigen::JacobiSVD<Eigen::MatrixXd> jac(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {jac.matrixU(), jac.singularValues(), jac.matrixV()};
}

inline TruncatedSVD truncated_svd(const Eigen::MatrixXd& a, double delta, std::size_t rmax) {
    TruncatedSVD out;
    const ThinSVD svd = thin_svd(a);
    const Eigen::VectorXd& s = svd.s;
    Eigen::Index r = s.size() == 0 ? 0 : truncation_rank(s, delta);
    if (r == 0) r = 1;
    if (static_cast<std::size_t>(r) > rmax) {
        r = static_cast<Eigen::Index>(rmax);
        out.capped = true;
    }
    if (s.size() == 0) {
        out.u = Eigen::MatrixXd::Zero(a.rows(), 1);
        out.s = Eigen::VectorXd::Zero(1);
        out.v = Eigen::MatrixXd::Zero(a.cols(), 1);
        return out;
    }
    out.u = svd.u.leftCols(r);
    out.s = s.head(r);
    out.v = svd.v.leftCols(r);
    return out;
}

}  // namespace fsqtt::detail
