// wigner.hpp — Wigner function of a single-mode Fock-basis density matrix,
// evaluated point-wise in displaced-parity form with Laguerre recursion.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qotto/common.hpp"

namespace qotto {

/// Wigner function sampled on a rectangular (q, p) grid in the convention
/// q = <b + b†>, p = <i(b† - b)>, normalized so that ∬ W dq dp = 1.
/// The vacuum gives W(q,p) = exp(-(q²+p²)/2) / 2π.
struct WignerGrid {
    RealVec q_axis;
    RealVec p_axis;
    RealMat values;  // values(i, j) = W(q_axis(i), p_axis(j))

    /// ∬ W dq dp by the trapezoid rule.
    double normalization() const {
        if (q_axis.size() < 2 || p_axis.size() < 2) return 0.0;
        double sum = 0.0;
        for (Eigen::Index i = 0; i < q_axis.size(); ++i) {
            double wq = (i == 0 || i + 1 == q_axis.size()) ? 0.5 : 1.0;
            for (Eigen::Index j = 0; j < p_axis.size(); ++j) {
                double wp = (j == 0 || j + 1 == p_axis.size()) ? 0.5 : 1.0;
                sum += wq * wp * values(i, j);
            }
        }
        double dq = q_axis(1) - q_axis(0);
        double dp = p_axis(1) - p_axis(0);
        return sum * dq * dp;
    }

    /// Marginal distribution over q (integrates out p).
    RealVec q_marginal() const {
        RealVec m = RealVec::Zero(q_axis.size());
        double dp = p_axis(1) - p_axis(0);
        for (Eigen::Index i = 0; i < q_axis.size(); ++i) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < p_axis.size(); ++j) {
                double wp = (j == 0 || j + 1 == p_axis.size()) ? 0.5 : 1.0;
                s += wp * values(i, j);
            }
            m(i) = s * dp;
        }
        return m;
    }
};

inline RealVec symmetric_axis(double half_width, int n_points) {
    if (n_points < 2) throw std::invalid_argument("symmetric_axis: need >= 2 points");
    return RealVec::LinSpaced(n_points, -half_width, half_width);
}

/// Default axis half-width heuristic: 6 natural widths of the state,
/// sqrt(2<n>+1) being the isotropic thermal quadrature spread.
inline double wigner_half_width(double mean_occupation, double n_widths = 6.0) {
    return n_widths * std::sqrt(2.0 * std::max(0.0, mean_occupation) + 1.0);
}

/// Evaluate the Wigner function of rho on the given axes. Exact for the
/// truncated rho at every grid point; cost O(dim^2) per point.
///
/// Derivation sketch: W(alpha) = (2/pi) tr[rho D(alpha) (-1)^n D†(alpha)]
/// with alpha = (q + i p)/2, and the displaced-parity matrix elements
/// <m|·|n> = (-1)^m sqrt(m!/n!) (2 conj(alpha))^{n-m} e^{-2|alpha|^2}
///            L_m^{(n-m)}(4 |alpha|^2)   for n >= m.
/// The quarter Jacobian from d^2alpha -> dq dp is folded in.
inline RealMat wigner_values(const Mat& rho, const RealVec& q_axis, const RealVec& p_axis) {
    const int dim = int(rho.rows());
    if (rho.cols() != dim) throw std::invalid_argument("wigner: rho must be square");

    // sqrt(m!/n!) prefactors for the k-th superdiagonal: fact(m, k) = sqrt(m!/(m+k)!)
    std::vector<std::vector<double>> fact(dim);
    for (int m = 0; m < dim; ++m) {
        fact[m].resize(dim - m);
        fact[m][0] = 1.0;
        for (int k = 1; m + k < dim; ++k)
            fact[m][k] = fact[m][k - 1] / std::sqrt(double(m + k));
    }

    RealMat w(q_axis.size(), p_axis.size());
    std::vector<double> lag(dim);  // L_m^{(k)}(x) for m = 0..dim-1
    for (Eigen::Index iq = 0; iq < q_axis.size(); ++iq) {
        for (Eigen::Index jp = 0; jp < p_axis.size(); ++jp) {
            const Cplx alpha(0.5 * q_axis(iq), 0.5 * p_axis(jp));
            const double x = 4.0 * std::norm(alpha);
            const double gauss = std::exp(-0.5 * x);  // e^{-2|alpha|^2}
            Cplx total = 0.0;
            for (int k = 0; k < dim; ++k) {
                // Laguerre recursion in the lower index at fixed upper index k.
                const int mmax = dim - k;
                for (int m = 0; m < mmax; ++m) {
                    if (m == 0)
                        lag[m] = 1.0;
                    else if (m == 1)
                        lag[m] = 1.0 + k - x;
                    else
                        lag[m] = ((2.0 * m - 1.0 + k - x) * lag[m - 1] -
                                  (m - 1.0 + k) * lag[m - 2]) /
                                 double(m);
                }
                const Cplx beta = std::pow(2.0 * std::conj(alpha), k);
                Cplx diag_sum = 0.0;
                for (int m = 0; m < mmax; ++m) {
                    const double parity = (m % 2 == 0) ? 1.0 : -1.0;
                    const Cplx elem = parity * fact[m][k] * beta * lag[m];
                    if (k == 0)
                        diag_sum += rho(m, m) * elem;
                    else  // rho is Hermitian: the k-th sub- and superdiagonal pair up
                        diag_sum += rho(m + k, m) * elem + std::conj(rho(m + k, m) * elem);
                }
                total += diag_sum;
            }
            // (2/pi) from the parity form, times 1/4 Jacobian to (q, p).
            w(iq, jp) = (0.5 / pi) * gauss * total.real();
        }
    }
    return w;
}

inline WignerGrid wigner(const Mat& rho, const RealVec& q_axis, const RealVec& p_axis) {
    WignerGrid g;
    g.q_axis = q_axis;
    g.p_axis = p_axis;
    g.values = wigner_values(rho, q_axis, p_axis);
    return g;
}

}  // namespace qotto
