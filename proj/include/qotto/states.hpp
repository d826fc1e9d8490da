// states.hpp — State analysis: partial trace, thermal states, entropies,
// effective temperature, ergotropy, and free-energy work capacity.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qotto/common.hpp"
#include "qotto/fock.hpp"
#include "qotto/model.hpp"

namespace qotto {

enum class Mode { optical, mechanical };

/// Partial trace of a joint-space density matrix, keeping one mode.
/// Relies on the fixed ordering: joint index = m * dim_b + n.
inline Mat partial_trace(const Mat& rho, const ModeDims& d, Mode keep) {
    if (rho.rows() != d.joint() || rho.cols() != d.joint())
        throw std::invalid_argument("partial_trace: state does not factor as dim_a*dim_b");
    if (keep == Mode::mechanical) {
        Mat out = Mat::Zero(d.dim_b, d.dim_b);
        for (int m = 0; m < d.dim_a; ++m)
            out += rho.block(m * d.dim_b, m * d.dim_b, d.dim_b, d.dim_b);
        return out;
    }
    Mat out = Mat::Zero(d.dim_a, d.dim_a);
    for (int m = 0; m < d.dim_a; ++m)
        for (int mp = 0; mp < d.dim_a; ++mp)
            out(m, mp) = rho.block(m * d.dim_b, mp * d.dim_b, d.dim_b, d.dim_b).trace();
    return out;
}

/// Thermal state with p_n ∝ (nbar/(1+nbar))^n, renormalized on the truncated
/// space so it is an exact fixed point of the truncated thermal channel.
inline Mat thermal_state(int dim, double nbar) {
    if (dim < 1) throw std::invalid_argument("thermal_state: dim must be >= 1");
    if (nbar < 0.0) throw std::invalid_argument("thermal_state: nbar must be >= 0");
    Mat rho = Mat::Zero(dim, dim);
    if (nbar == 0.0) {
        rho(0, 0) = 1.0;
        return rho;
    }
    double r = nbar / (1.0 + nbar);
    double w = 1.0, norm = 0.0;
    for (int n = 0; n < dim; ++n, w *= r) {
        rho(n, n) = w;
        norm += w;
    }
    rho /= norm;
    return rho;
}

inline std::vector<double> state_eigenvalues(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + rho.rows());
    return ev;
}

/// Von Neumann entropy in nats, with 0 ln 0 := 0. Small negative eigenvalues
/// from truncation noise are clamped.
inline double entropy_vn(const Mat& rho) {
    double s = 0.0;
    for (double lam : state_eigenvalues(rho))
        if (lam > 0.0) s -= lam * std::log(lam);
    return s;
}

/// Entropy of a thermal (or effectively thermal) mode at occupation n:
/// (1+n) ln(1+n) - n ln n.
inline double thermal_entropy(double n) {
    if (n <= 0.0) return 0.0;
    return (1.0 + n) * std::log1p(n) - n * std::log(n);
}

/// T_eff = omega_eff / ln(1 + 1/n_a); zero by convention at n_a = 0.
inline double effective_temperature(double n_a, double omega_eff) {
    if (n_a < 0.0) throw std::invalid_argument("effective_temperature: n_a must be >= 0");
    if (omega_eff <= 0.0)
        throw std::invalid_argument("effective_temperature: omega_eff must be > 0");
    if (n_a == 0.0) return 0.0;
    return omega_eff / std::log1p(1.0 / n_a);
}

/// Maximum work extractable by a cyclic unitary: tr(rho H) minus the energy
/// of the passive counterpart (rho eigenvalues sorted descending against H
/// eigenvalues sorted ascending). Non-negative; zero for passive states.
inline double ergotropy(const Mat& rho, const Mat& H) {
    if (rho.rows() != H.rows() || rho.cols() != H.cols())
        throw std::invalid_argument("ergotropy: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> er(rho, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> eh(H, Eigen::EigenvaluesOnly);
    std::vector<double> r(er.eigenvalues().data(), er.eigenvalues().data() + rho.rows());
    std::vector<double> e(eh.eigenvalues().data(), eh.eigenvalues().data() + H.rows());
    std::sort(r.begin(), r.end(), std::greater<>());  // populations descending
    std::sort(e.begin(), e.end());                    // energies ascending
    double passive = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) passive += r[j] * e[j];
    double mean = (rho * H).trace().real();
    return mean - passive;
}

/// Gibbs state exp(-H/T)/Z on the same truncated space as H.
inline Mat gibbs_state(const Mat& H, double T) {
    if (T <= 0.0) throw std::invalid_argument("gibbs_state: T must be > 0");
    Eigen::SelfAdjointEigenSolver<Mat> eh(H);
    RealVec e = eh.eigenvalues();
    double e0 = e.minCoeff();
    RealVec w = (-(e.array() - e0) / T).exp();
    w /= w.sum();
    return eh.eigenvectors() * w.cast<Cplx>().asDiagonal() * eh.eigenvectors().adjoint();
}

/// Free energy F(rho) = tr(rho H) - T S(rho).
inline double free_energy(const Mat& rho, const Mat& H, double T) {
    return (rho * H).trace().real() - T * entropy_vn(rho);
}

/// Work capacity Delta F = F(rho) - F(gibbs(H, T)), the free-energy bound on
/// extractable work at bath temperature T. Equals T * S(rho || gibbs).
inline double max_extractable_work(const Mat& rho, const Mat& H, double T) {
    if (rho.rows() != H.rows()) throw std::invalid_argument("max_extractable_work: dims");
    Mat g = gibbs_state(H, T);
    return free_energy(rho, H, T) - free_energy(g, H, T);
}

/// Quantum relative entropy S(rho || sigma) in nats; sigma must be full rank.
inline double relative_entropy(const Mat& rho, const Mat& sigma) {
    Eigen::SelfAdjointEigenSolver<Mat> er(rho);
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
    double s = 0.0;
    // tr rho ln rho
    for (Eigen::Index i = 0; i < er.eigenvalues().size(); ++i) {
        double lam = er.eigenvalues()(i);
        if (lam > 0.0) s += lam * std::log(lam);
    }
    // - tr rho ln sigma, expanded in sigma's eigenbasis
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
        double mu = es.eigenvalues()(j);
        if (mu <= 0.0)
            throw std::domain_error("relative_entropy: sigma must be positive definite");
        double overlap =
            (es.eigenvectors().col(j).adjoint() * rho * es.eigenvectors().col(j))(0).real();
        s -= overlap * std::log(mu);
    }
    return s;
}

struct QuadratureStats {
    double mean_q = 0.0;
    double mean_p = 0.0;
    double q2 = 0.0;
    double p2 = 0.0;
    double var_min = 0.0;  // minimum variance over rotated quadratures
};

/// First and second quadrature moments of a single-mode state, plus the
/// minimum rotated-quadrature variance from the 2x2 covariance matrix.
inline QuadratureStats quadrature_stats(const Mat& rho) {
    int dim = int(rho.rows());
    auto [q, p] = quadrature_ops(dim);
    QuadratureStats st;
    st.mean_q = (rho * q).trace().real();
    st.mean_p = (rho * p).trace().real();
    st.q2 = (rho * q * q).trace().real();
    st.p2 = (rho * p * p).trace().real();
    double vq = st.q2 - st.mean_q * st.mean_q;
    double vp = st.p2 - st.mean_p * st.mean_p;
    double cqp = 0.5 * (rho * (q * p + p * q)).trace().real() - st.mean_q * st.mean_p;
    double avg = 0.5 * (vq + vp);
    double dev = std::sqrt(0.25 * (vq - vp) * (vq - vp) + cqp * cqp);
    st.var_min = avg - dev;
    return st;
}

}  // namespace qotto
