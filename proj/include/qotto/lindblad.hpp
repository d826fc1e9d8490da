// lindblad.hpp — Dissipators and the piecewise-constant Liouvillian of the
// periodically driven two-mode master equation.

#pragma once

#include <stdexcept>
#include <vector>

#include "qotto/common.hpp"
#include "qotto/fock.hpp"
#include "qotto/model.hpp"

namespace qotto {

/// D[J](rho) = J rho J† - (J†J rho + rho J†J)/2, as a matrix on the state space.
inline Mat dissipator_apply(const Mat& jump, const Mat& rho) {
    if (jump.rows() != rho.rows() || jump.cols() != rho.cols() || rho.rows() != rho.cols())
        throw std::invalid_argument("dissipator_apply: dimension mismatch");
    Mat jd = jump.adjoint();
    Mat jdj = jd * jump;
    return jump * rho * jd - 0.5 * (jdj * rho + rho * jdj);
}

// Column-stacking vectorization: vec(A X B) = (B^T ⊗ A) vec(X). With Eigen's
// column-major storage, vec(X) is X's linear memory, so reshape is free.
inline Vec vec_state(const Mat& rho) {
    return Eigen::Map<const Vec>(rho.data(), rho.size());
}

inline Mat unvec_state(const Vec& v, int n) {
    return Eigen::Map<const Mat>(v.data(), n, n);
}

/// Superoperator of rho -> A rho.
inline SpMat left_mult_superop(const SpMat& A) {
    SpMat id(A.rows(), A.cols());
    id.setIdentity();
    return tensor_sparse(id, A);
}

/// Superoperator of rho -> rho A.
inline SpMat right_mult_superop(const SpMat& A) {
    SpMat id(A.rows(), A.cols());
    id.setIdentity();
    return tensor_sparse(SpMat(A.transpose()), id);
}

/// Superoperator of the dissipator D[J].
inline SpMat dissipator_superop(const SpMat& J) {
    SpMat jd = J.adjoint();
    SpMat jdj = (jd * J).pruned();
    SpMat id(J.rows(), J.cols());
    id.setIdentity();
    SpMat out = tensor_sparse(SpMat(J.conjugate()), J);
    out -= Cplx(0.5) * tensor_sparse(id, jdj);
    out -= Cplx(0.5) * tensor_sparse(SpMat(jdj.transpose()), id);
    out.prune(Cplx(0));
    out.makeCompressed();
    return out;
}

/// Superoperator of rho -> -i[H, rho].
inline SpMat hamiltonian_superop(const SpMat& H) {
    SpMat id(H.rows(), H.cols());
    id.setIdentity();
    SpMat out = -im * tensor_sparse(id, H);
    out += im * tensor_sparse(SpMat(H.transpose()), id);
    out.prune(Cplx(0));
    out.makeCompressed();
    return out;
}

/// Thermal pair of weighted jump operators for one mode at rate kappa and
/// occupation nbar: sqrt(kappa(nbar+1)) alpha and sqrt(kappa nbar) alpha†.
inline std::vector<SpMat> thermal_jumps(const SpMat& lower, double kappa, double nbar) {
    std::vector<SpMat> jumps;
    if (kappa <= 0.0) return jumps;
    jumps.push_back(SpMat(std::sqrt(kappa * (nbar + 1.0)) * lower));
    if (nbar > 0.0) jumps.push_back(SpMat(std::sqrt(kappa * nbar) * lower.adjoint()));
    return jumps;
}

/// Generators for the two drive segments. segment_off holds the Hamiltonian
/// commutator plus the kappa_a and kappa_b channels; segment_on adds the
/// kappa_h channels on the optical mode.
struct Liouvillian {
    SpMat on;
    SpMat off;
    ModeDims dims;

    const SpMat& segment(bool drive_on) const { return drive_on ? on : off; }
};

/// Superoperator of the kappa_h drive channel alone (difference on - off).
inline SpMat drive_channel_superop(const EngineParams& p) {
    const ModeDims d = p.dims();
    SpMat a = joint_op_a(annihilation(d.dim_a), d);
    SpMat out(d.joint() * d.joint(), d.joint() * d.joint());
    for (const auto& J : thermal_jumps(a, p.kappa_h, p.nbar_h)) out += dissipator_superop(J);
    out.makeCompressed();
    return out;
}

inline Liouvillian build_liouvillian(const EngineParams& p) {
    p.validate();
    const ModeDims d = p.dims();
    SpMat a = joint_op_a(annihilation(d.dim_a), d);
    SpMat b = joint_op_b(annihilation(d.dim_b), d);

    SpMat off = hamiltonian_superop(build_hamiltonian(p));
    for (const auto& J : thermal_jumps(a, p.kappa_a, p.nbar_a)) off += dissipator_superop(J);
    for (const auto& J : thermal_jumps(b, p.kappa_b_total(), p.nbar_b))
        off += dissipator_superop(J);
    off.makeCompressed();

    SpMat on = off + drive_channel_superop(p);
    on.makeCompressed();
    return {std::move(on), std::move(off), d};
}

}  // namespace qotto
