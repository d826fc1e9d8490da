// fock.hpp — Truncated Fock-space operator algebra for one and two bosonic modes.

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qotto/common.hpp"

namespace qotto {

/// Annihilation operator on an N-dimensional truncated Fock space:
/// a|n> = sqrt(n)|n-1>, i.e. entries M[n-1, n] = sqrt(n).
inline Mat annihilation(int dim) {
    if (dim < 2) throw std::invalid_argument("annihilation: dim must be >= 2");
    Mat a = Mat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

inline Mat creation(int dim) { return annihilation(dim).adjoint(); }

inline Mat number_op(int dim) {
    if (dim < 1) throw std::invalid_argument("number_op: dim must be >= 1");
    Mat n = Mat::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = double(k);
    return n;
}

inline Mat identity_op(int dim) { return Mat::Identity(dim, dim); }

/// Quadratures q = b + b†, p = i(b† - b). Both Hermitian; [q, p] = 2i
/// except at the truncation corner. Vacuum variance <0|q^2|0> = 1.
inline std::pair<Mat, Mat> quadrature_ops(int dim) {
    if (dim < 2) throw std::invalid_argument("quadrature_ops: dim must be >= 2");
    Mat b = annihilation(dim);
    Mat bd = b.adjoint();
    Mat q = b + bd;
    Mat p = im * (bd - b);
    return {q, p};
}

/// Kronecker product with mode a as the left factor. This ordering is fixed
/// for the whole library; partial traces and joint indices depend on it.
inline Mat tensor(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

inline SpMat to_sparse(const Mat& A, double prune_tol = 0.0) {
    SpMat s = A.sparseView(1.0, prune_tol);
    s.makeCompressed();
    return s;
}

/// Sparse Kronecker product, same ordering as tensor().
inline SpMat tensor_sparse(const SpMat& A, const SpMat& B) {
    std::vector<Eigen::Triplet<Cplx>> trips;
    trips.reserve(std::size_t(A.nonZeros()) * std::size_t(B.nonZeros()));
    for (int ka = 0; ka < A.outerSize(); ++ka)
        for (SpMat::InnerIterator ita(A, ka); ita; ++ita)
            for (int kb = 0; kb < B.outerSize(); ++kb)
                for (SpMat::InnerIterator itb(B, kb); itb; ++itb)
                    trips.emplace_back(int(ita.row() * B.rows() + itb.row()),
                                       int(ita.col() * B.cols() + itb.col()),
                                       ita.value() * itb.value());
    SpMat out(A.rows() * B.rows(), A.cols() * B.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

// Joint-space single-mode operators (optical left, mechanical right).
inline SpMat joint_op_a(const Mat& op_a, const ModeDims& dims) {
    return tensor_sparse(to_sparse(op_a), to_sparse(identity_op(dims.dim_b)));
}

inline SpMat joint_op_b(const Mat& op_b, const ModeDims& dims) {
    return tensor_sparse(to_sparse(identity_op(dims.dim_a)), to_sparse(op_b));
}

}  // namespace qotto
