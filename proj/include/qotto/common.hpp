// common.hpp — Shared scalar/matrix aliases and small utilities.

#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qotto {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<Cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Cplx im{0.0, 1.0};

inline constexpr const char* version = "0.1.0";

/// Truncation dimensions of the two-mode space; optical mode is the left
/// tensor factor everywhere, so the joint basis index is m * dim_b + n.
struct ModeDims {
    int dim_a = 6;
    int dim_b = 14;
    int joint() const { return dim_a * dim_b; }
    bool operator==(const ModeDims&) const = default;
};

/// FNV-1a, used for provenance hashes in output files (stable across runs).
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace qotto
