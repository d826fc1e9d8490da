// model.hpp — Physical parameterization: Hamiltonians, bath occupations,
// drive schedule, and the parametric stability check.

#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qotto/common.hpp"
#include "qotto/fock.hpp"

namespace qotto {

enum class Coupling { quadratic, linear };

inline const char* to_string(Coupling c) {
    return c == Coupling::quadratic ? "quadratic" : "linear";
}

/// All engine constants, in units hbar = k_B = 1 and omega_b = 1 (frequencies
/// and rates in omega_b, time in 1/omega_b). Defaults are the baseline
/// operating point: kappa_a = 4, kappa_b = 0.04, g = -0.6, nbar_c = 0.01,
/// nbar_h = 0.45, with kappa_h = kappa_a and omega_a = 2 omega_b.
struct EngineParams {
    double omega_a = 2.0;
    double omega_b = 1.0;
    double g = -0.6;
    double kappa_a = 4.0;
    double kappa_b = 0.04;
    double kappa_h = 4.0;
    double nbar_a = 0.01;
    double nbar_b = 0.01;
    double nbar_h = 0.45;
    double kappa_load = 0.0;  // extra mechanical damping from an external load
    Coupling coupling = Coupling::quadratic;
    int dim_a = 6;
    int dim_b = 14;

    double drive_period() const { return 2.0 * pi / omega_b; }
    ModeDims dims() const { return {dim_a, dim_b}; }

    /// Total mechanical damping seen by the resonator (bath + load).
    double kappa_b_total() const { return kappa_b + kappa_load; }

    void validate() const {
        auto nonneg = [](double v, const char* name) {
            if (v < 0.0 || !std::isfinite(v))
                throw std::invalid_argument(std::string("EngineParams: ") + name +
                                            " must be >= 0");
        };
        nonneg(kappa_a, "kappa_a");
        nonneg(kappa_b, "kappa_b");
        nonneg(kappa_h, "kappa_h");
        nonneg(nbar_a, "nbar_a");
        nonneg(nbar_b, "nbar_b");
        nonneg(nbar_h, "nbar_h");
        nonneg(kappa_load, "kappa_load");
        if (omega_b <= 0.0) throw std::invalid_argument("EngineParams: omega_b must be > 0");
        if (omega_a <= 0.0) throw std::invalid_argument("EngineParams: omega_a must be > 0");
        if (dim_a < 2 || dim_b < 2)
            throw std::invalid_argument("EngineParams: truncations must be >= 2");
    }

    std::string summary() const {
        std::ostringstream os;
        os << "omega_a=" << omega_a << " omega_b=" << omega_b << " g=" << g
           << " kappa_a=" << kappa_a << " kappa_b=" << kappa_b << " kappa_h=" << kappa_h
           << " nbar_a=" << nbar_a << " nbar_b=" << nbar_b << " nbar_h=" << nbar_h
           << " kappa_load=" << kappa_load << " coupling=" << to_string(coupling)
           << " dims=" << dim_a << "x" << dim_b;
        return os.str();
    }
};

/// Square-wave drive window: s(t) = 1 for the first duty fraction of each
/// period (heating), 0 for the rest (cooling). phase shifts the origin.
struct DriveSchedule {
    double period = 2.0 * pi;
    double duty = 0.5;
    double phase = 0.0;

    static DriveSchedule for_params(const EngineParams& p) {
        return {p.drive_period(), 0.5, 0.0};
    }
};

inline int drive_value(const DriveSchedule& s, double t) {
    if (s.duty >= 1.0) return 1;
    if (s.duty <= 0.0) return 0;
    double u = std::fmod(t - s.phase, s.period);
    if (u < 0.0) u += s.period;
    return u < s.duty * s.period ? 1 : 0;
}

/// Bose-Einstein occupation 1/(exp(omega/T) - 1), hbar = k_B = 1.
inline double mean_occupation(double omega, double T) {
    if (omega <= 0.0) throw std::invalid_argument("mean_occupation: omega must be > 0");
    if (T < 0.0) throw std::invalid_argument("mean_occupation: T must be >= 0");
    if (T == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / T);
}

/// Inverse of mean_occupation: T = omega / ln(1 + 1/nbar).
inline double temperature_from_occupation(double nbar, double omega) {
    if (nbar <= 0.0)
        throw std::domain_error("temperature_from_occupation: undefined for nbar <= 0");
    if (omega <= 0.0)
        throw std::invalid_argument("temperature_from_occupation: omega must be > 0");
    return omega / std::log1p(1.0 / nbar);
}

/// H = omega_a n_a + omega_b n_b + g n_a q^k on the joint space,
/// with k = 2 (quadratic coupling) or 1 (linear).
inline SpMat build_hamiltonian(const EngineParams& p) {
    p.validate();
    const ModeDims d = p.dims();
    Mat na = number_op(d.dim_a);
    Mat nb = number_op(d.dim_b);
    auto [q, pq] = quadrature_ops(d.dim_b);
    Mat q_pow = p.coupling == Coupling::quadratic ? Mat(q * q) : q;
    Mat h_b = p.omega_b * nb;
    SpMat H = joint_op_a(p.omega_a * na, d);
    H += joint_op_b(h_b, d);
    H += tensor_sparse(to_sparse(p.g * na), to_sparse(q_pow));
    H.makeCompressed();
    return H;
}

/// Mechanical Hamiltonian alone (used as the reference for ergotropy and
/// free-energy bookkeeping on the reduced piston state).
inline Mat mechanical_hamiltonian(const EngineParams& p) {
    return p.omega_b * number_op(p.dim_b);
}

/// Parametric stability of the quadratically coupled resonator:
/// stable iff omega_b + 4 nbar_cavity g > 0 (strict). Linear coupling is
/// unconditionally stable.
inline bool stability_check(const EngineParams& p, double nbar_cavity) {
    if (p.coupling == Coupling::linear) return true;
    return p.omega_b + 4.0 * nbar_cavity * p.g > 0.0;
}

/// Cavity occupation at the end of the heating stage, (nbar_c + nbar_h)/2
/// when kappa_h = kappa_a; in general (ka*na + kh*nh)/(ka + kh).
inline double steady_cavity_occupation(const EngineParams& p) {
    double B = p.kappa_a + p.kappa_h;
    if (B <= 0.0) return p.nbar_a;
    return (p.kappa_a * p.nbar_a + p.kappa_h * p.nbar_h) / B;
}

/// Largest nbar_h satisfying the stability bound at the heated steady-state
/// occupation, i.e. the solution of omega_b + 4 g (nbar_c + nbar_h)/2 = 0.
inline double stability_bound_nbar_h(const EngineParams& p) {
    if (p.coupling == Coupling::linear || p.g >= 0.0)
        return std::numeric_limits<double>::infinity();
    return -p.omega_b / (2.0 * p.g) - p.nbar_a;
}

/// SI-unit reporting helper. The simulation is unit-free (omega_b = 1);
/// fixing omega_b in rad/s maps energies and powers to joules and watts.
struct PhysicalScale {
    double omega_b_si = pi * 1e9;  // cycle period 2 ns
    static constexpr double hbar = 1.054571817e-34;
    static constexpr double k_boltzmann = 1.380649e-23;

    double energy_joule(double e_sim) const { return e_sim * hbar * omega_b_si; }
    double time_second(double t_sim) const { return t_sim / omega_b_si; }
    double power_watt(double e_sim, double t_sim) const {
        return energy_joule(e_sim) / time_second(t_sim);
    }
    double temperature_kelvin(double t_sim) const {
        return t_sim * hbar * omega_b_si / k_boltzmann;
    }
};

}  // namespace qotto
