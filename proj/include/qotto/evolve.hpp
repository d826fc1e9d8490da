// evolve.hpp — Integration of the piecewise-constant master equation:
// cached matrix-exponential propagators on invariant components (default at
// small dimensions) and fixed-step RK4 on the vectorized state.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qotto/common.hpp"
#include "qotto/lindblad.hpp"
#include "qotto/states.hpp"

namespace qotto {

enum class Backend { automatic, rk4, expm };

inline const char* to_string(Backend b) {
    switch (b) {
        case Backend::rk4: return "rk4";
        case Backend::expm: return "expm";
        default: return "auto";
    }
}

enum class RecordMode { observables_only, full_state };

struct SolverOptions {
    Backend backend = Backend::automatic;
    double dt = 0.0;                // RK4 step; 0 = 1e-3 * period, stability-capped
    double cycle_tol = 1e-7;        // stroboscopic trace-distance tolerance
    int max_cycles = 2000;
    int samples_per_period = 256;
    double tol_trace = 1e-8;
    double tol_herm = 1e-9;
    double tol_eig = 1e-8;          // abort threshold on -min_eig is 100x this
    double warn_factor = 10.0;
    double abort_factor = 100.0;
    bool check_invariants = true;
    int expm_max_joint = 100;       // automatic backend: expm up to this joint dim

    Backend resolve(int joint_dim) const {
        if (backend != Backend::automatic) return backend;
        return joint_dim <= expm_max_joint ? Backend::expm : Backend::rk4;
    }
};

struct NonConvergenceError : std::runtime_error {
    double residual;
    int cycles;
    NonConvergenceError(double r, int c)
        : std::runtime_error("limit cycle not converged after " + std::to_string(c) +
                             " cycles; last stroboscopic residual " + std::to_string(r)),
          residual(r),
          cycles(c) {}
};

struct InvariantViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StateHealth {
    double trace_err = 0.0;  // |tr rho - 1|
    double herm_err = 0.0;   // max_ij |rho - rho†|
    double min_eig = 0.0;
};

inline StateHealth state_health(const Mat& rho) {
    StateHealth h;
    h.trace_err = std::abs(rho.trace() - Cplx(1.0));
    h.herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    Mat herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
    h.min_eig = es.eigenvalues().minCoeff();
    return h;
}

/// Trace distance (1/2)||a - b||_1 between Hermitian unit-trace matrices.
inline double trace_distance(const Mat& a, const Mat& b) {
    Mat d = 0.5 * ((a - b) + (a - b).adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct TrajectorySample {
    double t = 0.0;
    bool drive_on = false;
    double n_a = 0.0;
    double n_b = 0.0;
    double q2 = 0.0;
    double p2 = 0.0;
    double s_a = 0.0;
    double trace_err = 0.0;
    double herm_err = 0.0;
    double min_eig = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<Mat> states;  // parallel to samples when mode == full_state
    RecordMode mode = RecordMode::observables_only;
    int warnings = 0;  // samples that crossed the warn threshold
};

/// Joint-space observables reused across samples.
struct JointObservables {
    SpMat n_a, n_b, q2, p2;
    ModeDims dims;

    static JointObservables build(const ModeDims& d) {
        auto [q, p] = quadrature_ops(d.dim_b);
        JointObservables o;
        o.dims = d;
        o.n_a = joint_op_a(number_op(d.dim_a), d);
        o.n_b = joint_op_b(number_op(d.dim_b), d);
        o.q2 = joint_op_b(Mat(q * q), d);
        o.p2 = joint_op_b(Mat(p * p), d);
        return o;
    }
};

inline double expect_real(const SpMat& op, const Mat& rho) {
    Cplx s = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SpMat::InnerIterator it(op, k); it; ++it)
            s += it.value() * rho(it.col(), it.row());
    return s.real();
}

// --- invariant components of the generator pattern -------------------------

/// Weakly connected components of the union of both segment patterns. Any
/// state supported on one component stays there for all times, so each
/// component can be propagated (and exponentiated) independently.
struct ComponentSplit {
    std::vector<int> comp_of;               // vectorized index -> component id
    std::vector<std::vector<int>> members;  // component id -> sorted indices
};

namespace detail {

class UnionFind {
  public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

  private:
    std::vector<int> parent_;
};

inline void unite_pattern(UnionFind& uf, const SpMat& L) {
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it)
            if (it.value() != Cplx(0)) uf.unite(int(it.row()), int(it.col()));
}

}  // namespace detail

inline ComponentSplit find_components(const SpMat& on, const SpMat& off) {
    const int n = int(on.rows());
    detail::UnionFind uf(n);
    detail::unite_pattern(uf, on);
    detail::unite_pattern(uf, off);
    ComponentSplit split;
    split.comp_of.resize(n);
    std::map<int, int> root_to_id;
    for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        auto [it, inserted] = root_to_id.try_emplace(r, int(split.members.size()));
        if (inserted) split.members.emplace_back();
        split.comp_of[i] = it->second;
        split.members[it->second].push_back(i);
    }
    return split;
}

/// Rows/cols of L restricted to the given (sorted) index set.
inline SpMat submatrix(const SpMat& L, const std::vector<int>& idx) {
    std::vector<int> local(L.rows(), -1);
    for (std::size_t i = 0; i < idx.size(); ++i) local[idx[i]] = int(i);
    std::vector<Eigen::Triplet<Cplx>> trips;
    for (int c : idx)
        for (SpMat::InnerIterator it(L, c); it; ++it)
            if (local[it.row()] >= 0)
                trips.emplace_back(local[it.row()], local[it.col()], it.value());
    SpMat out(int(idx.size()), int(idx.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

/// Spectral-radius estimate by power iteration (for the RK4 stability cap).
inline double spectral_radius_estimate(const SpMat& L, int iters = 25) {
    if (L.rows() == 0) return 0.0;
    Vec v = Vec::Ones(L.rows());
    v.normalize();
    double lam = 0.0;
    for (int i = 0; i < iters; ++i) {
        Vec w = L * v;
        lam = w.norm();
        if (lam == 0.0) return 0.0;
        v = w / lam;
    }
    return lam;
}

// --- the evolver ------------------------------------------------------------

/// Walks the piecewise-constant generator through drive segments, advancing
/// the vectorized state with either cached dense exponentials or RK4,
/// restricted to the components that actually carry weight.
class Evolver {
  public:
    Evolver(const Liouvillian& liou, const DriveSchedule& schedule, const SolverOptions& opt,
            const Mat& rho0)
        : liou_(liou), schedule_(schedule), opt_(opt), backend_(opt.resolve(liou.dims.joint())) {
        const int n = liou_.dims.joint();
        if (rho0.rows() != n || rho0.cols() != n)
            throw std::invalid_argument("Evolver: state dimension mismatch");
        split_ = find_components(liou_.on, liou_.off);
        Vec v0 = vec_state(rho0);
        for (std::size_t c = 0; c < split_.members.size(); ++c) {
            bool nonzero = false;
            for (int i : split_.members[c])
                if (v0(i) != Cplx(0)) {
                    nonzero = true;
                    break;
                }
            if (nonzero) active_.push_back(int(c));
        }
        for (int c : active_) {
            const auto& idx = split_.members[c];
            Vec sub(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) sub(i) = v0(idx[i]);
            state_.push_back(std::move(sub));
            block_on_.push_back(submatrix(liou_.on, idx));
            block_off_.push_back(submatrix(liou_.off, idx));
        }
        if (backend_ == Backend::rk4) {
            double radius = 0.0;
            for (std::size_t k = 0; k < active_.size(); ++k)
                radius = std::max({radius, spectral_radius_estimate(block_on_[k]),
                                   spectral_radius_estimate(block_off_[k])});
            double dt_user = opt_.dt > 0.0 ? opt_.dt : 1e-3 * schedule_.period;
            dt_cap_ = radius > 0.0 ? std::min(dt_user, 2.5 / radius) : dt_user;
        }
    }

    double time() const { return t_; }
    Backend backend() const { return backend_; }
    const ComponentSplit& components() const { return split_; }
    std::size_t active_components() const { return active_.size(); }

    /// Reassemble the full density matrix from the component subvectors.
    Mat state() const {
        const int n = liou_.dims.joint();
        Vec v = Vec::Zero(std::int64_t(n) * n);
        for (std::size_t k = 0; k < active_.size(); ++k) {
            const auto& idx = split_.members[active_[k]];
            for (std::size_t i = 0; i < idx.size(); ++i) v(idx[i]) = state_[k](i);
        }
        return unvec_state(v, n);
    }

    void advance_to(double t_target) {
        const double eps = 1e-9 * schedule_.period;
        while (t_target - t_ > eps) {
            double edge = next_edge(t_);
            double t_stop = std::min(edge, t_target);
            bool on = drive_value(schedule_, 0.5 * (t_ + t_stop)) == 1;
            step_segment(on, t_stop - t_);
            t_ = t_stop;
        }
        t_ = std::max(t_, t_target);
    }

  private:
    double next_edge(double t) const {
        if (schedule_.duty <= 0.0 || schedule_.duty >= 1.0)
            return std::numeric_limits<double>::infinity();
        const double eps = 1e-9 * schedule_.period;
        double k = std::floor((t - schedule_.phase) / schedule_.period);
        for (double kk = k - 1.0;; kk += 1.0) {
            double on_edge = schedule_.phase + (kk + schedule_.duty) * schedule_.period;
            if (on_edge > t + eps) return on_edge;
            double off_edge = schedule_.phase + (kk + 1.0) * schedule_.period;
            if (off_edge > t + eps) return off_edge;
        }
    }

    void step_segment(bool on, double tau) {
        if (tau <= 0.0) return;
        if (backend_ == Backend::expm)
            step_expm(on, tau);
        else
            step_rk4(on, tau);
    }

    void step_expm(bool on, double tau) {
        auto& cache = on ? cache_on_ : cache_off_;
        const std::int64_t key = llround(tau * 1e12);
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::vector<Mat> props;
            props.reserve(active_.size());
            for (std::size_t k = 0; k < active_.size(); ++k) {
                Mat dense = Mat(on ? block_on_[k] : block_off_[k]) * tau;
                props.push_back(dense.exp());
            }
            it = cache.emplace(key, std::move(props)).first;
        }
        for (std::size_t k = 0; k < active_.size(); ++k)
            state_[k] = it->second[k] * state_[k];
    }

    void step_rk4(bool on, double tau) {
        int n_sub = std::max(1, int(std::ceil(tau / dt_cap_ - 1e-12)));
        double h = tau / n_sub;
        for (std::size_t k = 0; k < active_.size(); ++k) {
            const SpMat& L = on ? block_on_[k] : block_off_[k];
            Vec& v = state_[k];
            for (int s = 0; s < n_sub; ++s) {
                Vec k1 = L * v;
                Vec k2 = L * Vec(v + 0.5 * h * k1);
                Vec k3 = L * Vec(v + 0.5 * h * k2);
                Vec k4 = L * Vec(v + h * k3);
                v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
    }

    Liouvillian liou_;
    DriveSchedule schedule_;
    SolverOptions opt_;
    Backend backend_;
    ComponentSplit split_;
    std::vector<int> active_;
    std::vector<Vec> state_;
    std::vector<SpMat> block_on_, block_off_;
    std::map<std::int64_t, std::vector<Mat>> cache_on_, cache_off_;
    double t_ = 0.0;
    double dt_cap_ = 0.0;
};

// --- sampling and the public entry points -----------------------------------

inline TrajectorySample make_sample(const Mat& rho, double t, bool drive_on,
                                    const JointObservables& obs) {
    TrajectorySample s;
    s.t = t;
    s.drive_on = drive_on;
    s.n_a = expect_real(obs.n_a, rho);
    s.n_b = expect_real(obs.n_b, rho);
    s.q2 = expect_real(obs.q2, rho);
    s.p2 = expect_real(obs.p2, rho);
    s.s_a = entropy_vn(partial_trace(rho, obs.dims, Mode::optical));
    StateHealth h = state_health(rho);
    s.trace_err = h.trace_err;
    s.herm_err = h.herm_err;
    s.min_eig = h.min_eig;
    return s;
}

namespace detail {

inline void enforce_invariants(const TrajectorySample& s, const SolverOptions& opt,
                               Trajectory& traj) {
    if (!opt.check_invariants) return;
    double worst = std::max({s.trace_err / opt.tol_trace, s.herm_err / opt.tol_herm,
                             -s.min_eig / opt.tol_eig});
    if (worst > opt.abort_factor)
        throw InvariantViolationError(
            "state invariants violated at t = " + std::to_string(s.t) +
            ": trace_err = " + std::to_string(s.trace_err) +
            ", herm_err = " + std::to_string(s.herm_err) +
            ", min_eig = " + std::to_string(s.min_eig));
    if (worst > opt.warn_factor) ++traj.warnings;
}

}  // namespace detail

/// Integrate from rho0 and record at the given (sorted, non-negative) times.
inline Trajectory evolve_sampled(const Mat& rho0, const Liouvillian& liou,
                                 const DriveSchedule& schedule, const std::vector<double>& times,
                                 const SolverOptions& opt = {},
                                 RecordMode mode = RecordMode::observables_only) {
    Evolver ev(liou, schedule, opt, rho0);
    JointObservables obs = JointObservables::build(liou.dims);
    Trajectory traj;
    traj.mode = mode;
    traj.samples.reserve(times.size());
    for (double t : times) {
        ev.advance_to(t);
        Mat rho = ev.state();
        TrajectorySample s = make_sample(rho, t, drive_value(schedule, t) == 1, obs);
        detail::enforce_invariants(s, opt, traj);
        traj.samples.push_back(s);
        if (mode == RecordMode::full_state) traj.states.push_back(std::move(rho));
    }
    return traj;
}

/// Integrate to t_final, sampling every sample_every time units.
inline Trajectory evolve(const Mat& rho0, const Liouvillian& liou, const DriveSchedule& schedule,
                         double t_final, double sample_every, const SolverOptions& opt = {},
                         RecordMode mode = RecordMode::observables_only) {
    if (t_final < 0.0) throw std::invalid_argument("evolve: t_final must be >= 0");
    std::vector<double> times;
    if (t_final > 0.0) {
        if (sample_every <= 0.0) throw std::invalid_argument("evolve: sample_every must be > 0");
        const auto n = std::int64_t(std::floor(t_final / sample_every + 1e-9));
        for (std::int64_t i = 0; i <= n; ++i)
            times.push_back(std::min(double(i) * sample_every, t_final));
        if (times.back() < t_final * (1.0 - 1e-12)) times.push_back(t_final);
    }
    return evolve_sampled(rho0, liou, schedule, times, opt, mode);
}

struct LimitCycleResult {
    Mat state;          // stroboscopic fixed point at the period start
    Trajectory period;  // one fully sampled period from that state
    int cycles = 0;
    double residual = 0.0;
};

/// Iterate whole periods until the stroboscopic state stops moving (trace
/// distance below opt.cycle_tol), then sample one full period.
inline LimitCycleResult limit_cycle(const Mat& rho0, const Liouvillian& liou,
                                    const DriveSchedule& schedule, const SolverOptions& opt = {}) {
    Evolver ev(liou, schedule, opt, rho0);
    Mat prev = rho0;
    int cycle = 0;
    double residual = std::numeric_limits<double>::infinity();
    while (cycle < opt.max_cycles) {
        ev.advance_to(double(cycle + 1) * schedule.period);
        ++cycle;
        Mat cur = ev.state();
        residual = trace_distance(cur, prev);
        prev = std::move(cur);
        if (residual < opt.cycle_tol) break;
    }
    if (residual >= opt.cycle_tol) throw NonConvergenceError(residual, cycle);

    LimitCycleResult out;
    out.state = prev;
    out.cycles = cycle;
    out.residual = residual;
    const int n_samp = std::max(2, opt.samples_per_period);
    std::vector<double> times(n_samp + 1);
    for (int i = 0; i <= n_samp; ++i) times[i] = schedule.period * double(i) / n_samp;
    Trajectory traj = evolve_sampled(prev, liou, schedule, times, opt);
    out.period = std::move(traj);
    return out;
}

}  // namespace qotto
