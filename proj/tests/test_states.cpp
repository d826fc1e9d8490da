#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qotto/evolve.hpp"
#include "qotto/states.hpp"
#include "qotto/wigner.hpp"
#include "test_helpers.hpp"

using namespace qotto;

TEST_CASE("partial trace") {
    ModeDims d{3, 4};
    std::mt19937 rng(51);

    SECTION("product states reduce exactly") {
        Mat ra = testing::random_density(d.dim_a, rng);
        Mat rb = testing::random_density(d.dim_b, rng);
        Mat joint = tensor(ra, rb);
        REQUIRE((partial_trace(joint, d, Mode::mechanical) - rb).cwiseAbs().maxCoeff() < 1e-13);
        REQUIRE((partial_trace(joint, d, Mode::optical) - ra).cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("maximally entangled pair reduces to the maximally mixed state") {
        ModeDims d2{2, 2};
        Vec psi = Vec::Zero(4);
        psi(0 * 2 + 0) = 1.0 / std::sqrt(2.0);
        psi(1 * 2 + 1) = 1.0 / std::sqrt(2.0);
        Mat rho = psi * psi.adjoint();
        Mat rb = partial_trace(rho, d2, Mode::mechanical);
        REQUIRE((rb - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("trace is preserved") {
        for (int rep = 0; rep < 10; ++rep) {
            Mat rho = testing::random_density(d.joint(), rng);
            REQUIRE(partial_trace(rho, d, Mode::mechanical).trace().real() ==
                    Catch::Approx(1.0).epsilon(1e-12));
            REQUIRE(partial_trace(rho, d, Mode::optical).trace().real() ==
                    Catch::Approx(1.0).epsilon(1e-12));
        }
    }
    SECTION("factorization mismatch") {
        REQUIRE_THROWS_AS(partial_trace(Mat::Identity(5, 5), d, Mode::optical),
                          std::invalid_argument);
    }
}

TEST_CASE("thermal state") {
    SECTION("nbar = 0 is the vacuum") {
        Mat rho = thermal_state(5, 0.0);
        REQUIRE(rho(0, 0).real() == 1.0);
        REQUIRE(rho.trace().real() == 1.0);
    }
    SECTION("occupation matches the truncated geometric series") {
        Mat rho = thermal_state(14, 0.01);
        Mat n = number_op(14);
        double mean = (rho * n).trace().real();
        REQUIRE(std::abs(mean - 0.01) < 1e-10);
        REQUIRE(mean == Catch::Approx(testing::thermal_mean_series(14, 0.01)).epsilon(1e-14));
    }
    SECTION("entropy equals the closed-form thermal entropy") {
        for (double nbar : {0.0675, 0.3, 1.2}) {
            Mat rho = thermal_state(40, nbar);
            REQUIRE(entropy_vn(rho) == Catch::Approx(thermal_entropy(nbar)).epsilon(1e-8));
        }
        REQUIRE(thermal_entropy(0.0675) == Catch::Approx(0.25168).epsilon(1e-4));
    }
}

TEST_CASE("von Neumann entropy") {
    SECTION("pure state") {
        Mat rho = Mat::Zero(3, 3);
        rho(1, 1) = 1.0;
        REQUIRE(entropy_vn(rho) == 0.0);
    }
    SECTION("maximally mixed qubit") {
        Mat rho = 0.5 * Mat::Identity(2, 2);
        REQUIRE(entropy_vn(rho) == Catch::Approx(std::log(2.0)));
    }
}

TEST_CASE("effective temperature") {
    REQUIRE(effective_temperature(1.0 / (std::exp(1.0) - 1.0), 1.0) == Catch::Approx(1.0));
    double t1 = effective_temperature(0.0675, 1.292);
    REQUIRE(t1 == Catch::Approx(1.292 / std::log1p(1.0 / 0.0675)).epsilon(1e-14));
    REQUIRE(t1 == Catch::Approx(0.468).epsilon(0.01));
    REQUIRE(effective_temperature(0.0675, 2.0 * 1.292) == Catch::Approx(2.0 * t1));
    REQUIRE(effective_temperature(0.0, 1.0) == 0.0);
}

TEST_CASE("ergotropy") {
    Mat H = Mat(number_op(8));

    SECTION("thermal states are passive") {
        REQUIRE(std::abs(ergotropy(thermal_state(8, 0.3), H)) < 1e-12);
    }
    SECTION("population inversion stores one quantum") {
        Mat rho = Mat::Zero(8, 8);
        rho(1, 1) = 1.0;
        REQUIRE(ergotropy(rho, H) == Catch::Approx(1.0));
    }
    SECTION("non-negative on random states") {
        std::mt19937 rng(61);
        for (int rep = 0; rep < 50; ++rep) {
            Mat rho = testing::random_density(8, rng);
            REQUIRE(ergotropy(rho, H) > -1e-12);
        }
    }
    SECTION("dimension mismatch") {
        REQUIRE_THROWS_AS(ergotropy(thermal_state(4, 0.1), H), std::invalid_argument);
    }
}

TEST_CASE("maximum extractable work") {
    Mat H = Mat(number_op(8));
    const double T = 0.4;

    SECTION("zero at the Gibbs state") {
        Mat g = gibbs_state(H, T);
        REQUIRE(std::abs(max_extractable_work(g, H, T)) < 1e-10);
    }
    SECTION("equals T times the relative entropy to the Gibbs state") {
        std::mt19937 rng(67);
        Mat g = gibbs_state(H, T);
        for (int rep = 0; rep < 30; ++rep) {
            Mat rho = testing::random_density(8, rng);
            double lhs = max_extractable_work(rho, H, T);
            double rhs = T * relative_entropy(rho, g);
            REQUIRE(lhs == Catch::Approx(rhs).margin(1e-10));
            REQUIRE(lhs > -1e-10);  // non-negative, zero only at Gibbs
        }
    }
    SECTION("thermal state at the same temperature carries no work") {
        double nbar = mean_occupation(1.0, T);
        Mat rho = thermal_state(40, nbar);
        Mat H40 = Mat(number_op(40));
        REQUIRE(std::abs(max_extractable_work(rho, H40, T)) < 1e-8);
    }
}

TEST_CASE("quadrature statistics") {
    SECTION("vacuum") {
        Mat rho = thermal_state(6, 0.0);
        QuadratureStats st = quadrature_stats(rho);
        REQUIRE(st.mean_q == Catch::Approx(0.0).margin(1e-14));
        REQUIRE(st.mean_p == Catch::Approx(0.0).margin(1e-14));
        REQUIRE(st.q2 == Catch::Approx(1.0));
        REQUIRE(st.p2 == Catch::Approx(1.0));
        REQUIRE(st.var_min == Catch::Approx(1.0));
    }
    SECTION("thermal variances are isotropic 2 nbar + 1") {
        double nbar = 0.35;
        Mat rho = thermal_state(30, nbar);
        QuadratureStats st = quadrature_stats(rho);
        REQUIRE(st.q2 == Catch::Approx(2.0 * nbar + 1.0).epsilon(1e-8));
        REQUIRE(st.p2 == Catch::Approx(2.0 * nbar + 1.0).epsilon(1e-8));
        REQUIRE(st.var_min == Catch::Approx(2.0 * nbar + 1.0).epsilon(1e-8));
    }
    SECTION("squeezed state has var_min below the thermal level") {
        // squeeze the vacuum by hand: S = exp((r/2)(b^2 - b+^2))
        int dim = 24;
        double r = 0.4;
        Mat b = annihilation(dim);
        Mat gen = 0.5 * r * (b * b - Mat(b.adjoint() * b.adjoint()));
        Mat S = gen.exp();
        Vec vac = Vec::Zero(dim);
        vac(0) = 1.0;
        Vec sq = S * vac;
        Mat rho = sq * sq.adjoint();
        QuadratureStats st = quadrature_stats(rho);
        double nb = (rho * Mat(number_op(dim))).trace().real();
        REQUIRE(st.var_min < 1.0);
        REQUIRE(st.var_min < 2.0 * nb + 1.0);
        REQUIRE(st.var_min == Catch::Approx(std::exp(-2.0 * r)).epsilon(1e-6));
    }
}

TEST_CASE("wigner function") {
    SECTION("vacuum peak, normalization, and marginal variance") {
        Mat rho = thermal_state(10, 0.0);
        RealVec axis = symmetric_axis(wigner_half_width(0.0), 201);
        WignerGrid g = wigner(rho, axis, axis);
        Eigen::Index mid = axis.size() / 2;
        REQUIRE(std::abs(g.values(mid, mid) - 1.0 / (2.0 * pi)) < 1e-4);
        REQUIRE(std::abs(g.normalization() - 1.0) < 1e-3);

        RealVec marg = g.q_marginal();
        double dq = axis(1) - axis(0);
        double m0 = 0.0, m2 = 0.0;
        for (Eigen::Index i = 0; i < axis.size(); ++i) {
            m0 += marg(i) * dq;
            m2 += axis(i) * axis(i) * marg(i) * dq;
        }
        REQUIRE(std::abs(m2 / m0 - 1.0) < 1e-3);
    }
    SECTION("thermal state is an isotropic Gaussian with variance 2 nbar + 1") {
        double nbar = 0.45;
        Mat rho = thermal_state(20, nbar);
        RealVec axis = symmetric_axis(wigner_half_width(nbar), 201);
        WignerGrid g = wigner(rho, axis, axis);
        REQUIRE(std::abs(g.normalization() - 1.0) < 1e-3);
        RealVec marg = g.q_marginal();
        double dq = axis(1) - axis(0);
        double m0 = 0.0, m2 = 0.0;
        for (Eigen::Index i = 0; i < axis.size(); ++i) {
            m0 += marg(i) * dq;
            m2 += axis(i) * axis(i) * marg(i) * dq;
        }
        double direct = quadrature_stats(rho).q2;
        REQUIRE(std::abs(m2 / m0 - (2.0 * nbar + 1.0)) < 1e-3);
        REQUIRE(std::abs(m2 / m0 - direct) < 1e-3);
    }
    SECTION("single-photon state dips negative at the origin") {
        Mat rho = Mat::Zero(6, 6);
        rho(1, 1) = 1.0;
        RealVec axis = symmetric_axis(8.0, 81);
        WignerGrid g = wigner(rho, axis, axis);
        Eigen::Index mid = axis.size() / 2;
        REQUIRE(g.values(mid, mid) == Catch::Approx(-1.0 / (2.0 * pi)).epsilon(1e-6));
        REQUIRE(std::abs(g.normalization() - 1.0) < 1e-3);
    }
    SECTION("values are the real part of a Hermitian form (reality check)") {
        std::mt19937 rng(71);
        Mat rho = testing::random_density(8, rng);
        RealVec axis = symmetric_axis(10.0, 41);
        WignerGrid g = wigner(rho, axis, axis);
        REQUIRE(std::abs(g.normalization() - 1.0) < 2e-3);
    }
    SECTION("coherent displacement shows up in the marginal mean") {
        // displaced vacuum: D(alpha)|0> with alpha = 1: <q> = 2 Re alpha = 2
        int dim = 24;
        Mat b = annihilation(dim);
        Cplx alpha(1.0, 0.0);
        Mat gen = alpha * Mat(b.adjoint()) - std::conj(alpha) * b;
        Mat D = gen.exp();
        Vec ket = Vec::Zero(dim);
        ket(0) = 1.0;
        Vec coh = D * ket;
        Mat rho = coh * coh.adjoint();
        RealVec axis = symmetric_axis(8.0, 161);
        WignerGrid g = wigner(rho, axis, axis);
        RealVec marg = g.q_marginal();
        double dq = axis(1) - axis(0);
        double m0 = 0.0, m1 = 0.0;
        for (Eigen::Index i = 0; i < axis.size(); ++i) {
            m0 += marg(i) * dq;
            m1 += axis(i) * marg(i) * dq;
        }
        REQUIRE(m1 / m0 == Catch::Approx(2.0).epsilon(1e-4));
    }
}
