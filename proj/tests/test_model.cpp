#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qotto/model.hpp"
#include "test_helpers.hpp"

using namespace qotto;

TEST_CASE("mean occupation") {
    SECTION("frozen mode limit") {
        REQUIRE(mean_occupation(1.0, 1e-6) < 1e-300);
        REQUIRE(mean_occupation(1.0, 0.0) == 0.0);
    }
    SECTION("omega/T = ln 2 gives one quantum") {
        REQUIRE(mean_occupation(std::log(2.0), 1.0) == Catch::Approx(1.0));
    }
    SECTION("round trip with temperature_from_occupation") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> uo(0.1, 20.0), ut(0.05, 10.0);
        for (int rep = 0; rep < 200; ++rep) {
            double omega = uo(rng), T = ut(rng);
            double n = mean_occupation(omega, T);
            if (n <= 0.0) continue;  // underflow at extreme omega/T
            REQUIRE(temperature_from_occupation(n, omega) ==
                    Catch::Approx(T).epsilon(1e-12));
        }
    }
    SECTION("strictly decreasing in omega/T") {
        double prev = mean_occupation(0.05, 1.0);
        for (double omega = 0.1; omega < 10.0; omega += 0.1) {
            double cur = mean_occupation(omega, 1.0);
            REQUIRE(cur < prev);
            prev = cur;
        }
    }
    SECTION("errors") {
        REQUIRE_THROWS_AS(mean_occupation(1.0, -0.1), std::invalid_argument);
        REQUIRE_THROWS_AS(temperature_from_occupation(0.0, 1.0), std::domain_error);
        REQUIRE_THROWS_AS(temperature_from_occupation(-1.0, 1.0), std::domain_error);
    }
}

TEST_CASE("temperature from occupation") {
    SECTION("nbar = 1/(e-1) at omega 1 is T = 1") {
        REQUIRE(temperature_from_occupation(1.0 / (std::exp(1.0) - 1.0), 1.0) ==
                Catch::Approx(1.0));
    }
    SECTION("equal occupations imply T_a/T_b = omega_a/omega_b") {
        double nbar = 0.01, ratio = 20.8;
        double ta = temperature_from_occupation(nbar, ratio);
        double tb = temperature_from_occupation(nbar, 1.0);
        REQUIRE(ta / tb == Catch::Approx(ratio).epsilon(1e-12));
    }
    SECTION("hot-drive temperature at nbar_h = 0.45") {
        double omega_a = 2.0;
        double th = temperature_from_occupation(0.45, omega_a);
        REQUIRE(th == Catch::Approx(omega_a / std::log(1.0 + 1.0 / 0.45)).epsilon(1e-14));
        REQUIRE(th == Catch::Approx(omega_a / 1.1701).epsilon(1e-3));
    }
}

TEST_CASE("hamiltonian construction") {
    EngineParams p;
    p.dim_a = 4;
    p.dim_b = 6;

    SECTION("g = 0 is diagonal with omega_a m + omega_b n") {
        EngineParams p0 = p;
        p0.g = 0.0;
        Mat h = Mat(build_hamiltonian(p0));
        for (int m = 0; m < p0.dim_a; ++m)
            for (int n = 0; n < p0.dim_b; ++n) {
                int k = m * p0.dim_b + n;
                REQUIRE(h(k, k).real() ==
                        Catch::Approx(p0.omega_a * m + p0.omega_b * n).margin(1e-14));
            }
        Mat offdiag = h - Mat(h.diagonal().asDiagonal());
        REQUIRE(offdiag.cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("quadratic vacuum expectation <1,0|H|1,0> = omega_a + g") {
        Mat h = Mat(build_hamiltonian(p));
        int k = 1 * p.dim_b + 0;
        REQUIRE(h(k, k).real() == Catch::Approx(p.omega_a + p.g));
    }
    SECTION("H commutes with n_a for both couplings") {
        for (Coupling c : {Coupling::quadratic, Coupling::linear}) {
            EngineParams pc = p;
            pc.coupling = c;
            Mat h = Mat(build_hamiltonian(pc));
            Mat na = Mat(joint_op_a(number_op(pc.dim_a), pc.dims()));
            REQUIRE((h * na - na * h).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SECTION("hermitian for random parameter draws") {
        std::mt19937 rng(19);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            EngineParams pr;
            pr.dim_a = 3;
            pr.dim_b = 5;
            pr.omega_a = 0.5 + 4.0 * u(rng);
            pr.g = -1.5 + 3.0 * u(rng);
            pr.kappa_a = 5.0 * u(rng);
            pr.nbar_h = u(rng);
            pr.coupling = u(rng) < 0.5 ? Coupling::quadratic : Coupling::linear;
            Mat h = Mat(build_hamiltonian(pr));
            REQUIRE((h - Mat(h.adjoint())).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("stability check") {
    EngineParams p;  // g = -0.6 baseline
    SECTION("baseline at nbar_h = 0.45 is stable") {
        double nbar = (0.01 + 0.45) / 2.0;
        REQUIRE(p.omega_b + 4.0 * nbar * p.g == Catch::Approx(0.448));
        REQUIRE(stability_check(p, nbar));
    }
    SECTION("marginal occupation fails the strict inequality") {
        double nbar = 1.0 / (4.0 * 0.6);
        REQUIRE_FALSE(stability_check(p, nbar));
    }
    SECTION("bound on nbar_h reproduces the stated threshold") {
        REQUIRE(stability_bound_nbar_h(p) == Catch::Approx(0.82333).epsilon(1e-4));
        EngineParams hot = p;
        hot.nbar_h = 0.9;
        REQUIRE_FALSE(stability_check(hot, steady_cavity_occupation(hot)));
        hot.nbar_h = 0.45;
        REQUIRE(stability_check(hot, steady_cavity_occupation(hot)));
    }
    SECTION("linear coupling is unconditionally stable") {
        EngineParams lin = p;
        lin.coupling = Coupling::linear;
        REQUIRE(stability_check(lin, 100.0));
    }
}

TEST_CASE("drive schedule") {
    DriveSchedule s;  // period 2 pi, duty 0.5, phase 0
    SECTION("heating starts the cycle") {
        REQUIRE(drive_value(s, 0.0) == 1);
        REQUIRE(drive_value(s, 0.49 * s.period) == 1);
        REQUIRE(drive_value(s, 0.5 * s.period) == 0);
        REQUIRE(drive_value(s, 0.99 * s.period) == 0);
    }
    SECTION("periodicity at random times") {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> u(0.0, 50.0);
        for (int rep = 0; rep < 300; ++rep) {
            double t = u(rng);
            int v = drive_value(s, t);
            REQUIRE((v == 0 || v == 1));
            REQUIRE(drive_value(s, t + s.period) == v);
        }
    }
    SECTION("duty fraction is one half") {
        int on = 0, total = 20000;
        for (int i = 0; i < total; ++i)
            on += drive_value(s, (i + 0.5) * s.period / total);
        REQUIRE(on == total / 2);
    }
}

TEST_CASE("engine parameter validation") {
    EngineParams p;
    REQUIRE_NOTHROW(p.validate());
    p.kappa_b = -0.1;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("physical unit reporting") {
    PhysicalScale scale;  // 2 ns drive period
    REQUIRE(scale.time_second(2.0 * pi) == Catch::Approx(2e-9));
    // Bath temperature at nbar = 0.01 for omega_a/omega_b ~ 20.8: about 104 mK.
    double ta_sim = temperature_from_occupation(0.01, 20.8);
    REQUIRE(scale.temperature_kelvin(ta_sim) == Catch::Approx(0.104).epsilon(0.05));
    // A 2.7e-2 hbar*omega_a work output over one cycle: about 9e-17 W.
    double w_sim = 2.7e-2 * 20.8;
    REQUIRE(scale.power_watt(w_sim, 2.0 * pi) == Catch::Approx(8.9e-17).epsilon(0.1));
}
