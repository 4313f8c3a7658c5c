#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gradbound/landis1d.hpp"

using namespace gradbound;

TEST_CASE("adjoint integration: polynomial closed form for W=V=0, s=1") {
    FirstOrderSystem sys;
    sys.R = 1.0;
    sys.W = [](double) { return 0.0; };
    sys.V = [](double) { return 0.0; };
    sys.forcing = [](double) { return 1.0; };
    const auto tr = integrate_adjoint(sys, 1e-3);
    // -phi'' = 1 with zero data: phi = -(x+R)^2/2, phi' = -(x+R)
    for (std::size_t i = 0; i < tr.x.size(); i += 97) {
        const double s = tr.x[i] + 1.0;
        CHECK(tr.phi[i] == Catch::Approx(-0.5 * s * s).margin(1e-10));
        CHECK(tr.dphi[i] == Catch::Approx(-s).margin(1e-10));
    }
}

TEST_CASE("zero forcing keeps the zero trajectory") {
    FirstOrderSystem sys;
    sys.R = 2.0;
    sys.W = [](double x) { return std::sin(x); };
    sys.V = [](double x) { return std::cos(x); };
    sys.forcing = [](double) { return 0.0; };
    const auto tr = integrate_adjoint(sys, 1e-3);
    for (double p : tr.phi) CHECK(p == 0.0);
    for (double q : tr.dphi) CHECK(q == 0.0);
}

TEST_CASE("constant potential closed form: phi = 1 - cosh(x+R)") {
    FirstOrderSystem sys;
    sys.R = 2.0;
    sys.W = [](double) { return 0.0; };
    sys.V = [](double) { return 1.0; };
    sys.forcing = [](double) { return 1.0; };
    const auto tr = integrate_adjoint(sys, 1e-3);
    for (std::size_t i = 0; i < tr.x.size(); i += 101) {
        const double s = tr.x[i] + 2.0;
        CHECK(tr.phi[i] == Catch::Approx(1.0 - std::cosh(s)).margin(1e-8));
        CHECK(tr.dphi[i] == Catch::Approx(-std::sinh(s)).margin(1e-8));
    }
}

TEST_CASE("overflow guard reports an envelope diagnostic") {
    FirstOrderSystem sys;
    sys.R = 3.0;
    sys.W = [](double) { return 500.0; };
    sys.V = [](double) { return 500.0; };
    sys.forcing = [](double) { return 1.0; };
    CHECK_THROWS_AS(integrate_adjoint(sys, 1e-4), std::runtime_error);
}

TEST_CASE("Gronwall envelope with the constructive constant") {
    SECTION("zero trajectory has ratio 0") {
        FirstOrderSystem sys;
        sys.R = 1.0;
        sys.W = [](double) { return 0.0; };
        sys.V = [](double) { return 0.0; };
        sys.forcing = [](double) { return 0.0; };
        const auto tr = integrate_adjoint(sys, 1e-3);
        const auto rep = check_gronwall_envelope(tr, gronwall_constant(sys));
        CHECK(rep.ok);
        CHECK(rep.max_ratio == 0.0);
    }
    SECTION("polynomial case at R=1 with C=2 stays under the envelope") {
        FirstOrderSystem sys;
        sys.R = 1.0;
        sys.W = [](double) { return 0.0; };
        sys.V = [](double) { return 0.0; };
        sys.forcing = [](double) { return 1.0; };
        CHECK(gronwall_constant(sys) == Catch::Approx(2.0));
        const auto rep = check_gronwall_envelope(integrate_adjoint(sys, 1e-3), 2.0);
        CHECK(rep.ok);
        CHECK(rep.max_ratio < 1.0);
    }
    SECTION("constant potential at R=2, C=3") {
        FirstOrderSystem sys;
        sys.R = 2.0;
        sys.W = [](double) { return 0.0; };
        sys.V = [](double) { return 1.0; };
        sys.forcing = [](double) { return 1.0; };
        CHECK(gronwall_constant(sys) == Catch::Approx(3.0));
        CHECK(check_gronwall_envelope(integrate_adjoint(sys, 1e-3), 3.0).ok);
    }
    SECTION("100 random bounded systems never violate") {
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> amp(-5.0, 5.0);
        std::uniform_real_distribution<double> freq(0.2, 4.0);
        std::uniform_real_distribution<double> radius(0.5, 3.0);
        for (int trial = 0; trial < 100; ++trial) {
            const double aw = amp(rng), fw = freq(rng);
            const double av = amp(rng), fv = freq(rng);
            FirstOrderSystem sys;
            sys.R = radius(rng);
            sys.W = [aw, fw](double x) { return aw * std::sin(fw * x); };
            sys.V = [av, fv](double x) { return av * std::cos(fv * x); };
            sys.forcing = [](double) { return 1.0; };
            const auto tr = integrate_adjoint(sys, 2e-3);
            const auto rep = check_gronwall_envelope(tr, gronwall_constant(sys));
            CHECK(rep.ok);
        }
    }
}

TEST_CASE("manufactured solutions satisfy their own equation") {
    for (double drift : {0.0, 0.5}) {
        const auto ms = gaussian_manufactured(2.0, drift);
        for (int i = 0; i <= 100; ++i) {
            const double x = -2.0 + 4.0 * i / 100.0;
            CHECK(std::abs(ms.residual(x)) < 1e-10);
        }
        if (drift == 0.0) {
            // V = 4x^2 - 2 for the Gaussian without drift
            CHECK(ms.V(0.0) == Catch::Approx(-2.0));
            CHECK(ms.V(1.0) == Catch::Approx(2.0));
        }
    }
}

TEST_CASE("duality identity: Gaussian manufactured solutions") {
    SECTION("no drift") {
        const auto rep = check_duality_identity(gaussian_manufactured(2.0), 1e-3);
        CHECK(rep.residual < 1e-6);
        // int_{-2}^{2} e^{-x^2} dx = sqrt(pi) erf(2)
        CHECK(rep.lhs ==
              Catch::Approx(std::sqrt(std::acos(-1.0)) * std::erf(2.0)).epsilon(1e-6));
    }
    SECTION("with constant drift") {
        const auto rep = check_duality_identity(gaussian_manufactured(2.0, 0.5), 1e-3);
        CHECK(rep.residual < 1e-6);
    }
    SECTION("fourth-order convergence of the residual") {
        double prev = -1.0;
        for (double h : {4e-2, 2e-2, 1e-2}) {
            const auto rep = check_duality_identity(gaussian_manufactured(2.0), h);
            if (prev > 0.0) {
                const double ratio = prev / rep.residual;
                CHECK(ratio > 8.0);
                CHECK(ratio < 32.0);
            }
            prev = rep.residual;
        }
    }
    SECTION("absolute-value convention changes the left side accordingly") {
        const auto rep =
            check_duality_identity(gaussian_manufactured(1.5), 1e-3, SignConvention::AbsValue);
        // integral of u^2 = sqrt(pi/2) erf(1.5 sqrt(2)) instead of |u|
        CHECK(rep.lhs == Catch::Approx(std::sqrt(std::acos(-1.0) / 2.0) *
                                       std::erf(1.5 * std::sqrt(2.0))).epsilon(1e-6));
        CHECK(rep.residual < 1e-6);
    }
}

TEST_CASE("decay demo rows: shrinking boundary terms, stable mass, honest V growth") {
    const auto rows = decay_demo({1.0, 2.0, 3.0}, 1e-3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].boundary_terms < rows[0].boundary_terms);
    CHECK(rows[2].boundary_terms < rows[1].boundary_terms);
    CHECK(rows[2].integral_abs_u ==
          Catch::Approx(std::sqrt(std::acos(-1.0)) * std::erf(3.0)).epsilon(1e-6));
    CHECK(std::abs(rows[1].integral_abs_u - rows[2].integral_abs_u) < 1e-2);
    CHECK(rows[2].v_sup > rows[1].v_sup);  // |V|_inf grows with R for the Gaussian
    for (const auto& row : rows) {
        CHECK(row.identity_residual < 1e-6);
        // u' decay below the construction's envelope C e^{-R^{1+eps}}, C=10, eps=1
        CHECK(std::abs(row.u_prime_at_R) <= 10.0 * std::exp(-row.R * row.R));
        // boundary terms bounded by |Phi(R)| (u(R) + |u'(R)|) with W = 0
        const double u_at_R = std::exp(-row.R * row.R);
        CHECK(std::abs(row.boundary_terms) <=
              row.gronwall_bound_at_R * (u_at_R + std::abs(row.u_prime_at_R)) * (1.0 + 1e-9));
    }
}
