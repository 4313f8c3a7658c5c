#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gradbound/quadrature.hpp"

using namespace gradbound;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("disk-rectangle overlap: containment and symmetry cases") {
    // rectangle containing the whole disk
    CHECK(disk_rect_overlap({0.0, 0.0}, 1.0, -2.0, 2.0, -2.0, 2.0) == Catch::Approx(kPi));
    // half planes
    CHECK(disk_rect_overlap({0.0, 0.0}, 1.0, 0.0, 3.0, -3.0, 3.0) == Catch::Approx(kPi / 2.0));
    CHECK(disk_rect_overlap({0.0, 0.0}, 1.0, -3.0, 3.0, 0.0, 3.0) == Catch::Approx(kPi / 2.0));
    // quadrant
    CHECK(disk_rect_overlap({0.0, 0.0}, 1.0, 0.0, 2.0, 0.0, 2.0) == Catch::Approx(kPi / 4.0));
    // disjoint
    CHECK(disk_rect_overlap({0.0, 0.0}, 1.0, 2.0, 3.0, 2.0, 3.0) == 0.0);
    // rectangle fully inside the disk
    CHECK(disk_rect_overlap({0.0, 0.0}, 2.0, -0.5, 0.5, -0.5, 0.5) == Catch::Approx(1.0));
    // off-center circle
    CHECK(disk_rect_overlap({1.0, 1.0}, 1.0, 1.0, 4.0, -4.0, 4.0) == Catch::Approx(kPi / 2.0));
}

TEST_CASE("disk-rectangle overlap vs Monte Carlo on random rectangles") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(-1.5, 1.5);
    std::uniform_real_distribution<double> len(0.1, 1.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double x0 = pos(rng), y0 = pos(rng);
        const double x1 = x0 + len(rng), y1 = y0 + len(rng);
        const double exact = disk_rect_overlap({0.0, 0.0}, 1.0, x0, x1, y0, y1);
        int hits = 0;
        const int samples = 200000;
        for (int s = 0; s < samples; ++s) {
            const double x = x0 + (x1 - x0) * unit(rng);
            const double y = y0 + (y1 - y0) * unit(rng);
            if (x * x + y * y < 1.0) ++hits;
        }
        const double mc = (x1 - x0) * (y1 - y0) * hits / samples;
        CHECK(exact == Catch::Approx(mc).margin(5e-3 * (x1 - x0) * (y1 - y0) + 5e-4));
    }
}

TEST_CASE("overlap-weighted cell sums tile exact areas") {
    const auto grid = discretize(make_disk({0.0, 0.0}, 2.0), 0.05);
    std::vector<double> ones(grid.size(), 1.0);
    // inner disk away from the domain boundary: no fallback needed
    const double a1 = integrate_abs_over_disk(grid, ones, {0.0, 0.0}, 1.0);
    CHECK(a1 == Catch::Approx(kPi).epsilon(1e-12));
    // the whole domain: rim cells use the supplied boundary data
    const double a2 =
        integrate_abs_over_disk(grid, ones, {0.0, 0.0}, 2.0, [](Vec<2>) { return 1.0; });
    CHECK(a2 == Catch::Approx(4.0 * kPi).epsilon(1e-12));
    // missing fallback on a rim-touching disk is an error
    CHECK_THROWS_AS(integrate_abs_over_disk(grid, ones, {0.0, 0.0}, 2.0), std::runtime_error);
}

TEST_CASE("smooth integrand reaches second-order accuracy") {
    auto f = [](Vec<2> p) { return std::exp(p[0]) * (2.0 + std::sin(p[1])); };
    // reference by fine polar quadrature over the unit disk
    double ref = 0.0;
    const int nr = 2000, nt = 2000;
    for (int i = 0; i < nr; ++i) {
        const double r = (i + 0.5) / nr;
        double ring = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double t = 2.0 * kPi * j / nt;
            ring += f({r * std::cos(t), r * std::sin(t)});
        }
        ref += ring * (2.0 * kPi / nt) * r * (1.0 / nr);
    }
    double prev = -1.0;
    for (double h : {0.08, 0.04, 0.02}) {
        const auto grid = discretize(make_disk({0.0, 0.0}, 2.0), h);
        std::vector<double> u(grid.size());
        for (int i = 0; i < grid.size(); ++i) u[i] = f(grid.pos[i]);
        const double got = integrate_abs_over_disk(grid, u, {0.0, 0.0}, 1.0);
        const double err = std::abs(got - ref);
        if (prev > 0.0) CHECK(prev / err > 3.0);
        prev = err;
    }
}

TEST_CASE("boundary trapezoid: exact circumference and positive-data mass") {
    const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), 0.05);
    std::vector<double> ones(grid.size(), 1.0);
    CHECK(integrate_abs_over_boundary(grid, ones) == Catch::Approx(2.0 * kPi).epsilon(1e-12));

    std::vector<double> g(grid.size());
    for (int i = 0; i < grid.size(); ++i) g[i] = 2.0 + grid.pos[i][0];
    // int (2 + cos(theta)) R dtheta = 4 pi
    CHECK(integrate_abs_over_boundary(grid, g) == Catch::Approx(4.0 * kPi).epsilon(1e-4));
}

TEST_CASE("simpson helper integrates polynomials of degree three exactly") {
    const double got = simpson([](double x) { return x * x * x - 2.0 * x + 1.0; }, -1.0, 2.0, 10);
    CHECK(got == Catch::Approx(3.75).margin(1e-12));
}
