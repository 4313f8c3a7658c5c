#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "gradbound/geometry.hpp"

using namespace gradbound;

TEST_CASE("domain constructors and diameters") {
    CHECK(make_interval(0.0, 1.0).diameter() == 1.0);
    CHECK(make_disk({0.0, 0.0}, 1.0).diameter() == 2.0);
    CHECK(make_ellipse({0.0, 0.0}, 2.0, 1.0).diameter() == 4.0);
    CHECK(make_ellipse({0.0, 0.0}, 1.0, 3.0).diameter() == 6.0);

    CHECK_THROWS_AS(make_interval(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_interval(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_disk({0.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_disk({0.0, 0.0}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_ellipse({0.0, 0.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("interval grid: counts and classification") {
    const auto grid = discretize(make_interval(0.0, 1.0), 0.25);
    REQUIRE(grid.size() == 5);
    CHECK(grid.interior_count == 3);
    CHECK(grid.boundary_count == 2);
    CHECK(grid.pos.front()[0] == 0.0);
    CHECK(grid.pos.back()[0] == 1.0);
    CHECK(grid.normal.front()[0] == -1.0);
    CHECK(grid.normal.back()[0] == 1.0);

    CHECK_THROWS_AS(discretize(make_interval(0.0, 1.0), 0.6), std::invalid_argument);
    CHECK_THROWS_AS(discretize(make_interval(0.0, 1.0), 0.25001), std::invalid_argument);
    CHECK_THROWS_AS(discretize(make_interval(0.0, 1.0), -0.1), std::invalid_argument);
}

TEST_CASE("disk grid at h=0.5: 9 interior nodes, on-circle lattice points snapped") {
    const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), 0.5);
    CHECK(grid.interior_count == 9);
    // the four lattice points at distance exactly 1 become boundary nodes
    int on_axis_boundary = 0;
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.is_boundary(i)) continue;
        const double r = std::hypot(grid.pos[i][0], grid.pos[i][1]);
        CHECK(r == Catch::Approx(1.0).margin(1e-12));
        if (std::abs(grid.pos[i][0]) == 1.0 || std::abs(grid.pos[i][1]) == 1.0) ++on_axis_boundary;
    }
    CHECK(on_axis_boundary == 4);
}

TEST_CASE("boundary normals are unit and radial on the disk") {
    const auto grid = discretize(make_disk({0.3, -0.2}, 0.8), 0.1);
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.is_boundary(i)) continue;
        const auto& nu = grid.normal[i];
        CHECK(std::abs(norm<2>(nu) - 1.0) < 1e-12);
        const Vec<2> radial = sub<2>(grid.pos[i], {0.3, -0.2});
        const Vec<2> rhat = scale<2>(radial, 1.0 / norm<2>(radial));
        CHECK(dist<2>(nu, rhat) < 1e-10);
    }
}

TEST_CASE("interior stencils are complete and within-spacing") {
    const auto grid = discretize(make_ellipse({0.0, 0.0}, 1.0, 0.6), 0.07);
    REQUIRE(grid.interior_count > 0);
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.is_interior(i)) continue;
        const auto& st = grid.stencil[i];
        for (int s = 0; s < 4; ++s) {
            REQUIRE(st.nbr[s] >= 0);
            CHECK(st.dist[s] > 0.0);
            CHECK(st.dist[s] <= grid.h * (1.0 + 1e-9));
            const int nb = st.nbr[s];
            CHECK(dist<2>(grid.pos[i], grid.pos[nb]) == Catch::Approx(st.dist[s]).margin(1e-12));
        }
    }
}

TEST_CASE("grid diameter converges to the domain diameter from below") {
    double prev_gap = 1e9;
    for (double h : {0.2, 0.1, 0.05}) {
        const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), h);
        const double d = grid.node_diameter();
        CHECK(d <= 2.0 + 1e-12);
        CHECK(d >= 2.0 - 2.0 * h);
        const double gap = 2.0 - d;
        CHECK(gap <= prev_gap + 1e-12);
        prev_gap = gap;
    }
}

TEST_CASE("convexity: chords never point along the outward normal") {
    // (y - x) . nu(y) > 0 for interior x, boundary y; equivalently the
    // chord direction has negative inner product with the inward normal
    const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), 0.2);
    for (int y = 0; y < grid.size(); ++y) {
        if (!grid.is_boundary(y)) continue;
        for (int x = 0; x < grid.size(); ++x) {
            if (!grid.is_interior(x)) continue;
            const Vec<2> chord = sub<2>(grid.pos[y], grid.pos[x]);
            CHECK(dot<2>(chord, grid.normal[y]) > 0.0);
        }
    }
}

TEST_CASE("boundary distance: disk exact, ellipse vs brute force") {
    const auto disk = make_disk({0.0, 0.0}, 1.0);
    CHECK(disk.boundary_distance({0.0, 0.0}) == Catch::Approx(1.0));
    CHECK(disk.boundary_distance({0.5, 0.0}) == Catch::Approx(0.5));

    const auto ell = make_ellipse({0.0, 0.0}, 2.0, 1.0);
    auto brute = [&](Vec<2> x) {
        double best = 1e9;
        for (int k = 0; k < 200000; ++k) {
            const double t = 2.0 * std::acos(-1.0) * k / 200000;
            const Vec<2> b{2.0 * std::cos(t), std::sin(t)};
            best = std::min(best, dist<2>(x, b));
        }
        return best;
    };
    for (Vec<2> x : {Vec<2>{0.0, 0.0}, Vec<2>{1.0, 0.3}, Vec<2>{-0.5, -0.7}, Vec<2>{1.9, 0.0},
                     Vec<2>{0.0, 0.95}}) {
        CHECK(ell.boundary_distance(x) == Catch::Approx(brute(x)).margin(1e-4));
    }
}

TEST_CASE("boundary line metadata reaches two nodes into the domain") {
    const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), 0.1);
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.is_boundary(i)) continue;
        const auto& bl = grid.bline[i];
        REQUIRE(bl.inner1 >= 0);
        REQUIRE(bl.inner2 >= 0);
        CHECK(grid.is_interior(bl.inner1));
        CHECK(bl.d2 > bl.d1);
        CHECK(bl.d1 > 0.0);
        // inner1 lies along the stored line direction
        const Vec<2> step = sub<2>(grid.pos[bl.inner1], grid.pos[i]);
        CHECK(std::abs(dot<2>(step, bl.inward) - bl.d1) < 1e-10);
    }
}
