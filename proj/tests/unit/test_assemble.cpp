#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gradbound/assemble.hpp"
#include "helpers.hpp"

using namespace gradbound;

TEST_CASE("1D interior stencil: scaled 3-point Laplacian") {
    const auto grid = discretize(make_interval(0.0, 2.0), 0.5);
    const auto coeffs = constant_coefficients<1>(grid, {0.0}, 0.0, 0.0);
    const SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Dirichlet);
    // pick an interior row away from the ends
    int row = -1;
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_interior(i) && grid.pos[i][0] == 1.0) row = i;
    REQUIRE(row >= 0);
    // per-unit stencil (-4, 8, -4) at h = 0.5, i.e. (-1/h^2, 2/h^2, -1/h^2)
    CHECK(A.diagonal(row) == Catch::Approx(8.0));
    double offsum = 0.0;
    for (int k = A.row_offsets[row]; k < A.row_offsets[row + 1]; ++k)
        if (A.cols[k] != row) {
            CHECK(A.vals[k] == Catch::Approx(-4.0));
            offsum += A.vals[k];
        }
    CHECK(offsum == Catch::Approx(-8.0));
}

TEST_CASE("zeroth-order term adds V to the diagonal") {
    const auto grid = discretize(make_interval(0.0, 2.0), 0.5);
    const auto coeffs = constant_coefficients<1>(grid, {0.0}, 1.0, 0.0);
    const SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Dirichlet);
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_interior(i)) CHECK(A.diagonal(i) == Catch::Approx(2.0 / 0.25 + 1.0));
}

TEST_CASE("Laplacian annihilates constants on interior rows") {
    {
        const auto grid = discretize(make_interval(0.0, 1.0), 0.1);
        const auto coeffs = constant_coefficients<1>(grid, {0.0}, 0.0, 0.0);
        const SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Dirichlet);
        const std::vector<double> ones(grid.size(), 1.0);
        const auto y = A.apply(ones);
        for (int i = 0; i < grid.size(); ++i)
            if (grid.is_interior(i)) CHECK(std::abs(y[i]) < 1e-9);
    }
    {
        const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), 0.11);
        const auto coeffs = constant_coefficients<2>(grid, {0.0, 0.0}, 0.0, 0.0);
        const SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Dirichlet);
        const std::vector<double> ones(grid.size(), 1.0);
        const auto y = A.apply(ones);
        for (int i = 0; i < grid.size(); ++i)
            if (grid.is_interior(i)) CHECK(std::abs(y[i]) < 1e-8 / (grid.h * grid.h));
    }
}

TEST_CASE("M-matrix sign pattern with centered and upwinded advection") {
    auto check_m_matrix = [](const SparseOperator& A) {
        for (int i = 0; i < A.n; ++i) {
            for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
                if (A.cols[k] == i)
                    CHECK(A.vals[k] > 0.0);
                else
                    CHECK(A.vals[k] <= 1e-14);
            }
        }
    };
    const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), 0.09);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    SECTION("centered: Peclet below 2") {
        const auto coeffs = sample_coefficients<2>(
            grid, [](Vec<2> p) { return Vec<2>{std::sin(3.0 * p[0]), std::cos(2.0 * p[1])}; },
            [](Vec<2> p) { return p[0] * p[0]; }, nullptr);
        REQUIRE(coeffs.K * grid.h <= 2.0);
        check_m_matrix(assemble(grid, coeffs, BoundaryCondition::Dirichlet));
    }
    SECTION("upwinded: Peclet above 2") {
        const auto coeffs = constant_coefficients<2>(grid, {40.0, -25.0}, 0.5, 0.0);
        REQUIRE(coeffs.K * grid.h > 2.0);
        check_m_matrix(assemble(grid, coeffs, BoundaryCondition::Dirichlet));
    }
    SECTION("divergence form, centered") {
        const auto coeffs = sample_coefficients<2>(
            grid, [](Vec<2> p) { return Vec<2>{p[1], -p[0]}; },
            [](Vec<2>) { return 0.3; }, nullptr);
        AssembleOptions opt;
        opt.drift = DriftForm::Divergence;
        check_m_matrix(assemble(grid, coeffs, BoundaryCondition::Dirichlet, opt));
    }
    SECTION("divergence form, downwind sampling") {
        const auto coeffs = constant_coefficients<2>(grid, {30.0, 30.0}, 0.0, 0.0);
        AssembleOptions opt;
        opt.drift = DriftForm::Divergence;
        check_m_matrix(assemble(grid, coeffs, BoundaryCondition::Dirichlet, opt));
    }
}

TEST_CASE("mismatched coefficient vector is rejected") {
    const auto grid = discretize(make_interval(0.0, 1.0), 0.1);
    const auto other = discretize(make_interval(0.0, 1.0), 0.05);
    const auto coeffs = constant_coefficients<1>(other, {0.0}, 0.0, 1.0);
    CHECK_THROWS_AS(assemble(grid, coeffs, BoundaryCondition::Dirichlet), std::invalid_argument);
}

TEST_CASE("Dirichlet boundary rows are identity rows") {
    const auto grid = discretize(make_disk({0.0, 0.0}, 1.0), 0.2);
    const auto coeffs = constant_coefficients<2>(grid, {1.0, 0.0}, 2.0, 0.0);
    const SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Dirichlet);
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.is_boundary(i)) continue;
        REQUIRE(A.row_offsets[i + 1] - A.row_offsets[i] == 1);
        CHECK(A.cols[A.row_offsets[i]] == i);
        CHECK(A.vals[A.row_offsets[i]] == 1.0);
    }
}

TEST_CASE("Neumann rows: 1D second-order one-sided stencil; 2D rejected") {
    const auto grid = discretize(make_interval(0.0, 1.0), 0.25);
    const auto coeffs = constant_coefficients<1>(grid, {0.0}, 0.0, 0.0);
    const SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Neumann);
    // left endpoint is node 0 with neighbors 1, 2: (-3, 4, -1)/(2h)
    const double s = 1.0 / (2.0 * grid.h);
    REQUIRE(A.row_offsets[1] - A.row_offsets[0] == 3);
    CHECK(A.vals[A.row_offsets[0] + 0] == Catch::Approx(-3.0 * s));
    CHECK(A.vals[A.row_offsets[0] + 1] == Catch::Approx(4.0 * s));
    CHECK(A.vals[A.row_offsets[0] + 2] == Catch::Approx(-1.0 * s));
    // a linear field has zero one-sided derivative residual against itself
    std::vector<double> lin(grid.size());
    for (int i = 0; i < grid.size(); ++i) lin[i] = 3.0 * grid.pos[i][0];
    const auto y = A.apply(lin);
    CHECK(y[0] == Catch::Approx(3.0).margin(1e-10));  // derivative, not zero: row measures du/ds

    const auto grid2 = discretize(make_disk({0.0, 0.0}, 1.0), 0.2);
    const auto coeffs2 = constant_coefficients<2>(grid2, {0.0, 0.0}, 0.0, 0.0);
    CHECK_THROWS_AS(assemble(grid2, coeffs2, BoundaryCondition::Neumann), std::invalid_argument);
}
