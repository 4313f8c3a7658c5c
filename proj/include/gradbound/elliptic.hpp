#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gradbound/assemble.hpp"
#include "gradbound/coefficients.hpp"
#include "gradbound/geometry.hpp"
#include "gradbound/sparse.hpp"

namespace gradbound {

/// Difference-quotient gradient field. Interior nodes use the (possibly
/// nonuniform) centered 3-point formula per axis. Boundary nodes use the
/// second-order one-sided derivative along their grid line; under Dirichlet
/// data the tangential derivative vanishes, so the full gradient is
/// reconstructed from the line derivative and the normal direction when the
/// line is reasonably aligned with the normal.
template <int N>
std::vector<Vec<N>> compute_gradient(const Grid<N>& grid, const std::vector<double>& u) {
    const int n = grid.size();
    std::vector<Vec<N>> grad(static_cast<std::size_t>(n), Vec<N>{});
    for (int i = 0; i < n; ++i) {
        if (grid.is_interior(i)) {
            const auto& st = grid.stencil[static_cast<std::size_t>(i)];
            for (int axis = 0; axis < N; ++axis) {
                const int L = st.nbr[2 * axis], R = st.nbr[2 * axis + 1];
                const double dL = st.dist[2 * axis], dR = st.dist[2 * axis + 1];
                grad[static_cast<std::size_t>(i)][axis] =
                    -dR / (dL * (dL + dR)) * u[static_cast<std::size_t>(L)] +
                    (dR - dL) / (dL * dR) * u[static_cast<std::size_t>(i)] +
                    dL / (dR * (dL + dR)) * u[static_cast<std::size_t>(R)];
            }
        } else {
            const auto& bl = grid.bline[static_cast<std::size_t>(i)];
            if (bl.inner1 < 0) continue;
            const double d1 = bl.d1, d2 = bl.d2;
            const double de = -(d1 + d2) / (d1 * d2) * u[static_cast<std::size_t>(i)] +
                              d2 / (d1 * (d2 - d1)) * u[static_cast<std::size_t>(bl.inner1)] -
                              d1 / (d2 * (d2 - d1)) * u[static_cast<std::size_t>(bl.inner2)];
            const double cosang = dot<N>(bl.inward, grid.normal[static_cast<std::size_t>(i)]);
            if (std::abs(cosang) >= 0.5) {
                const double dn = de / cosang;
                grad[static_cast<std::size_t>(i)] =
                    scale<N>(grid.normal[static_cast<std::size_t>(i)], dn);
            } else {
                // grazing line: keep the raw directional quotient (a lower
                // bound on |grad|); neighbors from the other line family
                // cover this stretch of boundary
                grad[static_cast<std::size_t>(i)] = scale<N>(bl.inward, de);
            }
        }
    }
    return grad;
}

template <int N>
double sup_norm(const std::vector<Vec<N>>& grad) {
    double m = 0.0;
    for (const auto& g : grad) m = std::max(m, norm<N>(g));
    return m;
}

template <int N>
struct EllipticSolution {
    ScalarField<N> phi;
    std::vector<Vec<N>> grad_phi;
    double sup_grad = 0.0;
    SolveInfo info;
    int gauge_node = -1;       // Neumann runs: node pinned to zero
    double gauge_defect = 0.0; // residual of the replaced equation
};

template <int N>
struct EllipticOptions {
    bool allow_negative_potential = false;
    SolverOptions solver;
    const std::vector<double>* boundary_values = nullptr;  // Dirichlet data
    const std::vector<double>* forcing_override = nullptr;
};

template <int N>
double measure_sup_grad(const EllipticSolution<N>& sol) {
    return sup_norm<N>(sol.grad_phi);
}

/// Solve -Laplace(phi) + W.grad(phi) + V phi = F with the given boundary
/// condition. Dirichlet requires V >= 0 (well-posedness sign condition)
/// unless explicitly overridden; Neumann requires V = 0 and gauge-fixes the
/// constant by pinning the node nearest the center.
template <int N>
EllipticSolution<N> solve_elliptic(const Grid<N>& grid, const CoefficientSet<N>& coeffs,
                                   BoundaryCondition bc, const EllipticOptions<N>& opt = {}) {
    if (bc == BoundaryCondition::Dirichlet && !coeffs.v_nonneg && !opt.allow_negative_potential)
        throw std::invalid_argument(
            "solve_elliptic: V has negative samples; Dirichlet well-posedness needs V >= 0 "
            "(pass allow_negative_potential to override)");
    if (bc == BoundaryCondition::Neumann && coeffs.M != 0.0)
        throw std::invalid_argument("solve_elliptic: Neumann runs require V = 0");

    SparseOperator A = assemble(grid, coeffs, bc);
    const std::vector<double>& forcing = opt.forcing_override ? *opt.forcing_override : coeffs.F;
    std::vector<double> b = build_rhs(grid, forcing, opt.boundary_values);

    EllipticSolution<N> sol;
    if (bc == BoundaryCondition::Neumann) {
        // singular up to constants: pin the node nearest the center
        const Vec<N> c = grid.domain.center();
        int pin = -1;
        double best = std::numeric_limits<double>::max();
        for (int i = 0; i < grid.size(); ++i) {
            if (!grid.is_interior(i)) continue;
            const double d = dist<N>(grid.pos[i], c);
            if (d < best) {
                best = d;
                pin = i;
            }
        }
        std::vector<double> dropped_row_rhs(1, b[static_cast<std::size_t>(pin)]);
        std::vector<int> dropped_cols;
        std::vector<double> dropped_vals;
        for (int k = A.row_offsets[pin]; k < A.row_offsets[pin + 1]; ++k) {
            dropped_cols.push_back(A.cols[k]);
            dropped_vals.push_back(A.vals[k]);
        }
        pin_node(A, b, pin, 0.0);
        sol.gauge_node = pin;

        SolverOptions sopt = opt.solver;
        std::vector<double> x;
        sol.info = solve_system(A, b, x, sopt);
        // defect of the equation we replaced (compatibility witness)
        double defect = -dropped_row_rhs[0];
        for (std::size_t k = 0; k < dropped_cols.size(); ++k)
            defect += dropped_vals[k] * x[static_cast<std::size_t>(dropped_cols[k])];
        sol.gauge_defect = defect;
        sol.phi.grid = &grid;
        sol.phi.v = std::move(x);
    } else {
        SolverOptions sopt = opt.solver;
        std::vector<double> x;
        sol.info = solve_system(A, b, x, sopt);
        // boundary rows are identity rows; make the data exact
        for (int i = 0; i < grid.size(); ++i)
            if (grid.is_boundary(i))
                x[static_cast<std::size_t>(i)] =
                    opt.boundary_values ? (*opt.boundary_values)[static_cast<std::size_t>(i)]
                                        : 0.0;
        sol.phi.grid = &grid;
        sol.phi.v = std::move(x);
    }
    if (!sol.info.converged)
        throw std::runtime_error("solve_elliptic: linear solver did not converge (residual " +
                                 std::to_string(sol.info.residual) + " after " +
                                 std::to_string(sol.info.iterations) + " iterations)");
    sol.grad_phi = compute_gradient(grid, sol.phi.v);
    sol.sup_grad = sup_norm<N>(sol.grad_phi);
    return sol;
}

}  // namespace gradbound
