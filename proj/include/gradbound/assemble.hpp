#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gradbound/coefficients.hpp"
#include "gradbound/geometry.hpp"
#include "gradbound/sparse.hpp"

namespace gradbound {

/// Drift discretization: Gradient is W . grad(u); Divergence is the
/// conservative -div(W u) used for adjoint-type problems.
enum class DriftForm { Gradient, Divergence };

struct AssembleOptions {
    DriftForm drift = DriftForm::Gradient;
    /// Centered differencing keeps second order; first-order upwinding is
    /// switched on when the cell Peclet number K*h exceeds 2, which is the
    /// threshold below which centered stencils already give an M-matrix.
    bool force_upwind = false;
};

/// Assemble the operator for -Laplace(u) + drift + V u with the requested
/// boundary-condition rows. Dirichlet rows are identity rows; Neumann rows
/// (1D only) impose a second-order one-sided normal derivative.
template <int N>
SparseOperator assemble(const Grid<N>& grid, const CoefficientSet<N>& coeffs,
                        BoundaryCondition bc, const AssembleOptions& opt = {}) {
    const int n = grid.size();
    if (static_cast<int>(coeffs.V.size()) != n)
        throw std::invalid_argument("assemble: coefficient/grid size mismatch");
    const bool upwind = opt.force_upwind || coeffs.K * grid.h > 2.0;

    SparseBuilder B(n);
    for (int i = 0; i < n; ++i) {
        if (grid.is_boundary(i)) {
            if (bc == BoundaryCondition::Dirichlet) {
                B.add(i, i, 1.0);
            } else {
                if constexpr (N != 1)
                    throw std::invalid_argument(
                        "assemble: Neumann rows are only supported on intervals");
                const auto& bl = grid.bline[static_cast<std::size_t>(i)];
                const double d1 = bl.d1, d2 = bl.d2;
                // one-sided derivative along the inward direction = 0
                B.add(i, i, -(d1 + d2) / (d1 * d2));
                B.add(i, bl.inner1, d2 / (d1 * (d2 - d1)));
                B.add(i, bl.inner2, -d1 / (d2 * (d2 - d1)));
            }
            continue;
        }
        const auto& st = grid.stencil[static_cast<std::size_t>(i)];
        double diag = coeffs.V[static_cast<std::size_t>(i)];
        for (int axis = 0; axis < N; ++axis) {
            const int L = st.nbr[2 * axis], R = st.nbr[2 * axis + 1];
            const double dL = st.dist[2 * axis], dR = st.dist[2 * axis + 1];
            // second difference
            B.add(i, L, -2.0 / (dL * (dL + dR)));
            B.add(i, R, -2.0 / (dR * (dL + dR)));
            diag += 2.0 / (dL * dR);

            if (opt.drift == DriftForm::Gradient) {
                const double w = coeffs.W[static_cast<std::size_t>(i)][axis];
                if (w == 0.0) continue;
                if (!upwind) {
                    B.add(i, L, -w * dR / (dL * (dL + dR)));
                    B.add(i, R, w * dL / (dR * (dL + dR)));
                    diag += w * (dR - dL) / (dL * dR);
                } else if (w > 0.0) {
                    B.add(i, L, -w / dL);
                    diag += w / dL;
                } else {
                    B.add(i, R, w / dR);
                    diag += -w / dR;
                }
            } else {
                // conservative flux difference -(F_R - F_L)/((dL+dR)/2) with
                // W sampled at the face midpoints
                Vec<N> xl = grid.pos[i], xr = grid.pos[i];
                xl[axis] -= 0.5 * dL;
                xr[axis] += 0.5 * dR;
                const double wl = coeffs.W_fn(xl)[axis];
                const double wr = coeffs.W_fn(xr)[axis];
                const double inv = 2.0 / (dL + dR);
                if (!upwind) {
                    // centered face values
                    diag += inv * (wl - wr) * 0.5;
                    B.add(i, L, inv * wl * 0.5);
                    B.add(i, R, -inv * wr * 0.5);
                } else {
                    // downwind sampling keeps nonpositive off-diagonals
                    if (wr > 0.0)
                        B.add(i, R, -inv * wr);
                    else
                        diag += -inv * wr;
                    if (wl > 0.0)
                        diag += inv * wl;
                    else
                        B.add(i, L, inv * wl);
                }
            }
        }
        B.add(i, i, diag);
    }
    return B.finish(bc);
}

/// Right-hand side matching assemble(): forcing at interior rows, boundary
/// data at boundary rows (zero for Neumann rows).
template <int N>
std::vector<double> build_rhs(const Grid<N>& grid, const std::vector<double>& forcing,
                              const std::vector<double>* boundary_values = nullptr) {
    const int n = grid.size();
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        if (grid.is_interior(i))
            b[static_cast<std::size_t>(i)] = forcing[static_cast<std::size_t>(i)];
        else if (boundary_values)
            b[static_cast<std::size_t>(i)] = (*boundary_values)[static_cast<std::size_t>(i)];
    }
    return b;
}

/// Replace one interior row by a pin u_i = value; used to gauge-fix the
/// singular Neumann system with V = 0. Returns the pinned node.
inline int pin_node(SparseOperator& A, std::vector<double>& rhs, int node, double value) {
    for (int k = A.row_offsets[node]; k < A.row_offsets[node + 1]; ++k)
        A.vals[k] = (A.cols[k] == node) ? 1.0 : 0.0;
    rhs[static_cast<std::size_t>(node)] = value;
    return node;
}

}  // namespace gradbound
