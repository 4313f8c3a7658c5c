#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gradbound/assemble.hpp"
#include "gradbound/coefficients.hpp"
#include "gradbound/elliptic.hpp"
#include "gradbound/geometry.hpp"
#include "gradbound/sparse.hpp"

namespace gradbound {

template <int N>
struct ParabolicSpec {
    double T = 1.0;
    double dt = 0.0;  // 0 selects the default dt = h
    std::vector<double> snapshot_times;
    /// Optional time-dependent forcing F(x, t); when absent the static F
    /// from the coefficient set is used. W and V stay time-independent.
    std::function<double(Vec<N>, double)> forcing_t;
    SolverOptions solver;
};

template <int N>
struct ParabolicRun {
    double g0 = 0.0;  // |grad phi0|_inf from difference quotients
    double dt = 0.0;
    double T = 0.0;
    std::vector<double> times;         // t_0 = 0 .. t_n = T
    std::vector<double> grad_history;  // sup|grad phi| at each time point
    std::vector<std::pair<double, ScalarField<N>>> snapshots;
    ScalarField<N> final_phi;
    double sup_grad_over_time = 0.0;
};

namespace detail {

/// Stepping matrix  I/dt + theta*A  on interior rows, identity on boundary.
template <int N>
SparseOperator make_step_matrix(const Grid<N>& grid, const SparseOperator& A, double theta,
                                double dt) {
    SparseOperator S = A;
    for (int i = 0; i < S.n; ++i) {
        if (grid.is_boundary(i)) continue;  // keep the identity row from A
        for (int k = S.row_offsets[i]; k < S.row_offsets[i + 1]; ++k) {
            S.vals[k] *= theta;
            if (S.cols[k] == i) S.vals[k] += 1.0 / dt;
        }
    }
    return S;
}

}  // namespace detail

/// Crank-Nicolson stepping with one implicit-Euler start-up step. Boundary
/// values are held at zero; the gradient sup-norm is recorded at every step.
template <int N>
ParabolicRun<N> solve_parabolic(const Grid<N>& grid, const CoefficientSet<N>& coeffs,
                                const ScalarField<N>& phi0, const ParabolicSpec<N>& spec) {
    if (!(spec.T >= 0.0)) throw std::invalid_argument("solve_parabolic: need T >= 0");
    const double dt_req = spec.dt > 0.0 ? spec.dt : grid.h;
    double phi0_max = 0.0;
    for (int i = 0; i < grid.size(); ++i) phi0_max = std::max(phi0_max, std::abs(phi0[i]));
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_boundary(i) && std::abs(phi0[i]) > 1e-12 * std::max(1.0, phi0_max))
            throw std::invalid_argument(
                "solve_parabolic: phi0 must vanish on the boundary (W_0^{1,inf} data)");

    ParabolicRun<N> run;
    run.T = spec.T;
    const int n_steps = spec.T > 0.0 ? std::max<int>(1, static_cast<int>(std::lround(spec.T / dt_req)))
                                     : 0;
    run.dt = n_steps > 0 ? spec.T / n_steps : dt_req;

    const int n = grid.size();
    std::vector<double> phi = phi0.v;
    run.g0 = sup_norm<N>(compute_gradient(grid, phi));
    run.times.push_back(0.0);
    run.grad_history.push_back(run.g0);

    // snapshot bookkeeping: map each requested time to the nearest step
    std::vector<int> snap_steps;
    for (double t : spec.snapshot_times) {
        int k = n_steps > 0 ? static_cast<int>(std::lround(t / run.dt)) : 0;
        k = std::max(0, std::min(n_steps, k));
        snap_steps.push_back(k);
    }
    auto maybe_snapshot = [&](int step, const std::vector<double>& values) {
        for (std::size_t s = 0; s < snap_steps.size(); ++s) {
            if (snap_steps[static_cast<std::size_t>(s)] == step) {
                ScalarField<N> f(grid);
                f.v = values;
                run.snapshots.emplace_back(step * run.dt, std::move(f));
                snap_steps[static_cast<std::size_t>(s)] = -1;
            }
        }
    };
    maybe_snapshot(0, phi);

    if (n_steps == 0) {
        run.final_phi.grid = &grid;
        run.final_phi.v = phi;
        run.sup_grad_over_time = run.g0;
        return run;
    }

    const SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Dirichlet);
    const SparseOperator S_be = detail::make_step_matrix(grid, A, 1.0, run.dt);
    const SparseOperator S_cn = detail::make_step_matrix(grid, A, 0.5, run.dt);
    const bool banded = S_be.bandwidth() <= 4;
    BandedLU lu_be, lu_cn;
    if (banded) {
        lu_be = BandedLU::factor(S_be);
        if (n_steps > 1) lu_cn = BandedLU::factor(S_cn);
    }

    std::vector<double> f_static = coeffs.F;
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0), Aphi;
    std::vector<double> f_lo = f_static, f_hi = f_static;

    for (int step = 1; step <= n_steps; ++step) {
        const double t0 = (step - 1) * run.dt, t1 = step * run.dt;
        const double theta = step == 1 ? 1.0 : 0.5;
        if (spec.forcing_t) {
            for (int i = 0; i < n; ++i) {
                f_lo[static_cast<std::size_t>(i)] = spec.forcing_t(grid.pos[i], t0);
                f_hi[static_cast<std::size_t>(i)] = spec.forcing_t(grid.pos[i], t1);
            }
        }
        A.apply(phi, Aphi);
        for (int i = 0; i < n; ++i) {
            if (grid.is_boundary(i)) {
                rhs[static_cast<std::size_t>(i)] = 0.0;
                continue;
            }
            const double fbar =
                theta == 1.0 ? f_hi[static_cast<std::size_t>(i)]
                             : 0.5 * (f_lo[static_cast<std::size_t>(i)] +
                                      f_hi[static_cast<std::size_t>(i)]);
            rhs[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i)] / run.dt -
                                               (1.0 - theta) * Aphi[static_cast<std::size_t>(i)] +
                                               fbar;
        }
        const SparseOperator& S = theta == 1.0 ? S_be : S_cn;
        if (banded) {
            phi = (theta == 1.0 ? lu_be : lu_cn).solve(rhs);
        } else {
            SolverOptions sopt = spec.solver;
            sopt.initial_guess = phi;
            std::vector<double> x;
            const SolveInfo info = bicgstab(S, rhs, x, sopt);
            if (!info.converged)
                throw std::runtime_error("solve_parabolic: step solver did not converge at t = " +
                                         std::to_string(t1) +
                                         " (residual " + std::to_string(info.residual) + ")");
            phi = std::move(x);
        }
        for (int i = 0; i < n; ++i)
            if (grid.is_boundary(i)) phi[static_cast<std::size_t>(i)] = 0.0;
        run.times.push_back(t1);
        run.grad_history.push_back(sup_norm<N>(compute_gradient(grid, phi)));
        maybe_snapshot(step, phi);
    }

    run.final_phi.grid = &grid;
    run.final_phi.v = phi;
    run.sup_grad_over_time = 0.0;
    for (double gh : run.grad_history) run.sup_grad_over_time = std::max(run.sup_grad_over_time, gh);
    return run;
}

/// Shift a sign-free potential to V + |V^-|_inf >= 0. Solutions of the
/// shifted problem map back through the factor exp(shift * t):
/// if psi solves the shifted homogeneous problem then exp(shift t) psi
/// solves the original one.
template <int N>
struct PotentialReduction {
    CoefficientSet<N> shifted;
    double shift = 0.0;
    double factor(double t) const { return std::exp(shift * t); }
};

template <int N>
PotentialReduction<N> reduce_potential(const Grid<N>& grid, const CoefficientSet<N>& coeffs) {
    double vmin = 0.0;
    for (double v : coeffs.V) vmin = std::min(vmin, v);
    PotentialReduction<N> red;
    red.shift = -vmin;  // = |V^-|_inf, zero when V >= 0 already
    if (red.shift == 0.0) {
        red.shifted = coeffs;
        return red;
    }
    auto base_V = coeffs.V_fn;
    const double s = red.shift;
    red.shifted = sample_coefficients<N>(
        grid, coeffs.W_fn, [base_V, s](Vec<N> x) { return base_V(x) + s; }, coeffs.F_fn);
    return red;
}

}  // namespace gradbound
