#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "gradbound/assemble.hpp"
#include "gradbound/barrier.hpp"
#include "gradbound/coefficients.hpp"
#include "gradbound/elliptic.hpp"
#include "gradbound/geometry.hpp"
#include "gradbound/multiplier.hpp"
#include "gradbound/parabolic.hpp"
#include "gradbound/quadrature.hpp"
#include "gradbound/sparse.hpp"

namespace gradbound {

namespace detail {

/// Dense lookup table for the barrier value; keeps big pair scans off the
/// exp() path. Interpolation error is far below the scan tolerances.
struct BarrierTable {
    double inv_step = 0.0;
    double smax = 0.0;
    std::vector<double> val;
    const Barrier* barrier = nullptr;

    explicit BarrierTable(const Barrier& b, double smax_, int size = 1 << 20)
        : smax(smax_), barrier(&b) {
        val.resize(static_cast<std::size_t>(size) + 2);
        inv_step = size / smax;
        for (int i = 0; i <= size + 1; ++i)
            val[static_cast<std::size_t>(i)] = b.value(i / inv_step);
    }

    double operator()(double s) const {
        if (s >= smax) return barrier->value(s);
        const double t = s * inv_step;
        const int k = static_cast<int>(t);
        const double w = t - k;
        return val[static_cast<std::size_t>(k)] * (1.0 - w) +
               val[static_cast<std::size_t>(k) + 1] * w;
    }
};

}  // namespace detail

struct ZScanOptions {
    std::uint64_t pair_cap = 10'000'000;  // full scan when at or under the cap
    double near_diagonal_factor = 4.0;    // always scan pairs with |y-x| < 4h
    std::uint64_t seed = 20240501;        // subsample stream for the generic stratum
};

template <int N>
struct ZScanReport {
    double max_Z = -std::numeric_limits<double>::infinity();
    Vec<N> arg_x{};
    Vec<N> arg_y{};
    std::uint64_t pairs_scanned = 0;
    bool subsampled = false;
    double tolerance = 0.0;  // suggested acceptance tolerance 1e-8 (lambda + f)
    double lambda = 0.0;
    double epsilon = 0.0;     // parabolic scans only
    double time = 0.0;        // parabolic scans only
    bool pass = false;
};

namespace detail {

/// Shared pair-scan core: maximizes |u_i - u_j| - 2 phi((dist)/2) - offset.
template <int N>
ZScanReport<N> scan_pairs(const Grid<N>& grid, const std::vector<double>& u,
                          const Barrier& barrier, double offset, const ZScanOptions& opt) {
    ZScanReport<N> rep;
    const int n = grid.size();
    const detail::BarrierTable table(barrier, std::max(grid.domain.diameter(), 1e-12));
    auto consider = [&](int i, int j) {
        const double d = dist<N>(grid.pos[i], grid.pos[j]);
        if (d == 0.0) return;
        const double z = std::abs(u[static_cast<std::size_t>(i)] -
                                  u[static_cast<std::size_t>(j)]) -
                         2.0 * table(0.5 * d) - offset;
        ++rep.pairs_scanned;
        if (z > rep.max_Z) {
            rep.max_Z = z;
            rep.arg_x = grid.pos[i];
            rep.arg_y = grid.pos[j];
        }
    };

    const std::uint64_t full_pairs =
        static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
    if (full_pairs <= opt.pair_cap) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) consider(i, j);
        rep.lambda = barrier.lambda;
        return rep;
    }

    rep.subsampled = true;
    // stratum 1: all pairs within the near-diagonal radius, via cell buckets
    const double radius = opt.near_diagonal_factor * grid.h;
    const double cell = radius;
    // dense bucket grid over the bounding box
    const Vec<N> c0 = grid.domain.center();
    const Vec<N> half = grid.domain.half_extent();
    std::array<int, N> bmin{}, bsize{};
    for (int d = 0; d < N; ++d) {
        bmin[d] = static_cast<int>(std::floor((c0[d] - half[d] - grid.h) / cell));
        const int hi = static_cast<int>(std::floor((c0[d] + half[d] + grid.h) / cell));
        bsize[d] = hi - bmin[d] + 1;
    }
    auto bucket_index = [&](const Vec<N>& p) {
        std::size_t idx = 0;
        for (int d = 0; d < N; ++d) {
            int q = static_cast<int>(std::floor(p[d] / cell)) - bmin[d];
            q = std::max(0, std::min(bsize[d] - 1, q));
            idx = idx * static_cast<std::size_t>(bsize[d]) + static_cast<std::size_t>(q);
        }
        return idx;
    };
    std::size_t nbuckets = 1;
    for (int d = 0; d < N; ++d) nbuckets *= static_cast<std::size_t>(bsize[d]);
    std::vector<std::vector<int>> buckets(nbuckets);
    for (int i = 0; i < n; ++i) buckets[bucket_index(grid.pos[i])].push_back(i);

    auto for_neighbors = [&](int i, auto&& fn) {
        std::array<int, N> base{};
        for (int d = 0; d < N; ++d)
            base[d] = static_cast<int>(std::floor(grid.pos[i][d] / cell)) - bmin[d];
        if constexpr (N == 1) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int q = base[0] + dx;
                if (q < 0 || q >= bsize[0]) continue;
                for (int j : buckets[static_cast<std::size_t>(q)]) fn(j);
            }
        } else {
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int qx = base[0] + dx, qy = base[1] + dy;
                    if (qx < 0 || qx >= bsize[0] || qy < 0 || qy >= bsize[1]) continue;
                    const std::size_t b =
                        static_cast<std::size_t>(qx) * static_cast<std::size_t>(bsize[1]) +
                        static_cast<std::size_t>(qy);
                    for (int j : buckets[b]) fn(j);
                }
        }
    };
    for (int i = 0; i < n; ++i) {
        for_neighbors(i, [&](int j) {
            if (j <= i) return;
            if (dist<N>(grid.pos[i], grid.pos[j]) < radius) consider(i, j);
        });
    }

    // stratum 2: every boundary x interior and boundary x boundary pair
    std::vector<int> bnodes;
    for (int i = 0; i < n; ++i)
        if (grid.is_boundary(i)) bnodes.push_back(i);
    for (int bi : bnodes)
        for (int j = 0; j < n; ++j)
            if (j != bi && (grid.is_interior(j) || j > bi)) consider(bi, j);

    // stratum 3: seeded uniform sample of the remaining bulk
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (std::uint64_t k = 0; k < opt.pair_cap; ++k) {
        const int i = pick(rng);
        const int j = pick(rng);
        if (i != j) consider(i, j);
    }
    rep.lambda = barrier.lambda;
    return rep;
}

}  // namespace detail

/// Two-point scan of Z(x,y) = phi(y) - phi(x) - 2 phi_barrier(|y-x|/2) over
/// node pairs. Above the pair cap, the near-diagonal and boundary strata
/// (where the maximum-principle argument localizes extrema) are still
/// scanned exhaustively and only the bulk is subsampled.
template <int N>
ZScanReport<N> z_scan_elliptic(const EllipticSolution<N>& sol, const Barrier& barrier,
                               const CoefficientSet<N>& coeffs, const ZScanOptions& opt = {}) {
    const Grid<N>& grid = *sol.phi.grid;
    ZScanReport<N> rep = detail::scan_pairs(grid, sol.phi.v, barrier, 0.0, opt);
    rep.tolerance = 1e-8 * (barrier.lambda + coeffs.f);
    rep.pass = rep.max_Z <= rep.tolerance;
    return rep;
}

/// Parabolic variant with the epsilon * e^t margin, scanned per snapshot.
/// Returns one report per recorded snapshot; pass requires nonpositivity at
/// each of them.
template <int N>
std::vector<ZScanReport<N>> z_scan_parabolic(const ParabolicRun<N>& run, const Barrier& barrier,
                                             const CoefficientSet<N>& coeffs, double epsilon = -1.0,
                                             const ZScanOptions& opt = {}) {
    if (run.snapshots.empty())
        throw std::invalid_argument("z_scan_parabolic: run has no snapshots");
    if (epsilon < 0.0) epsilon = 1e-6 * (run.g0 + coeffs.f + 1.0);
    std::vector<ZScanReport<N>> reports;
    for (const auto& [t, field] : run.snapshots) {
        const Grid<N>& grid = *field.grid;
        ZScanReport<N> rep =
            detail::scan_pairs(grid, field.v, barrier, epsilon * std::exp(t), opt);
        rep.tolerance = 1e-8 * (barrier.lambda + coeffs.f);
        rep.epsilon = epsilon;
        rep.time = t;
        rep.pass = rep.max_Z <= rep.tolerance;
        reports.push_back(rep);
    }
    return reports;
}

/// Measured sup|grad| against the theorem bound. With M = 0 the bound is
/// the explicit barrier slope lambda and pass/fail is asserted; otherwise
/// the report carries the fitted effective constant
///   c_eff = log(measured / f_eff) / ((1 + K + sqrt(M)) diam), clamped at 0.
struct GradientBoundReport {
    double measured = 0.0;
    double bound = 0.0;
    bool explicit_path = false;
    double c_eff = 0.0;
    double K = 0.0, M = 0.0, f_eff = 0.0, diam = 0.0;
    bool pass = false;
};

inline GradientBoundReport make_bound_report(double measured, double K, double M, double f_eff,
                                             double diam, double lambda_explicit) {
    GradientBoundReport rep;
    rep.measured = measured;
    rep.K = K;
    rep.M = M;
    rep.f_eff = f_eff;
    rep.diam = diam;
    if (M == 0.0) {
        rep.explicit_path = true;
        rep.bound = lambda_explicit;
        rep.pass = measured <= lambda_explicit * (1.0 + 1e-9);
    } else {
        const double denom = (1.0 + K + std::sqrt(M)) * diam;
        rep.c_eff = (measured > f_eff && f_eff > 0.0 && denom > 0.0)
                        ? std::log(measured / f_eff) / denom
                        : 0.0;
        rep.bound = std::exp(std::max(rep.c_eff, 1.0) * denom) * f_eff;
        rep.pass = true;  // fitted path: boundedness judged by the caller's ceiling
    }
    return rep;
}

template <int N>
GradientBoundReport check_gradient_bound(const EllipticSolution<N>& sol,
                                         const CoefficientSet<N>& coeffs) {
    const double diam = sol.phi.grid->domain.diameter();
    const double lambda =
        coeffs.M == 0.0 ? build_barrier(coeffs.K, coeffs.f, diam).lambda : 0.0;
    return make_bound_report(sol.sup_grad, coeffs.K, coeffs.M, coeffs.f, diam, lambda);
}

template <int N>
GradientBoundReport check_gradient_bound(const ParabolicRun<N>& run,
                                         const CoefficientSet<N>& coeffs) {
    const double diam = run.final_phi.grid->domain.diameter();
    double lambda = 0.0;
    if (coeffs.M == 0.0)
        lambda = build_barrier(coeffs.K, coeffs.f, diam, BarrierMode::Parabolic, run.g0).lambda;
    return make_bound_report(run.sup_grad_over_time, coeffs.K, coeffs.M, run.g0 + coeffs.f, diam,
                             lambda);
}

/// Pointwise Dirichlet bound |phi(x)| <= phi_barrier(dist(x, boundary)).
template <int N>
struct PointwiseCheck {
    double max_violation = -std::numeric_limits<double>::infinity();
    Vec<N> arg{};
    double tolerance = 0.0;
    bool pass = false;
};

template <int N>
PointwiseCheck<N> dirichlet_pointwise_check(const EllipticSolution<N>& sol,
                                            const Barrier& barrier) {
    const Grid<N>& grid = *sol.phi.grid;
    PointwiseCheck<N> chk;
    for (int i = 0; i < grid.size(); ++i) {
        const double d = grid.is_boundary(i) ? 0.0 : grid.domain.boundary_distance(grid.pos[i]);
        const double viol = std::abs(sol.phi[i]) - barrier.value(std::max(0.0, d));
        if (viol > chk.max_violation) {
            chk.max_violation = viol;
            chk.arg = grid.pos[i];
        }
    }
    chk.tolerance = 1e-8 * std::max(barrier.lambda, 1e-300);
    chk.pass = chk.max_violation <= chk.tolerance;
    return chk;
}

/// Parabolic pointwise bound, checked on every snapshot.
template <int N>
PointwiseCheck<N> dirichlet_pointwise_check(const ParabolicRun<N>& run, const Barrier& barrier) {
    PointwiseCheck<N> chk;
    chk.tolerance = 1e-8 * std::max(barrier.lambda, 1e-300);
    for (const auto& [t, field] : run.snapshots) {
        const Grid<N>& grid = *field.grid;
        for (int i = 0; i < grid.size(); ++i) {
            const double d =
                grid.is_boundary(i) ? 0.0 : grid.domain.boundary_distance(grid.pos[i]);
            const double viol = std::abs(field[i]) - barrier.value(std::max(0.0, d));
            if (viol > chk.max_violation) {
                chk.max_violation = viol;
                chk.arg = grid.pos[i];
            }
        }
    }
    chk.pass = chk.max_violation <= chk.tolerance;
    return chk;
}

/// Quantitative unique-continuation ratio reports (inner mass vs annulus
/// or boundary mass) for adjoint-form solutions -Laplace(u) - div(W u) + V u = 0.
struct ContinuationReport {
    double R = 0.0;
    double inner = 0.0;
    double outer = 0.0;  // annulus integral or boundary line integral
    double c_req = 0.0;
    bool boundary_mode = false;
    double u_min = 0.0;
    double K = 0.0, M = 0.0;
    double normal_derivative_max = 0.0;    // boundary mode: dual problem |d_nu phi|
    double normal_derivative_bound = 0.0;  // e^{(K+1) R}
    bool normal_derivative_pass = true;
    SolveInfo info;
};

struct ContinuationOptions {
    double h = 0.02;
    SolverOptions solver;
};

namespace detail {

inline EllipticSolution<2> solve_adjoint_on_disk(const Grid<2>& grid,
                                                 const CoefficientSet<2>& coeffs,
                                                 const std::function<double(Vec<2>)>& g_fn,
                                                 const SolverOptions& sopt, SolveInfo& info_out) {
    if (!coeffs.v_nonneg)
        throw std::invalid_argument("continuation: requires V >= 0");
    AssembleOptions aopt;
    aopt.drift = DriftForm::Divergence;
    SparseOperator A = assemble(grid, coeffs, BoundaryCondition::Dirichlet, aopt);
    std::vector<double> zero(static_cast<std::size_t>(grid.size()), 0.0);
    std::vector<double> data(static_cast<std::size_t>(grid.size()), 0.0);
    std::vector<double> guess(static_cast<std::size_t>(grid.size()), 0.0);
    double gavg = 0.0;
    int nb = 0;
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_boundary(i)) {
            data[static_cast<std::size_t>(i)] = g_fn(grid.pos[i]);
            gavg += data[static_cast<std::size_t>(i)];
            ++nb;
        }
    gavg /= std::max(1, nb);
    for (int i = 0; i < grid.size(); ++i)
        guess[static_cast<std::size_t>(i)] =
            grid.is_boundary(i) ? data[static_cast<std::size_t>(i)] : gavg;
    std::vector<double> b = build_rhs(grid, zero, &data);
    SolverOptions so = sopt;
    so.initial_guess = guess;
    std::vector<double> x;
    info_out = solve_system(A, b, x, so);
    if (!info_out.converged)
        throw std::runtime_error("continuation: adjoint solve did not converge");
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_boundary(i))
            x[static_cast<std::size_t>(i)] = data[static_cast<std::size_t>(i)];
    EllipticSolution<2> sol;
    sol.phi.grid = &grid;
    sol.phi.v = std::move(x);
    sol.info = info_out;
    return sol;
}

}  // namespace detail

/// Proposition-style annulus ratio: solve on B(0, 2R) with Dirichlet data
/// g > 0, then compare the mass in B(0,R) against the annulus mass.
inline ContinuationReport continuation_ratio_annulus(double R,
                                                     std::function<Vec<2>(Vec<2>)> W_fn,
                                                     std::function<double(Vec<2>)> V_fn,
                                                     std::function<double(Vec<2>)> g_fn,
                                                     const ContinuationOptions& opt = {}) {
    if (!(R > 0.0)) throw std::invalid_argument("continuation_ratio_annulus: need R > 0");
    const Grid<2> grid = discretize(make_disk({0.0, 0.0}, 2.0 * R), opt.h);
    CoefficientSet<2> coeffs = sample_coefficients<2>(grid, std::move(W_fn), std::move(V_fn), nullptr);
    ContinuationReport rep;
    rep.R = R;
    rep.K = coeffs.K;
    rep.M = coeffs.M;
    EllipticSolution<2> u =
        detail::solve_adjoint_on_disk(grid, coeffs, g_fn, opt.solver, rep.info);
    rep.u_min = *std::min_element(u.phi.v.begin(), u.phi.v.end());

    auto rim = [&](Vec<2> p) {
        // cells beyond the lattice carry the boundary data of the nearest
        // boundary direction
        const double nrm = std::sqrt(p[0] * p[0] + p[1] * p[1]);
        const Vec<2> proj{p[0] * 2.0 * R / nrm, p[1] * 2.0 * R / nrm};
        return g_fn ? g_fn(proj) : 0.0;
    };
    rep.inner = integrate_abs_over_disk(grid, u.phi.v, {0.0, 0.0}, R);
    const double full = integrate_abs_over_disk(grid, u.phi.v, {0.0, 0.0}, 2.0 * R, rim);
    rep.outer = full - rep.inner;
    if (!(rep.outer > 0.0))
        throw std::runtime_error(
            "continuation_ratio_annulus: vanishing annulus mass (solver problem: the maximum "
            "principle forbids it for positive data)");
    rep.c_req = std::log(rep.inner / rep.outer) / ((1.0 + coeffs.K + std::sqrt(coeffs.M)) * R);
    return rep;
}

/// Boundary-trace ratio with the dual normal-derivative certificate: the
/// forward problem with F = sign(u) has |d_nu phi| <= e^{(K+1)R} on the
/// boundary (radial-supersolution estimate, independent of V).
inline ContinuationReport continuation_ratio_boundary(double R,
                                                      std::function<Vec<2>(Vec<2>)> W_fn,
                                                      std::function<double(Vec<2>)> V_fn,
                                                      std::function<double(Vec<2>)> g_fn,
                                                      const ContinuationOptions& opt = {}) {
    if (!(R > 0.0)) throw std::invalid_argument("continuation_ratio_boundary: need R > 0");
    const Grid<2> grid = discretize(make_disk({0.0, 0.0}, R), opt.h);
    CoefficientSet<2> coeffs = sample_coefficients<2>(grid, W_fn, V_fn, nullptr);
    ContinuationReport rep;
    rep.boundary_mode = true;
    rep.R = R;
    rep.K = coeffs.K;
    rep.M = coeffs.M;
    EllipticSolution<2> u =
        detail::solve_adjoint_on_disk(grid, coeffs, g_fn, opt.solver, rep.info);
    rep.u_min = *std::min_element(u.phi.v.begin(), u.phi.v.end());

    auto rim = [&](Vec<2> p) {
        const double nrm = std::sqrt(p[0] * p[0] + p[1] * p[1]);
        const Vec<2> proj{p[0] * R / nrm, p[1] * R / nrm};
        return g_fn ? g_fn(proj) : 0.0;
    };
    rep.inner = integrate_abs_over_disk(grid, u.phi.v, {0.0, 0.0}, R, rim);
    rep.outer = integrate_abs_over_boundary(grid, u.phi.v);
    if (!(rep.outer > 0.0))
        throw std::runtime_error("continuation_ratio_boundary: vanishing boundary mass");
    rep.c_req = std::log(rep.inner / rep.outer) / ((1.0 + coeffs.K) * R);

    // dual problem: forward equation forced by sign(u)
    CoefficientSet<2> fwd = coeffs;
    for (int i = 0; i < grid.size(); ++i) {
        const double ui = u.phi[i];
        fwd.F[static_cast<std::size_t>(i)] = ui > 0.0 ? 1.0 : (ui < 0.0 ? -1.0 : 0.0);
    }
    fwd.f = 1.0;
    EllipticOptions<2> eopt;
    eopt.solver = opt.solver;
    EllipticSolution<2> phi = solve_elliptic(grid, fwd, BoundaryCondition::Dirichlet, eopt);
    rep.normal_derivative_bound = std::exp((coeffs.K + 1.0) * R);
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.is_boundary(i)) continue;
        rep.normal_derivative_max =
            std::max(rep.normal_derivative_max, norm<2>(phi.grad_phi[static_cast<std::size_t>(i)]));
    }
    rep.normal_derivative_pass = rep.normal_derivative_max <= rep.normal_derivative_bound;
    return rep;
}

}  // namespace gradbound
