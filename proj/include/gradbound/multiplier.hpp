#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gradbound/assemble.hpp"
#include "gradbound/coefficients.hpp"
#include "gradbound/elliptic.hpp"
#include "gradbound/geometry.hpp"
#include "gradbound/sparse.hpp"

namespace gradbound {

template <int N>
CoefficientSet<N> coefficients_from_samples(const Grid<N>& g, std::vector<Vec<N>> W,
                                            std::vector<double> V, std::vector<double> F) {
    CoefficientSet<N> cs;
    cs.W = std::move(W);
    cs.V = std::move(V);
    cs.F = std::move(F);
    if (static_cast<int>(cs.W.size()) != g.size() || static_cast<int>(cs.V.size()) != g.size() ||
        static_cast<int>(cs.F.size()) != g.size())
        throw std::invalid_argument("coefficients_from_samples: size mismatch");
    for (int i = 0; i < g.size(); ++i) {
        double wn = 0.0;
        for (int d = 0; d < N; ++d) wn += cs.W[static_cast<std::size_t>(i)][d] * cs.W[static_cast<std::size_t>(i)][d];
        cs.K = std::max(cs.K, std::sqrt(wn));
        cs.M = std::max(cs.M, std::abs(cs.V[static_cast<std::size_t>(i)]));
        cs.f = std::max(cs.f, std::abs(cs.F[static_cast<std::size_t>(i)]));
        if (cs.V[static_cast<std::size_t>(i)] < 0.0) cs.v_nonneg = false;
    }
    return cs;
}

/// Positive multiplier psi with its explicit envelope: the subsolution
/// psi1(x) = exp((K + sqrt(M)) (x - c).e1) and the constant supersolution
/// psi2 = exp(2R (K + sqrt(M))). The discrete comparison principle squeezes
/// the computed psi between them; c_eff reports |grad log psi|_inf over the
/// inner region |x - c| <= 1.4 R, normalized by K + sqrt(M).
template <int N>
struct MultiplierResult {
    std::shared_ptr<const Grid<N>> owned_grid;  // set when the ball grid is built here
    const Grid<N>* grid = nullptr;
    double K = 0.0, M = 0.0, R = 0.0;
    double rate = 0.0;  // K + sqrt(M)
    Vec<N> center{};
    std::vector<double> psi;
    std::vector<double> psi1;
    double psi2 = 1.0;
    std::vector<Vec<N>> log_grad;  // interior nodes; zero at boundary
    double log_grad_sup_inner = 0.0;
    double c_eff = 0.0;
    double envelope_low_violation = 0.0;   // max(psi1 - psi)
    double envelope_high_violation = 0.0;  // max(psi - psi2)
    SolveInfo info;

    double psi1_at(const Vec<N>& x) const { return std::exp(rate * (x[0] - center[0])); }
};

struct MultiplierOptions {
    /// Extend W and V by zero outside the inner ball B(c, R) (the transplant
    /// used to pose the problem on B(c, 2R)). Disable to keep the supplied
    /// coefficients on the whole computational ball.
    bool extend_by_zero = true;
    SolverOptions solver;
};

namespace detail {

template <int N>
void finish_multiplier(MultiplierResult<N>& mr, const std::vector<double>& psi_values) {
    const Grid<N>& g = *mr.grid;
    mr.psi = psi_values;
    mr.psi1.resize(static_cast<std::size_t>(g.size()));
    mr.envelope_low_violation = 0.0;
    mr.envelope_high_violation = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        mr.psi1[static_cast<std::size_t>(i)] = mr.psi1_at(g.pos[i]);
        mr.envelope_low_violation =
            std::max(mr.envelope_low_violation,
                     mr.psi1[static_cast<std::size_t>(i)] - mr.psi[static_cast<std::size_t>(i)]);
        mr.envelope_high_violation =
            std::max(mr.envelope_high_violation, mr.psi[static_cast<std::size_t>(i)] - mr.psi2);
        if (!(mr.psi[static_cast<std::size_t>(i)] > 0.0))
            throw std::runtime_error("multiplier: computed psi is not positive (refine h)");
    }
    std::vector<double> logpsi(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i)
        logpsi[static_cast<std::size_t>(i)] = std::log(mr.psi[static_cast<std::size_t>(i)]);
    mr.log_grad.assign(static_cast<std::size_t>(g.size()), Vec<N>{});
    for (int i = 0; i < g.size(); ++i) {
        if (!g.is_interior(i)) continue;
        const auto& st = g.stencil[static_cast<std::size_t>(i)];
        for (int axis = 0; axis < N; ++axis) {
            const int L = st.nbr[2 * axis], R_ = st.nbr[2 * axis + 1];
            const double dL = st.dist[2 * axis], dR = st.dist[2 * axis + 1];
            mr.log_grad[static_cast<std::size_t>(i)][axis] =
                -dR / (dL * (dL + dR)) * logpsi[static_cast<std::size_t>(L)] +
                (dR - dL) / (dL * dR) * logpsi[static_cast<std::size_t>(i)] +
                dL / (dR * (dL + dR)) * logpsi[static_cast<std::size_t>(R_)];
        }
    }
    mr.log_grad_sup_inner = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        if (!g.is_interior(i)) continue;
        if (dist<N>(g.pos[i], mr.center) > 1.4 * mr.R) continue;
        mr.log_grad_sup_inner =
            std::max(mr.log_grad_sup_inner, norm<N>(mr.log_grad[static_cast<std::size_t>(i)]));
    }
    mr.c_eff = mr.rate > 0.0 ? mr.log_grad_sup_inner / mr.rate : 0.0;
}

}  // namespace detail

/// Solve the homogeneous equation on the ball B(c, 2R) with Dirichlet data
/// psi1, realizing the sub/supersolution existence argument concretely:
/// since psi1 is a subsolution, psi2 a supersolution, and the data sits
/// between them, the comparison principle forces psi1 <= psi <= psi2.
template <int N>
MultiplierResult<N> build_multiplier(double R, std::function<Vec<N>(Vec<N>)> W_fn,
                                     std::function<double(Vec<N>)> V_fn, double h,
                                     const MultiplierOptions& opt = {}) {
    if (!(R > 0.0)) throw std::invalid_argument("build_multiplier: need R > 0");
    auto grid_ptr = std::make_shared<Grid<N>>();
    if constexpr (N == 1)
        *grid_ptr = discretize(make_interval(-2.0 * R, 2.0 * R), h);
    else
        *grid_ptr = discretize(make_disk({0.0, 0.0}, 2.0 * R), h);
    const Grid<N>& g = *grid_ptr;
    const Vec<N> c{};  // ball centered at the origin

    auto W_base = W_fn ? std::move(W_fn) : [](Vec<N>) { return Vec<N>{}; };
    auto V_base = V_fn ? std::move(V_fn) : [](Vec<N>) { return 0.0; };
    std::function<Vec<N>(Vec<N>)> W_eff = W_base;
    std::function<double(Vec<N>)> V_eff = V_base;
    if (opt.extend_by_zero) {
        W_eff = [W_base, c, R](Vec<N> x) {
            return dist<N>(x, c) <= R ? W_base(x) : Vec<N>{};
        };
        V_eff = [V_base, c, R](Vec<N> x) { return dist<N>(x, c) <= R ? V_base(x) : 0.0; };
    }
    CoefficientSet<N> cs = sample_coefficients<N>(g, W_eff, V_eff, nullptr);
    if (!cs.v_nonneg) throw std::invalid_argument("build_multiplier: requires V >= 0");

    MultiplierResult<N> mr;
    mr.owned_grid = grid_ptr;
    mr.grid = grid_ptr.get();
    mr.K = cs.K;
    mr.M = cs.M;
    mr.R = R;
    mr.rate = cs.K + std::sqrt(cs.M);
    mr.center = c;
    mr.psi2 = std::exp(2.0 * R * mr.rate);

    std::vector<double> data(static_cast<std::size_t>(g.size()), 0.0);
    std::vector<double> guess(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
        guess[static_cast<std::size_t>(i)] = mr.psi1_at(g.pos[i]);
        if (g.is_boundary(i)) data[static_cast<std::size_t>(i)] = guess[static_cast<std::size_t>(i)];
    }
    EllipticOptions<N> eopt;
    eopt.solver = opt.solver;
    eopt.solver.initial_guess = guess;
    eopt.boundary_values = &data;
    EllipticSolution<N> sol = solve_elliptic(g, cs, BoundaryCondition::Dirichlet, eopt);
    mr.info = sol.info;
    detail::finish_multiplier(mr, sol.phi.v);
    return mr;
}

/// Same construction posed directly on an existing grid (data psi1 on its
/// boundary). Used for the potential-removal transform, where psi must live
/// on the same nodes as the problem being transformed.
template <int N>
MultiplierResult<N> build_multiplier_on(const Grid<N>& g, const CoefficientSet<N>& coeffs,
                                        const MultiplierOptions& opt = {}) {
    if (!coeffs.v_nonneg) throw std::invalid_argument("build_multiplier_on: requires V >= 0");
    MultiplierResult<N> mr;
    mr.grid = &g;
    mr.K = coeffs.K;
    mr.M = coeffs.M;
    mr.R = g.domain.diameter();
    mr.rate = coeffs.K + std::sqrt(coeffs.M);
    mr.center = g.domain.center();
    mr.psi2 = std::exp(2.0 * mr.R * mr.rate);

    CoefficientSet<N> hom = coeffs;
    std::fill(hom.F.begin(), hom.F.end(), 0.0);
    hom.f = 0.0;

    std::vector<double> data(static_cast<std::size_t>(g.size()), 0.0);
    std::vector<double> guess(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
        guess[static_cast<std::size_t>(i)] = mr.psi1_at(g.pos[i]);
        if (g.is_boundary(i)) data[static_cast<std::size_t>(i)] = guess[static_cast<std::size_t>(i)];
    }
    EllipticOptions<N> eopt;
    eopt.solver = opt.solver;
    eopt.solver.initial_guess = guess;
    eopt.boundary_values = &data;
    EllipticSolution<N> sol = solve_elliptic(g, hom, BoundaryCondition::Dirichlet, eopt);
    mr.info = sol.info;
    detail::finish_multiplier(mr, sol.phi.v);
    return mr;
}

/// c_eff of the log-gradient estimate: |grad log psi|_{inf, inner} divided
/// by K + sqrt(M). Zero rate requires a vanishing log-gradient.
template <int N>
double verify_log_grad_bound(const MultiplierResult<N>& mr) {
    if (mr.rate == 0.0) {
        if (mr.log_grad_sup_inner > 1e-8)
            throw std::runtime_error("verify_log_grad_bound: K = M = 0 but grad log psi != 0");
        return 0.0;
    }
    if (!std::isfinite(mr.c_eff))
        throw std::runtime_error("verify_log_grad_bound: c_eff not finite");
    return mr.c_eff;
}

/// Coefficients of the potential-free transformed problem
///   -Laplace(phi^) + (W - 2 grad log psi) . grad(phi^) = F / psi.
template <int N>
CoefficientSet<N> transform_to_zero_potential(const Grid<N>& g, const CoefficientSet<N>& coeffs,
                                              const MultiplierResult<N>& mr) {
    if (mr.grid != &g)
        throw std::invalid_argument("transform_to_zero_potential: multiplier lives on another grid");
    if (mr.envelope_low_violation > 1e-6 * mr.psi2 || mr.envelope_high_violation > 1e-6 * mr.psi2)
        throw std::runtime_error("transform_to_zero_potential: multiplier envelope unverified");
    std::vector<Vec<N>> W(static_cast<std::size_t>(g.size()));
    std::vector<double> V(static_cast<std::size_t>(g.size()), 0.0);
    std::vector<double> F(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
        for (int d = 0; d < N; ++d)
            W[static_cast<std::size_t>(i)][d] = coeffs.W[static_cast<std::size_t>(i)][d] -
                                                2.0 * mr.log_grad[static_cast<std::size_t>(i)][d];
        F[static_cast<std::size_t>(i)] =
            coeffs.F[static_cast<std::size_t>(i)] / mr.psi[static_cast<std::size_t>(i)];
    }
    return coefficients_from_samples<N>(g, std::move(W), std::move(V), std::move(F));
}

/// Back-map phi = psi * phi^ with the gradient recombination
///   grad phi = phi^ psi grad(log psi) + psi grad(phi^)
/// at interior nodes; boundary nodes use one-sided quotients of the product.
template <int N>
EllipticSolution<N> back_map(const Grid<N>& g, const MultiplierResult<N>& mr,
                             const EllipticSolution<N>& hat) {
    EllipticSolution<N> out;
    out.info = hat.info;
    out.phi = ScalarField<N>(g);
    for (int i = 0; i < g.size(); ++i)
        out.phi[i] = mr.psi[static_cast<std::size_t>(i)] * hat.phi[i];
    out.grad_phi = compute_gradient(g, out.phi.v);
    for (int i = 0; i < g.size(); ++i) {
        if (!g.is_interior(i)) continue;
        for (int d = 0; d < N; ++d)
            out.grad_phi[static_cast<std::size_t>(i)][d] =
                hat.phi[i] * mr.psi[static_cast<std::size_t>(i)] *
                    mr.log_grad[static_cast<std::size_t>(i)][d] +
                mr.psi[static_cast<std::size_t>(i)] * hat.grad_phi[static_cast<std::size_t>(i)][d];
    }
    out.sup_grad = sup_norm<N>(out.grad_phi);
    return out;
}

}  // namespace gradbound
