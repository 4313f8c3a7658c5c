#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gradbound/geometry.hpp"

namespace gradbound {

/// Scalar field sampled at grid nodes.
template <int N>
struct ScalarField {
    const Grid<N>* grid = nullptr;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid<N>& g, double fill = 0.0)
        : grid(&g), v(static_cast<std::size_t>(g.size()), fill) {}

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(v.size()); }

    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

template <int N>
ScalarField<N> sample_field(const Grid<N>& g, const std::function<double(Vec<N>)>& f) {
    ScalarField<N> out(g);
    for (int i = 0; i < g.size(); ++i) out[i] = f(g.pos[i]);
    return out;
}

/// Drift W, potential V and forcing F sampled at the nodes, together with
/// their sup-norms K = |W|_inf, M = |V|_inf, f = |F|_inf taken over the
/// samples. The sampling callables are kept for face/midpoint evaluation.
template <int N>
struct CoefficientSet {
    std::vector<Vec<N>> W;
    std::vector<double> V;
    std::vector<double> F;
    double K = 0.0;
    double M = 0.0;
    double f = 0.0;
    bool v_nonneg = true;

    std::function<Vec<N>(Vec<N>)> W_fn;
    std::function<double(Vec<N>)> V_fn;
    std::function<double(Vec<N>)> F_fn;
};

template <int N>
CoefficientSet<N> sample_coefficients(const Grid<N>& g,
                                      std::function<Vec<N>(Vec<N>)> W_fn,
                                      std::function<double(Vec<N>)> V_fn,
                                      std::function<double(Vec<N>)> F_fn) {
    CoefficientSet<N> cs;
    cs.W_fn = W_fn ? std::move(W_fn) : [](Vec<N>) { return Vec<N>{}; };
    cs.V_fn = V_fn ? std::move(V_fn) : [](Vec<N>) { return 0.0; };
    cs.F_fn = F_fn ? std::move(F_fn) : [](Vec<N>) { return 0.0; };
    const int n = g.size();
    cs.W.resize(static_cast<std::size_t>(n));
    cs.V.resize(static_cast<std::size_t>(n));
    cs.F.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        cs.W[static_cast<std::size_t>(i)] = cs.W_fn(g.pos[i]);
        cs.V[static_cast<std::size_t>(i)] = cs.V_fn(g.pos[i]);
        cs.F[static_cast<std::size_t>(i)] = cs.F_fn(g.pos[i]);
        for (int d = 0; d < N; ++d)
            if (!std::isfinite(cs.W[static_cast<std::size_t>(i)][d]))
                throw std::invalid_argument("coefficient sample not finite (W)");
        if (!std::isfinite(cs.V[static_cast<std::size_t>(i)]) ||
            !std::isfinite(cs.F[static_cast<std::size_t>(i)]))
            throw std::invalid_argument("coefficient sample not finite");
        double wn = 0.0;
        for (int d = 0; d < N; ++d)
            wn += cs.W[static_cast<std::size_t>(i)][d] * cs.W[static_cast<std::size_t>(i)][d];
        cs.K = std::max(cs.K, std::sqrt(wn));
        cs.M = std::max(cs.M, std::abs(cs.V[static_cast<std::size_t>(i)]));
        cs.f = std::max(cs.f, std::abs(cs.F[static_cast<std::size_t>(i)]));
        if (cs.V[static_cast<std::size_t>(i)] < 0.0) cs.v_nonneg = false;
    }
    return cs;
}

template <int N>
CoefficientSet<N> constant_coefficients(const Grid<N>& g, Vec<N> W, double V, double F) {
    return sample_coefficients<N>(
        g, [W](Vec<N>) { return W; }, [V](Vec<N>) { return V; }, [F](Vec<N>) { return F; });
}

}  // namespace gradbound
