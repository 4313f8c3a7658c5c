#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gradbound/coefficients.hpp"
#include "gradbound/geometry.hpp"

namespace gradbound {

enum class BarrierMode { Elliptic, Parabolic };

/// One-dimensional comparison function phi with
///   -phi'' = a phi' + 2 f,  phi(0) = 0,  phi'(0) = lambda,
/// where a = K + 1. Stored in closed form:
///   phi'(s) = (lambda + 2f/a) e^{-a s} - 2f/a
///   phi(s)  = (lambda + 2f/a)(1 - e^{-a s})/a - (2f/a) s
/// The slope lambda defaults to the smallest published choice that keeps
/// phi' > 0 across [0, R]; parabolic mode adds the initial-gradient term so
/// that phi' > g0 across [0, R].
struct Barrier {
    double K = 0.0;
    double f = 0.0;
    double R = 0.0;
    double g0 = 0.0;  // parabolic mode only
    BarrierMode mode = BarrierMode::Elliptic;
    double a = 1.0;
    double lambda = 0.0;

    double value(double s) const {
        return (lambda + 2.0 * f / a) * (1.0 - std::exp(-a * s)) / a - 2.0 * f * s / a;
    }
    double slope(double s) const {
        return (lambda + 2.0 * f / a) * std::exp(-a * s) - 2.0 * f / a;
    }
    double curvature(double s) const {
        return -a * (lambda + 2.0 * f / a) * std::exp(-a * s);
    }
    /// Residual of -phi'' - (a phi' + 2f); identically zero in exact
    /// arithmetic, sampled in tests for roundoff control.
    double ode_residual(double s) const {
        return -curvature(s) - (a * slope(s) + 2.0 * f);
    }

    bool degenerate() const { return lambda == 0.0 && f == 0.0; }
};

struct BarrierOptions {
    std::optional<double> lambda_override;  // replaces the published default
    bool skip_validation = false;           // allows deliberately broken barriers
};

inline Barrier build_barrier(double K, double f, double R, BarrierMode mode = BarrierMode::Elliptic,
                             double g0 = 0.0, const BarrierOptions& opt = {}) {
    if (K < 0.0 || f < 0.0 || !(R > 0.0))
        throw std::invalid_argument("build_barrier: need K >= 0, f >= 0, R > 0");
    if (mode == BarrierMode::Parabolic && g0 < 0.0)
        throw std::invalid_argument("build_barrier: need g0 >= 0");
    Barrier b;
    b.K = K;
    b.f = f;
    b.R = R;
    b.mode = mode;
    b.g0 = mode == BarrierMode::Parabolic ? g0 : 0.0;
    b.a = K + 1.0;
    b.lambda = 2.0 * f / b.a * std::exp(b.a * R);
    if (mode == BarrierMode::Parabolic) b.lambda += 2.0 * g0 * std::exp(b.a * R);
    if (opt.lambda_override) b.lambda = *opt.lambda_override;
    if (!opt.skip_validation && !b.degenerate()) {
        const double floor = mode == BarrierMode::Parabolic ? b.g0 : 0.0;
        if (!(b.slope(R) > floor))
            throw std::invalid_argument("build_barrier: slope condition phi' > " +
                                        std::to_string(floor) + " fails at s = R");
    }
    return b;
}

/// Planar comparison field v(x) = phi((x - y) . nu_in(y)) built from a
/// boundary point y; nu_in is the inward unit normal, so the argument is the
/// distance from x to the tangent plane at y (nonnegative on a convex
/// domain). v vanishes at y, dominates |phi| on the boundary, and satisfies
/// -Laplace(v) + W.grad(v) >= |F|_inf wherever phi' > 0.
template <int N>
ScalarField<N> planar_supersolution(const Grid<N>& grid, const Barrier& barrier,
                                    const Vec<N>& y, const Vec<N>& outward_normal) {
    ScalarField<N> v(grid);
    for (int i = 0; i < grid.size(); ++i) {
        const double s = -dot<N>(sub<N>(grid.pos[i], y), outward_normal);
        v[i] = barrier.value(std::max(0.0, s));
    }
    return v;
}

/// Radial comparison function of the boundary-flux estimate:
///   phi_rad(r) = (e^{aR} - e^{ar}) / a, a = K + 1, on a ball of radius R,
/// N >= 2. Supersolution of the forced problem with |F| <= 1:
///   e^{ar}(a + (N-1)/r + W.x/r) + V phi_rad >= 1 for |W| <= K, V >= 0.
struct RadialSupersolution {
    double K = 0.0;
    double R = 0.0;
    int dim = 2;
    double a = 1.0;

    double value(double r) const { return (std::exp(a * R) - std::exp(a * r)) / a; }
    double slope(double r) const { return -std::exp(a * r); }
    double normal_derivative_at_R() const { return -std::exp(a * R); }

    /// Left-hand side of the supersolution inequality with the adversarial
    /// drift W.x/r = -K and a given potential value V >= 0.
    double residual(double r, double V = 0.0) const {
        return std::exp(a * r) * (a + (dim - 1) / r - K) + V * value(r);
    }
};

inline RadialSupersolution build_radial_supersolution(double K, double R, int dim = 2) {
    if (dim < 2)
        throw std::invalid_argument(
            "build_radial_supersolution: radial form uses (N-1)/r, needs N >= 2");
    if (K < 0.0 || !(R > 0.0))
        throw std::invalid_argument("build_radial_supersolution: need K >= 0, R > 0");
    RadialSupersolution rs;
    rs.K = K;
    rs.R = R;
    rs.dim = dim;
    rs.a = K + 1.0;
    return rs;
}

/// Gradient bound of the elliptic estimate. For M = 0 the bound is the
/// fully explicit barrier slope lambda (no free constant); otherwise it is
/// exp(C (1 + K + sqrt(M)) R) * f with a caller-supplied constant.
inline double explicit_grad_bound(double K, double M, double f, double R, double C = 1.0) {
    if (K < 0.0 || M < 0.0 || f < 0.0 || R < 0.0)
        throw std::invalid_argument("explicit_grad_bound: negative input");
    if (f == 0.0) return 0.0;
    if (M == 0.0) return 2.0 * f / (K + 1.0) * std::exp((K + 1.0) * R);
    return std::exp(C * (1.0 + K + std::sqrt(M)) * R) * f;
}

/// CSV rows (s, phi, phi') of a barrier profile.
inline std::vector<std::array<double, 3>> barrier_profile(const Barrier& b, int samples) {
    std::vector<std::array<double, 3>> rows;
    rows.reserve(static_cast<std::size_t>(samples) + 1);
    for (int i = 0; i <= samples; ++i) {
        const double s = b.R * i / samples;
        rows.push_back({s, b.value(s), b.slope(s)});
    }
    return rows;
}

}  // namespace gradbound
