#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gradbound/coefficients.hpp"
#include "gradbound/geometry.hpp"

namespace gradbound {

namespace detail {

/// Primitive of the half-chord: int sqrt(r^2 - y^2) dy.
inline double chord_primitive(double y, double r) {
    y = std::max(-r, std::min(r, y));
    return 0.5 * (y * std::sqrt(std::max(0.0, r * r - y * y)) + r * r * std::asin(y / r));
}

/// Area of { (x,y) in disk(0,r) : x <= X, y <= Y } for X >= 0.
inline double disk_corner_area_xpos(double X, double Y, double r) {
    const double hi = std::max(-r, std::min(r, Y));
    const double lo = -r;
    if (hi <= lo) return 0.0;
    // integral of w(y) over [lo, hi]
    const double base = chord_primitive(hi, r) - chord_primitive(lo, r);
    // plus integral of min(X, w(y)): w >= X iff |y| <= yx
    const double yx = X >= r ? 0.0 : std::sqrt(std::max(0.0, r * r - X * X));
    double s = 0.0;
    const double a_hi = std::min(hi, -yx);
    if (a_hi > lo) s += chord_primitive(a_hi, r) - chord_primitive(lo, r);
    const double b_lo = std::max(lo, -yx), b_hi = std::min(hi, yx);
    if (b_hi > b_lo) s += X * (b_hi - b_lo);
    const double c_lo = std::max(lo, yx);
    if (hi > c_lo) s += chord_primitive(hi, r) - chord_primitive(c_lo, r);
    return base + s;
}

/// Area of { (x,y) in disk(0,r) : x <= X, y <= Y } for any X.
inline double disk_corner_area(double X, double Y, double r) {
    if (X >= 0.0) return disk_corner_area_xpos(X, Y, r);
    const double hi = std::max(-r, std::min(r, Y));
    const double strip = 2.0 * (chord_primitive(hi, r) - chord_primitive(-r, r));
    return strip - disk_corner_area_xpos(-X, Y, r);
}

}  // namespace detail

/// Exact area of the intersection of disk(center, r) with the axis-aligned
/// rectangle [x0,x1] x [y0,y1].
inline double disk_rect_overlap(const Vec<2>& center, double r, double x0, double x1, double y0,
                                double y1) {
    if (!(x1 > x0) || !(y1 > y0) || !(r > 0.0)) return 0.0;
    const double a = detail::disk_corner_area(x1 - center[0], y1 - center[1], r);
    const double b = detail::disk_corner_area(x0 - center[0], y1 - center[1], r);
    const double c = detail::disk_corner_area(x1 - center[0], y0 - center[1], r);
    const double d = detail::disk_corner_area(x0 - center[0], y0 - center[1], r);
    return std::max(0.0, a - b - c + d);
}

/// Midpoint quadrature of |u| over disk(center, rho) with lattice cells
/// clipped exactly to the disk. Cells whose center carries no grid value
/// (outside the domain) fall back to the supplied closure, typically the
/// Dirichlet boundary data; such cells only occur in the thin rim where the
/// integration disk meets the domain boundary.
inline double integrate_abs_over_disk(const Grid<2>& grid, const std::vector<double>& u,
                                      const Vec<2>& center, double rho,
                                      const std::function<double(Vec<2>)>& fallback = {}) {
    const double h = grid.h;
    const Vec<2> c0 = grid.domain.center();
    double total = 0.0;
    const int pad = 2;
    const int i_lo = static_cast<int>(std::floor((center[0] - rho - c0[0]) / h)) - pad;
    const int i_hi = static_cast<int>(std::ceil((center[0] + rho - c0[0]) / h)) + pad;
    const int j_lo = static_cast<int>(std::floor((center[1] - rho - c0[1]) / h)) - pad;
    const int j_hi = static_cast<int>(std::ceil((center[1] + rho - c0[1]) / h)) + pad;
    for (int j = j_lo; j <= j_hi; ++j) {
        for (int i = i_lo; i <= i_hi; ++i) {
            const Vec<2> p{c0[0] + i * h, c0[1] + j * h};
            const double w = disk_rect_overlap(center, rho, p[0] - 0.5 * h, p[0] + 0.5 * h,
                                               p[1] - 0.5 * h, p[1] + 0.5 * h);
            if (w <= 0.0) continue;
            const int node = grid.lattice_node({i, j});
            double value;
            if (node >= 0) {
                value = u[static_cast<std::size_t>(node)];
            } else {
                if (!fallback)
                    throw std::runtime_error(
                        "integrate_abs_over_disk: cell without node value and no fallback");
                value = fallback(p);
            }
            total += w * std::abs(value);
        }
    }
    return total;
}

/// Trapezoid rule for |u| over a disk-domain boundary, using the snapped
/// boundary nodes sorted by angle; arc lengths are exact.
inline double integrate_abs_over_boundary(const Grid<2>& grid, const std::vector<double>& u) {
    if (grid.domain.kind != DomainKind::Disk)
        throw std::invalid_argument("integrate_abs_over_boundary: disk domains only");
    const Vec<2> c = grid.domain.c;
    const double R = grid.domain.r;
    std::vector<std::pair<double, double>> ring;  // (angle, |u|)
    ring.reserve(static_cast<std::size_t>(grid.boundary_count));
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.is_boundary(i)) continue;
        const double ang = std::atan2(grid.pos[i][1] - c[1], grid.pos[i][0] - c[0]);
        ring.emplace_back(ang, std::abs(u[static_cast<std::size_t>(i)]));
    }
    if (ring.size() < 3) throw std::runtime_error("integrate_abs_over_boundary: too few nodes");
    std::sort(ring.begin(), ring.end());
    double total = 0.0;
    for (std::size_t k = 0; k < ring.size(); ++k) {
        const auto& a = ring[k];
        const auto& b = ring[(k + 1) % ring.size()];
        double dth = b.first - a.first;
        if (dth < 0.0) dth += 2.0 * std::acos(-1.0);
        total += 0.5 * (a.second + b.second) * R * dth;
    }
    return total;
}

/// Composite Simpson on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace gradbound
