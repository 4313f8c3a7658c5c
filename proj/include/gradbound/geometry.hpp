#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradbound/vec.hpp"

namespace gradbound {

enum class DomainKind { Interval, Disk, Ellipse };

/// Strictly convex bounded domain: an interval (N=1), or an axis-aligned
/// disk/ellipse (N=2). These are the only supported shapes; they are
/// strictly convex by construction and all boundary queries are analytic.
template <int N>
struct ConvexDomain;

template <>
struct ConvexDomain<1> {
    DomainKind kind = DomainKind::Interval;
    double a = 0.0;
    double b = 1.0;

    double diameter() const { return b - a; }
    Vec<1> center() const { return {0.5 * (a + b)}; }

    bool contains_strictly(const Vec<1>& x) const { return x[0] > a && x[0] < b; }

    /// Distance from an inside point to the boundary.
    double boundary_distance(const Vec<1>& x) const {
        return std::min(x[0] - a, b - x[0]);
    }

    Vec<1> outward_normal(const Vec<1>& x) const {
        return {x[0] < 0.5 * (a + b) ? -1.0 : 1.0};
    }

    /// Bounding half-extents around the center, per axis.
    Vec<1> half_extent() const { return {0.5 * (b - a)}; }

    /// First boundary crossing along +-axis from an inside point, as the
    /// distance s > 0 with p + s*dir*e_axis on the boundary.
    double line_crossing(const Vec<1>& p, int /*axis*/, int dir) const {
        return dir > 0 ? b - p[0] : p[0] - a;
    }
};

template <>
struct ConvexDomain<2> {
    DomainKind kind = DomainKind::Disk;
    Vec<2> c{0.0, 0.0};
    double r = 1.0;   // disk radius
    double p = 1.0;   // ellipse semi-axis, x
    double q = 1.0;   // ellipse semi-axis, y

    double diameter() const {
        return kind == DomainKind::Disk ? 2.0 * r : 2.0 * std::max(p, q);
    }
    Vec<2> center() const { return c; }

    bool contains_strictly(const Vec<2>& x) const {
        const double dx = x[0] - c[0], dy = x[1] - c[1];
        if (kind == DomainKind::Disk) return dx * dx + dy * dy < r * r;
        const double u = dx / p, v = dy / q;
        return u * u + v * v < 1.0;
    }

    double boundary_distance(const Vec<2>& x) const {
        const double dx = x[0] - c[0], dy = x[1] - c[1];
        if (kind == DomainKind::Disk) return r - std::sqrt(dx * dx + dy * dy);
        return ellipse_distance(std::abs(dx), std::abs(dy));
    }

    Vec<2> outward_normal(const Vec<2>& x) const {
        const double dx = x[0] - c[0], dy = x[1] - c[1];
        if (kind == DomainKind::Disk) {
            const double n = std::sqrt(dx * dx + dy * dy);
            return {dx / n, dy / n};
        }
        // gradient of (x/p)^2 + (y/q)^2, normalized
        const double gx = dx / (p * p), gy = dy / (q * q);
        const double n = std::sqrt(gx * gx + gy * gy);
        return {gx / n, gy / n};
    }

    Vec<2> half_extent() const {
        if (kind == DomainKind::Disk) return {r, r};
        return {p, q};
    }

    double line_crossing(const Vec<2>& pt, int axis, int dir) const {
        // Solve |c + offset|-type quadratic along the grid line through pt.
        const double ax = kind == DomainKind::Disk ? 1.0 : (axis == 0 ? p : q);
        const double ay = kind == DomainKind::Disk ? 1.0 : (axis == 0 ? q : p);
        const double u0 = (pt[axis] - c[axis]) / ax;
        const double v0 = (pt[1 - axis] - c[1 - axis]) / ay;
        const double rr = kind == DomainKind::Disk ? r * r : 1.0;
        // (u0 + s/ax)^2 + v0^2 = rr, pick the root in direction dir
        const double disc = rr - v0 * v0;
        if (disc < 0.0) throw std::runtime_error("line_crossing: line misses the domain");
        const double root = std::sqrt(disc);
        const double u_hit = dir > 0 ? root : -root;
        return (u_hit - u0) * ax * dir;
    }

  private:
    /// Distance from a point (relative coords, first quadrant) to an
    /// origin-centered axis-aligned ellipse, by bisection on the Lagrange
    /// parameter t of the nearest-point conditions. e0 >= e1 are the sorted
    /// semi-axes; the root lies in (-e1^2, 0] for inside points and in
    /// [0, inf) for outside points.
    double ellipse_distance(double x, double y) const {
        const bool x_major = p >= q;
        const double e0 = x_major ? p : q;
        const double e1 = x_major ? q : p;
        const double y0 = x_major ? x : y;
        const double y1 = x_major ? y : x;
        auto F = [&](double t) {
            const double a0 = e0 * y0 / (t + e0 * e0);
            const double a1 = e1 * y1 / (t + e1 * e1);
            return a0 * a0 + a1 * a1 - 1.0;
        };
        if (y1 < 1e-14 * e0) {
            // on the major axis: nearest point is off-axis when inside the
            // evolute cusp, the major vertex otherwise
            const double cusp = (e0 * e0 - e1 * e1) / e0;
            if (y0 >= cusp || e0 == e1) return std::abs(e0 - y0);
            const double xn = e0 * e0 * y0 / (e0 * e0 - e1 * e1);
            const double yn = e1 * std::sqrt(std::max(0.0, 1.0 - (xn / e0) * (xn / e0)));
            return std::sqrt((y0 - xn) * (y0 - xn) + yn * yn);
        }
        const double z0 = y0 / e0, z1 = y1 / e1;
        const bool inside = z0 * z0 + z1 * z1 < 1.0;
        double lo, hi;
        if (inside) {
            lo = -e1 * e1 * (1.0 - 1e-15);
            hi = 0.0;
        } else {
            lo = 0.0;
            hi = e0 * std::sqrt(y0 * y0 + y1 * y1) + e0 * e0;
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (F(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double t = 0.5 * (lo + hi);
        const double px_ = e0 * e0 * y0 / (t + e0 * e0);
        const double py_ = e1 * e1 * y1 / (t + e1 * e1);
        return std::sqrt((y0 - px_) * (y0 - px_) + (y1 - py_) * (y1 - py_));
    }
};

inline ConvexDomain<1> make_interval(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b)) || a >= b)
        throw std::invalid_argument("interval requires finite a < b");
    ConvexDomain<1> d;
    d.a = a;
    d.b = b;
    return d;
}

inline ConvexDomain<2> make_disk(Vec<2> center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("disk requires radius > 0");
    ConvexDomain<2> d;
    d.kind = DomainKind::Disk;
    d.c = center;
    d.r = radius;
    return d;
}

inline ConvexDomain<2> make_ellipse(Vec<2> center, double semi_x, double semi_y) {
    if (!(semi_x > 0.0 && semi_y > 0.0))
        throw std::invalid_argument("ellipse requires positive semi-axes");
    ConvexDomain<2> d;
    d.kind = DomainKind::Ellipse;
    d.c = center;
    d.p = semi_x;
    d.q = semi_y;
    return d;
}

enum class NodeKind : std::uint8_t { Interior, Boundary };

/// Uniform Cartesian grid over a convex domain with boundary nodes snapped
/// to the analytic boundary along grid lines (Shortley-Weller). Interior
/// nodes are lattice points strictly inside the domain; every interior node
/// has a neighbor in each of the 2N axis directions, which is either
/// another interior node at distance h or a boundary node at distance <= h.
template <int N>
struct Grid {
    ConvexDomain<N> domain;
    double h = 0.0;

    std::vector<Vec<N>> pos;
    std::vector<NodeKind> kind;
    std::vector<Vec<N>> normal;  // unit outward normal; zero for interior nodes

    /// Per-node axis neighbors: slot 2*axis is the -axis side, 2*axis+1 the
    /// +axis side. Populated for interior nodes only.
    struct Stencil {
        std::array<int, 2 * N> nbr;
        std::array<double, 2 * N> dist;
    };
    std::vector<Stencil> stencil;

    /// For a boundary node: the grid line it lives on and the two nodes
    /// reaching into the domain along that line (for one-sided derivatives).
    /// inner2 may itself be a boundary node on a short chord.
    struct BoundaryLine {
        int axis = -1;
        Vec<N> inward{};  // unit direction into the domain along the line
        int inner1 = -1;
        int inner2 = -1;
        double d1 = 0.0;
        double d2 = 0.0;
    };
    std::vector<BoundaryLine> bline;

    int interior_count = 0;
    int boundary_count = 0;

    // lattice bookkeeping (2D): index into nodes per lattice point, -1 if none
    std::array<int, N> lat_min{};
    std::array<int, N> lat_size{};
    std::vector<int> lat_node;

    int size() const { return static_cast<int>(pos.size()); }
    bool is_interior(int i) const { return kind[i] == NodeKind::Interior; }
    bool is_boundary(int i) const { return kind[i] == NodeKind::Boundary; }

    int lattice_node(const std::array<int, N>& idx) const {
        std::size_t flat = 0;
        for (int d = 0; d < N; ++d) {
            const int off = idx[d] - lat_min[d];
            if (off < 0 || off >= lat_size[d]) return -1;
            flat = flat * static_cast<std::size_t>(lat_size[d]) + static_cast<std::size_t>(off);
        }
        return lat_node[flat];
    }

    /// Max pairwise node distance; converges to the domain diameter as h->0.
    double node_diameter() const {
        double best = 0.0;
        for (int i = 0; i < size(); ++i) {
            if (!is_boundary(i)) continue;
            for (int j = i + 1; j < size(); ++j) {
                if (!is_boundary(j)) continue;
                best = std::max(best, dist<N>(pos[i], pos[j]));
            }
        }
        return best;
    }
};

namespace detail {

inline constexpr double kOnBoundaryTol = 1e-12;

template <int N>
int classify_lattice_point(const ConvexDomain<N>& dom, const Vec<N>& x, double diam) {
    // 1 = strictly inside, 0 = on boundary (within tol), -1 = outside
    if (dom.contains_strictly(x)) {
        if (dom.boundary_distance(x) <= kOnBoundaryTol * diam) return 0;
        return 1;
    }
    // outside or on: measure proximity by the analytic level set
    if constexpr (N == 1) {
        if (std::abs(x[0] - dom.a) <= kOnBoundaryTol * diam ||
            std::abs(x[0] - dom.b) <= kOnBoundaryTol * diam)
            return 0;
    } else {
        const double dx = x[0] - dom.c[0], dy = x[1] - dom.c[1];
        if (dom.kind == DomainKind::Disk) {
            if (std::abs(std::sqrt(dx * dx + dy * dy) - dom.r) <= kOnBoundaryTol * diam) return 0;
        } else {
            const double u = dx / dom.p, v = dy / dom.q;
            if (std::abs(u * u + v * v - 1.0) <= 4.0 * kOnBoundaryTol) return 0;
        }
    }
    return -1;
}

}  // namespace detail

/// Build the grid. Requires 0 < h < diameter/4. Fails if no interior node
/// results (degenerate resolution).
template <int N>
Grid<N> discretize(const ConvexDomain<N>& dom, double h_request) {
    const double diam = dom.diameter();
    if (!(h_request > 0.0) || h_request > diam / 4.0 * (1.0 + 1e-12))
        throw std::invalid_argument("discretize: need 0 < h <= diameter/4 (h=" +
                                    std::to_string(h_request) + ", diameter=" +
                                    std::to_string(diam) + ")");

    Grid<N> g;
    g.domain = dom;

    // In 1D the spacing is adjusted so the lattice lands exactly on both
    // endpoints and nodes are ordered by position (keeps systems banded);
    // in 2D the lattice is anchored at the center and boundary nodes are
    // snapped along grid lines.
    if constexpr (N == 1) {
        const int cells = std::max<int>(4, static_cast<int>(std::lround(diam / h_request)));
        g.h = diam / cells;
        const int n = cells + 1;
        g.pos.resize(static_cast<std::size_t>(n));
        g.kind.assign(static_cast<std::size_t>(n), NodeKind::Interior);
        g.normal.assign(static_cast<std::size_t>(n), Vec<1>{});
        g.stencil.resize(static_cast<std::size_t>(n));
        g.bline.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) g.pos[static_cast<std::size_t>(i)] = {dom.a + i * g.h};
        g.pos[static_cast<std::size_t>(cells)] = {dom.b};
        g.kind[0] = NodeKind::Boundary;
        g.kind[static_cast<std::size_t>(cells)] = NodeKind::Boundary;
        g.normal[0] = {-1.0};
        g.normal[static_cast<std::size_t>(cells)] = {1.0};
        for (int i = 1; i < cells; ++i) {
            g.stencil[static_cast<std::size_t>(i)].nbr = {i - 1, i + 1};
            g.stencil[static_cast<std::size_t>(i)].dist = {g.h, g.h};
        }
        g.bline[0] = {0, {1.0}, 1, 2, g.h, 2.0 * g.h};
        g.bline[static_cast<std::size_t>(cells)] = {0, {-1.0}, cells - 1, cells - 2, g.h, 2.0 * g.h};
        g.interior_count = cells - 1;
        g.boundary_count = 2;
        g.lat_min = {0};
        g.lat_size = {n};
        g.lat_node.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) g.lat_node[static_cast<std::size_t>(i)] = i;
        return g;
    }

    const Vec<N> c = dom.center();
    const Vec<N> half = dom.half_extent();
    g.h = h_request;
    const double h = g.h;

    for (int d = 0; d < N; ++d) {
        const int m = static_cast<int>(std::ceil(half[d] / h)) + 1;
        g.lat_min[d] = -m;
        g.lat_size[d] = 2 * m + 1;
    }
    std::size_t lat_total = 1;
    for (int d = 0; d < N; ++d) lat_total *= static_cast<std::size_t>(g.lat_size[d]);
    g.lat_node.assign(lat_total, -1);

    std::vector<int> lat_class(lat_total, -1);

    auto lattice_pos = [&](const std::array<int, N>& idx) {
        Vec<N> x{};
        for (int d = 0; d < N; ++d) x[d] = c[d] + idx[d] * h;
        return x;
    };
    auto flat_of = [&](const std::array<int, N>& idx) {
        std::size_t flat = 0;
        for (int d = 0; d < N; ++d)
            flat = flat * static_cast<std::size_t>(g.lat_size[d]) +
                   static_cast<std::size_t>(idx[d] - g.lat_min[d]);
        return flat;
    };

    // pass 1: classify lattice points, create interior nodes in scan order
    std::array<int, N> idx{};
    auto for_each_lattice = [&](auto&& fn) {
        if constexpr (N == 1) {
            for (idx[0] = g.lat_min[0]; idx[0] <= -g.lat_min[0]; ++idx[0]) fn(idx);
        } else {
            for (idx[1] = g.lat_min[1]; idx[1] <= -g.lat_min[1]; ++idx[1])
                for (idx[0] = g.lat_min[0]; idx[0] <= -g.lat_min[0]; ++idx[0]) fn(idx);
        }
    };

    for_each_lattice([&](const std::array<int, N>& id) {
        const Vec<N> x = lattice_pos(id);
        const int cls = detail::classify_lattice_point<N>(dom, x, diam);
        lat_class[flat_of(id)] = cls;
        if (cls == 1) {
            g.lat_node[flat_of(id)] = g.size();
            g.pos.push_back(x);
            g.kind.push_back(NodeKind::Interior);
            g.normal.push_back(Vec<N>{});
        }
    });
    g.interior_count = g.size();
    if (g.interior_count == 0)
        throw std::runtime_error("discretize: no interior nodes at this spacing");

    // pass 2: link neighbors; create boundary nodes (snapped or on-lattice)
    g.stencil.resize(g.pos.size());
    auto ensure_lattice_boundary_node = [&](const std::array<int, N>& id) {
        const std::size_t f = flat_of(id);
        int node = g.lat_node[f];
        if (node >= 0) return node;
        node = g.size();
        g.lat_node[f] = node;
        const Vec<N> x = lattice_pos(id);
        g.pos.push_back(x);
        g.kind.push_back(NodeKind::Boundary);
        g.normal.push_back(dom.outward_normal(x));
        g.stencil.emplace_back();
        return node;
    };

    const int n_int = g.interior_count;
    for (int node = 0; node < n_int; ++node) {
        // recover lattice index from position
        std::array<int, N> id{};
        for (int d = 0; d < N; ++d)
            id[d] = static_cast<int>(std::lround((g.pos[node][d] - c[d]) / h));
        for (int axis = 0; axis < N; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                const int slot = 2 * axis + (dir > 0 ? 1 : 0);
                std::array<int, N> nid = id;
                nid[axis] += dir;
                const std::size_t nf = flat_of(nid);
                const int ncls = lat_class[nf];
                if (ncls == 1) {
                    g.stencil[node].nbr[slot] = g.lat_node[nf];
                    g.stencil[node].dist[slot] = h;
                } else if (ncls == 0) {
                    const int bnode = ensure_lattice_boundary_node(nid);
                    g.stencil[node].nbr[slot] = bnode;
                    g.stencil[node].dist[slot] = h;
                } else {
                    // snapped crossing strictly between the lattice points
                    const double s = dom.line_crossing(g.pos[node], axis, dir);
                    if (!(s > 0.0) || s > h * (1.0 + 1e-9))
                        throw std::runtime_error("discretize: inconsistent boundary crossing");
                    Vec<N> bx = g.pos[node];
                    bx[axis] += dir * s;
                    const int bnode = g.size();
                    g.pos.push_back(bx);
                    g.kind.push_back(NodeKind::Boundary);
                    g.normal.push_back(dom.outward_normal(bx));
                    g.stencil.emplace_back();
                    g.stencil[node].nbr[slot] = bnode;
                    g.stencil[node].dist[slot] = s;
                }
            }
        }
    }
    g.boundary_count = g.size() - g.interior_count;

    // pass 3: boundary line metadata (best-aligned inward grid line)
    g.bline.resize(g.pos.size());
    // invert links: for each boundary node find interior nodes pointing at it
    for (int node = 0; node < n_int; ++node) {
        for (int axis = 0; axis < N; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                const int slot = 2 * axis + (dir > 0 ? 1 : 0);
                const int nb = g.stencil[node].nbr[slot];
                if (nb < 0 || !g.is_boundary(nb)) continue;
                Vec<N> inward{};
                inward[axis] = -static_cast<double>(dir);  // from boundary node into domain
                const double align = -dot<N>(inward, g.normal[nb]);
                auto& bl = g.bline[nb];
                double cur_align = -2.0;
                if (bl.inner1 >= 0) cur_align = -dot<N>(bl.inward, g.normal[nb]);
                if (align > cur_align) {
                    bl.axis = axis;
                    bl.inward = inward;
                    bl.inner1 = node;
                    bl.d1 = g.stencil[node].dist[slot];
                    // next node along the same line, past inner1
                    const int far_slot = 2 * axis + (dir > 0 ? 0 : 1);
                    bl.inner2 = g.stencil[node].nbr[far_slot];
                    bl.d2 = bl.d1 + g.stencil[node].dist[far_slot];
                }
            }
        }
    }
    return g;
}

}  // namespace gradbound
