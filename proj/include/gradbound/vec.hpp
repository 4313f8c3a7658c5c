#pragma once

#include <array>
#include <cmath>

namespace gradbound {

/// Fixed-size point/vector in N spatial dimensions (N = 1 or 2 here).
template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
inline double dot(const Vec<N>& a, const Vec<N>& b) {
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
inline Vec<N> sub(const Vec<N>& a, const Vec<N>& b) {
    Vec<N> r{};
    for (int i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> add(const Vec<N>& a, const Vec<N>& b) {
    Vec<N> r{};
    for (int i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> scale(const Vec<N>& a, double c) {
    Vec<N> r{};
    for (int i = 0; i < N; ++i) r[i] = a[i] * c;
    return r;
}

template <std::size_t N>
inline double norm(const Vec<N>& a) {
    return std::sqrt(dot(a, a));
}

template <std::size_t N>
inline double dist(const Vec<N>& a, const Vec<N>& b) {
    return norm(sub(a, b));
}

template <std::size_t N>
inline Vec<N> unit_axis(int axis) {
    Vec<N> r{};
    r[axis] = 1.0;
    return r;
}

}  // namespace gradbound
