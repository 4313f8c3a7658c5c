#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gradbound/coefficients.hpp"
#include "gradbound/geometry.hpp"

namespace testutil {

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <int N>
double max_error_vs(const gradbound::Grid<N>& grid, const std::vector<double>& u,
                    const std::function<double(gradbound::Vec<N>)>& exact) {
    double m = 0.0;
    for (int i = 0; i < grid.size(); ++i)
        m = std::max(m, std::abs(u[static_cast<std::size_t>(i)] - exact(grid.pos[i])));
    return m;
}

}  // namespace testutil
