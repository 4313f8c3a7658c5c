#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gradbound/vec.hpp"

namespace gradbound {

/// Seeded piecewise-constant random coefficient field: one draw per cell of
/// a fixed macro-lattice, row-major draw order, so samples are reproducible
/// and independent of the query pattern. W components are uniform in
/// [-w_max, w_max], V uniform in [0, v_max], F uniform in [-f_max, f_max].
template <int N>
class RandomFieldSet {
  public:
    RandomFieldSet(std::uint64_t seed, double cell_size, Vec<N> lo, Vec<N> hi, double w_max,
                   double v_max, double f_max)
        : cell_(cell_size), lo_(lo) {
        std::size_t total = 1;
        for (int d = 0; d < N; ++d) {
            count_[d] = static_cast<int>(std::ceil((hi[d] - lo[d]) / cell_size)) + 1;
            total *= static_cast<std::size_t>(count_[d]);
        }
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uw(-w_max, w_max);
        std::uniform_real_distribution<double> uv(0.0, v_max);
        std::uniform_real_distribution<double> uf(-f_max, f_max);
        w_.resize(total);
        v_.resize(total);
        f_.resize(total);
        for (std::size_t k = 0; k < total; ++k) {
            for (int d = 0; d < N; ++d) w_[k][d] = w_max > 0.0 ? uw(rng) : 0.0;
            v_[k] = v_max > 0.0 ? uv(rng) : 0.0;
            f_[k] = f_max > 0.0 ? uf(rng) : 0.0;
        }
    }

    Vec<N> W(const Vec<N>& x) const { return w_[index(x)]; }
    double V(const Vec<N>& x) const { return v_[index(x)]; }
    double F(const Vec<N>& x) const { return f_[index(x)]; }

  private:
    std::size_t index(const Vec<N>& x) const {
        std::size_t idx = 0;
        for (int d = 0; d < N; ++d) {
            int q = static_cast<int>(std::floor((x[d] - lo_[d]) / cell_));
            q = std::max(0, std::min(count_[d] - 1, q));
            idx = idx * static_cast<std::size_t>(count_[d]) + static_cast<std::size_t>(q);
        }
        return idx;
    }

    double cell_;
    Vec<N> lo_;
    std::array<int, N> count_{};
    std::vector<Vec<N>> w_;
    std::vector<double> v_;
    std::vector<double> f_;
};

}  // namespace gradbound
