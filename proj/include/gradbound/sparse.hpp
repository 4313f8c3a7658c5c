#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradbound {

enum class BoundaryCondition { Dirichlet, Neumann };

/// Compressed-row sparse matrix with a boundary-condition tag. Row entries
/// are kept sorted by column.
struct SparseOperator {
    int n = 0;
    std::vector<int> row_offsets;   // size n+1
    std::vector<int> cols;
    std::vector<double> vals;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
                s += vals[k] * x[static_cast<std::size_t>(cols[k])];
            y[static_cast<std::size_t>(i)] = s;
        }
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y;
        apply(x, y);
        return y;
    }

    double diagonal(int i) const {
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
            if (cols[k] == i) return vals[k];
        return 0.0;
    }

    /// Max |Ax - b| over rows.
    double residual_inf(const std::vector<double>& x, const std::vector<double>& b) const {
        double r = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = -b[static_cast<std::size_t>(i)];
            for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
                s += vals[k] * x[static_cast<std::size_t>(cols[k])];
            r = std::max(r, std::abs(s));
        }
        return r;
    }

    int bandwidth() const {
        int bw = 0;
        for (int i = 0; i < n; ++i)
            for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
                bw = std::max(bw, std::abs(cols[k] - i));
        return bw;
    }

    /// Max row sum of absolute values.
    double inf_norm() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) s += std::abs(vals[k]);
            m = std::max(m, s);
        }
        return m;
    }
};

/// Row-wise builder for SparseOperator.
struct SparseBuilder {
    explicit SparseBuilder(int n) : n_(n), rows_(static_cast<std::size_t>(n)) {}

    void add(int i, int j, double v) { rows_[static_cast<std::size_t>(i)].push_back({j, v}); }

    SparseOperator finish(BoundaryCondition bc) const {
        SparseOperator A;
        A.n = n_;
        A.bc = bc;
        A.row_offsets.resize(static_cast<std::size_t>(n_) + 1, 0);
        std::size_t nnz = 0;
        for (const auto& r : rows_) nnz += r.size();
        A.cols.reserve(nnz);
        A.vals.reserve(nnz);
        for (int i = 0; i < n_; ++i) {
            auto row = rows_[static_cast<std::size_t>(i)];
            std::sort(row.begin(), row.end(),
                      [](const Entry& a, const Entry& b) { return a.col < b.col; });
            const std::size_t row_start = A.cols.size();
            for (const Entry& e : row) {
                if (A.cols.size() > row_start && A.cols.back() == e.col)
                    A.vals.back() += e.val;
                else {
                    A.cols.push_back(e.col);
                    A.vals.push_back(e.val);
                }
            }
            A.row_offsets[static_cast<std::size_t>(i) + 1] = static_cast<int>(A.cols.size());
        }
        return A;
    }

  private:
    struct Entry {
        int col;
        double val;
    };
    int n_;
    std::vector<std::vector<Entry>> rows_;
};

struct SolveInfo {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;   // final |Ax-b|_inf
    double tolerance = 0.0;  // absolute target used
    std::string method;
};

namespace detail {

/// Absolute residual target: rel_tol * |b| with the backward-error floor
/// rel_tol * (|b| + |A| |x|). The floor is what double precision can reach
/// once the operator carries 1/h^2-scaled entries.
inline double residual_target(double rel_tol, double bnorm, double Anorm, double xnorm) {
    return rel_tol * std::max(bnorm, 1e-300) + rel_tol * Anorm * xnorm;
}

}  // namespace detail

struct SolverOptions {
    double rel_tol = 1e-10;
    int max_iter_factor = 20;  // cap = factor * n
    std::vector<double> initial_guess;
};

namespace detail {

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double dot_v(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// BiCGSTAB with Jacobi preconditioning. Convergence is declared on the
/// infinity-norm residual |Ax-b|_inf <= rel_tol * |b|_inf.
inline SolveInfo bicgstab(const SparseOperator& A, const std::vector<double>& b,
                          std::vector<double>& x, const SolverOptions& opt = {}) {
    const int n = A.n;
    const std::size_t un = static_cast<std::size_t>(n);
    SolveInfo info;
    info.method = "bicgstab-jacobi";
    const double bnorm = detail::inf_norm(b);
    const double Anorm = A.inf_norm();
    auto target_for = [&](const std::vector<double>& sol) {
        return detail::residual_target(opt.rel_tol, bnorm, Anorm, detail::inf_norm(sol));
    };

    std::vector<double> diag(un, 1.0);
    for (int i = 0; i < n; ++i) {
        const double d = A.diagonal(i);
        diag[static_cast<std::size_t>(i)] = (d != 0.0) ? 1.0 / d : 1.0;
    }

    x = opt.initial_guess.size() == un ? opt.initial_guess : std::vector<double>(un, 0.0);
    std::vector<double> r = b, tmp;
    A.apply(x, tmp);
    for (std::size_t i = 0; i < un; ++i) r[i] -= tmp[i];
    std::vector<double> r0 = r;
    std::vector<double> p(un, 0.0), v(un, 0.0), s(un, 0.0), t(un, 0.0);
    std::vector<double> phat(un), shat(un);
    std::vector<double> best_x = x;

    double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
    const int max_iter = opt.max_iter_factor * std::max(n, 100);
    const int stagnation_window = 500;

    double rnorm = detail::inf_norm(r);
    double best_rnorm = rnorm;
    int best_iter = 0;
    info.tolerance = target_for(x);
    if (rnorm <= info.tolerance) {
        info.converged = true;
        info.residual = rnorm;
        return info;
    }

    for (int it = 1; it <= max_iter; ++it) {
        const double rho = detail::dot_v(r0, r);
        if (rho == 0.0) break;  // breakdown
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho / rho_prev) * (alpha / omega);
            for (std::size_t i = 0; i < un; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        for (std::size_t i = 0; i < un; ++i) phat[i] = p[i] * diag[i];
        A.apply(phat, v);
        const double r0v = detail::dot_v(r0, v);
        if (r0v == 0.0) break;
        alpha = rho / r0v;
        for (std::size_t i = 0; i < un; ++i) s[i] = r[i] - alpha * v[i];
        for (std::size_t i = 0; i < un; ++i) shat[i] = s[i] * diag[i];
        A.apply(shat, t);
        const double tt = detail::dot_v(t, t);
        omega = tt != 0.0 ? detail::dot_v(t, s) / tt : 0.0;
        for (std::size_t i = 0; i < un; ++i) {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rho_prev = rho;
        info.iterations = it;
        rnorm = detail::inf_norm(r);
        if (rnorm < best_rnorm) {
            best_rnorm = rnorm;
            best_x = x;
            best_iter = it;
        }
        if (rnorm <= target_for(x)) {
            info.residual = A.residual_inf(x, b);
            info.tolerance = target_for(x);
            info.converged = info.residual <= info.tolerance;
            if (info.converged) return info;
        }
        if (omega == 0.0) break;
        if (it - best_iter > stagnation_window) break;  // no recurrence progress
    }
    x = best_x;
    info.residual = A.residual_inf(x, b);
    info.tolerance = target_for(x);
    info.converged = info.residual <= info.tolerance;
    return info;
}

/// Banded LU factorization without pivoting (valid for the diagonally
/// dominant M-matrices assembled here). Used as the direct path in 1D.
struct BandedLU {
    int n = 0;
    int kl = 0, ku = 0;
    std::vector<double> data;  // (kl+ku+1) x n band storage, row = diag offset

    double& at(int i, int j) { return data[static_cast<std::size_t>(j - i + kl) * n + i]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(j - i + kl) * n + i]; }

    static BandedLU factor(const SparseOperator& A) {
        BandedLU f;
        f.n = A.n;
        const int bw = A.bandwidth();
        f.kl = bw;
        f.ku = bw;
        f.data.assign(static_cast<std::size_t>(f.kl + f.ku + 1) * A.n, 0.0);
        for (int i = 0; i < A.n; ++i)
            for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
                f.at(i, A.cols[k]) = A.vals[k];
        // in-place LU, L unit lower within the band
        for (int k = 0; k < f.n - 1; ++k) {
            const double piv = f.at(k, k);
            if (piv == 0.0) throw std::runtime_error("banded LU: zero pivot");
            const int iend = std::min(f.n - 1, k + f.kl);
            for (int i = k + 1; i <= iend; ++i) {
                const double m = f.at(i, k) / piv;
                f.at(i, k) = m;
                const int jend = std::min(f.n - 1, k + f.ku);
                for (int j = k + 1; j <= jend; ++j) f.at(i, j) -= m * f.at(k, j);
            }
        }
        return f;
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> x = b;
        for (int k = 0; k < n - 1; ++k) {
            const int iend = std::min(n - 1, k + kl);
            for (int i = k + 1; i <= iend; ++i)
                x[static_cast<std::size_t>(i)] -= at(i, k) * x[static_cast<std::size_t>(k)];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x[static_cast<std::size_t>(i)];
            const int jend = std::min(n - 1, i + ku);
            for (int j = i + 1; j <= jend; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s / at(i, i);
        }
        return x;
    }
};

/// Linear solve honoring |Ax-b|_inf <= rel_tol * |b|_inf. Narrow-band
/// systems (1D discretizations) go through direct banded elimination,
/// everything else through preconditioned BiCGSTAB.
inline SolveInfo solve_system(const SparseOperator& A, const std::vector<double>& b,
                              std::vector<double>& x, const SolverOptions& opt = {}) {
    if (A.n <= 0) throw std::invalid_argument("solve_system: empty system");
    if (static_cast<int>(b.size()) != A.n)
        throw std::invalid_argument("solve_system: rhs size mismatch");
    if (A.bandwidth() <= 4) {
        const BandedLU lu = BandedLU::factor(A);
        x = lu.solve(b);
        SolveInfo info;
        info.method = "banded-lu";
        info.iterations = 1;
        info.tolerance = detail::residual_target(opt.rel_tol, detail::inf_norm(b), A.inf_norm(),
                                                 detail::inf_norm(x));
        info.residual = A.residual_inf(x, b);
        info.converged = info.residual <= info.tolerance;
        return info;
    }
    return bicgstab(A, b, x, opt);
}

/// Dense LU with partial pivoting. Independent direct route used by the
/// tests to validate the sparse solvers; capped at n <= 2000.
inline std::vector<double> dense_oracle_solve(const SparseOperator& A,
                                              const std::vector<double>& b) {
    if (A.n > 2000) throw std::invalid_argument("dense_oracle_solve: n > 2000");
    if (static_cast<int>(b.size()) != A.n)
        throw std::invalid_argument("dense_oracle_solve: rhs size mismatch");
    const int n = A.n;
    std::vector<double> M(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            M[static_cast<std::size_t>(i) * n + A.cols[k]] = A.vals[k];
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(M[static_cast<std::size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            const double a = std::abs(M[static_cast<std::size_t>(i) * n + k]);
            if (a > best) {
                best = a;
                piv = i;
            }
        }
        if (best == 0.0) throw std::runtime_error("dense_oracle_solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j)
                std::swap(M[static_cast<std::size_t>(piv) * n + j],
                          M[static_cast<std::size_t>(k) * n + j]);
            std::swap(x[static_cast<std::size_t>(piv)], x[static_cast<std::size_t>(k)]);
        }
        const double d = M[static_cast<std::size_t>(k) * n + k];
        for (int i = k + 1; i < n; ++i) {
            const double m = M[static_cast<std::size_t>(i) * n + k] / d;
            if (m == 0.0) continue;
            for (int j = k + 1; j < n; ++j)
                M[static_cast<std::size_t>(i) * n + j] -= m * M[static_cast<std::size_t>(k) * n + j];
            x[static_cast<std::size_t>(i)] -= m * x[static_cast<std::size_t>(k)];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            s -= M[static_cast<std::size_t>(i) * n + j] * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / M[static_cast<std::size_t>(i) * n + i];
    }
    return x;
}

}  // namespace gradbound
