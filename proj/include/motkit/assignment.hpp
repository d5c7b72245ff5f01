#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "motkit/errors.hpp"

namespace motkit {

// Dense row-major cost (or similarity) matrix. All entries must be finite.
class CostMatrix {
public:
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) {
            throw ValidationError("CostMatrix: value count does not match dimensions");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    void check_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw ValidationError("CostMatrix: non-finite entry");
            }
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

enum class AssignMode { Minimize, Maximize };

using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

inline double assignment_total(const CostMatrix& costs, const Assignment& pairs) {
    double total = 0.0;
    for (const auto& [r, c] : pairs) total += costs.at(r, c);
    return total;
}

namespace detail {

// Potential-based Hungarian algorithm on a square matrix, O(n^3), minimizing.
// Returns col index assigned to each row.
inline std::vector<int> hungarian_square(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

} // namespace detail

// Optimal one-to-one partial assignment of min(rows, cols) pairs.
// Rectangular inputs are padded to square with zero-cost dummies; maximize
// mode negates with an offset so a single minimizing code path serves both.
inline Assignment solve_assignment(const CostMatrix& costs, AssignMode mode) {
    const std::size_t rows = costs.rows();
    const std::size_t cols = costs.cols();
    if (rows == 0 || cols == 0) return {};
    costs.check_finite();

    const std::size_t n = std::max(rows, cols);
    double offset = 0.0;
    if (mode == AssignMode::Maximize) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) offset = std::max(offset, costs.at(r, c));
    }
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            a[r][c] = mode == AssignMode::Minimize ? costs.at(r, c) : offset - costs.at(r, c);
        }
    }
    const std::vector<int> row_to_col = detail::hungarian_square(a);

    Assignment result;
    result.reserve(std::min(rows, cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const int c = row_to_col[r];
        if (c >= 0 && static_cast<std::size_t>(c) < cols) {
            result.emplace_back(r, static_cast<std::size_t>(c));
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

// Exhaustive enumeration oracle; refuses anything above 8x8. Depth-first in
// (row, col) order, strict improvement only, so the first optimum found is
// the lexicographically smallest pair set.
inline Assignment exhaustive_assignment(const CostMatrix& costs, AssignMode mode) {
    const std::size_t rows = costs.rows();
    const std::size_t cols = costs.cols();
    if (rows == 0 || cols == 0) return {};
    if (std::max(rows, cols) > 8) {
        throw ValidationError("exhaustive_assignment: dimension above 8 refused");
    }
    costs.check_finite();

    const bool transposed = rows > cols;
    const std::size_t nr = transposed ? cols : rows;
    const std::size_t nc = transposed ? rows : cols;
    auto cost_at = [&](std::size_t r, std::size_t c) {
        return transposed ? costs.at(c, r) : costs.at(r, c);
    };
    const double sign = mode == AssignMode::Minimize ? 1.0 : -1.0;

    std::vector<int> best(nr, -1), current(nr, -1);
    double best_total = std::numeric_limits<double>::infinity();
    std::vector<char> used(nc, false);

    auto dfs = [&](auto&& self, std::size_t row, double total) -> void {
        if (row == nr) {
            if (total < best_total) {
                best_total = total;
                best = current;
            }
            return;
        }
        for (std::size_t c = 0; c < nc; ++c) {
            if (used[c]) continue;
            used[c] = true;
            current[row] = static_cast<int>(c);
            self(self, row + 1, total + sign * cost_at(row, c));
            used[c] = false;
        }
    };
    dfs(dfs, 0, 0.0);

    Assignment result;
    result.reserve(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        const auto c = static_cast<std::size_t>(best[r]);
        if (transposed) {
            result.emplace_back(c, r);
        } else {
            result.emplace_back(r, c);
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace motkit
