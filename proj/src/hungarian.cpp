#include "tvc/hungarian.hpp"

#include <cmath>
#include <limits>

namespace tvc {

namespace {

// Shortest augmenting path assignment with potentials (O(n^2 m)); rows <= cols.
std::vector<int> solve_rect(const Mat& c) {
    const int n = c.rows, m = c.cols;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(size_t(n) + 1, 0.0), v(size_t(m) + 1, 0.0);
    std::vector<int> match(size_t(m) + 1, 0), way(size_t(m) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(size_t(m) + 1, inf);
        std::vector<char> used(size_t(m) + 1, 0);
        do {
            used[size_t(j0)] = 1;
            const int i0 = match[size_t(j0)];
            double delta = inf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[size_t(j)]) continue;
                const double cur = c(i0 - 1, j - 1) - u[size_t(i0)] - v[size_t(j)];
                if (cur < minv[size_t(j)]) {
                    minv[size_t(j)] = cur;
                    way[size_t(j)] = j0;
                }
                if (minv[size_t(j)] < delta) {
                    delta = minv[size_t(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[size_t(j)]) {
                    u[size_t(match[size_t(j)])] += delta;
                    v[size_t(j)] -= delta;
                } else {
                    minv[size_t(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[size_t(j0)] != 0);
        do {
            const int j1 = way[size_t(j0)];
            match[size_t(j0)] = match[size_t(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> col_of_row(size_t(n), -1);
    for (int j = 1; j <= m; ++j)
        if (match[size_t(j)] != 0) col_of_row[size_t(match[size_t(j)] - 1)] = j - 1;
    return col_of_row;
}

double row_order_cost(const Mat& c, const std::vector<int>& col_of_row) {
    double s = 0.0;
    for (int r = 0; r < int(col_of_row.size()); ++r) s += c(r, col_of_row[size_t(r)]);
    return s;
}

// Optimal completion cost for free rows x free columns; also returns the
// completing assignment through sub_cols.
double best_completion(const Mat& c, const std::vector<int>& rows, const std::vector<int>& cols,
                       std::vector<int>* chosen_cols) {
    if (rows.empty()) {
        if (chosen_cols) chosen_cols->clear();
        return 0.0;
    }
    Mat sub(int(rows.size()), int(cols.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t cc = 0; cc < cols.size(); ++cc) sub(int(r), int(cc)) = c(rows[r], cols[cc]);
    const std::vector<int> sol = solve_rect(sub);
    double cost = 0.0;
    if (chosen_cols) chosen_cols->resize(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        cost += c(rows[r], cols[size_t(sol[r])]);
        if (chosen_cols) (*chosen_cols)[r] = cols[size_t(sol[r])];
    }
    return cost;
}

}  // namespace

Assignment hungarian_assign(const Mat& cost) {
    require(cost.rows >= 1 && cost.cols >= 1, Err::ShapeMismatch, "empty cost matrix");
    require(cost.rows <= cost.cols, Err::InfeasibleShape,
            "more rows than columns; injective mapping impossible");
    require(cost.all_finite(), Err::ShapeMismatch, "cost matrix must be finite");

    const int n = cost.rows, m = cost.cols;
    std::vector<int> base = solve_rect(cost);
    const double best = row_order_cost(cost, base);

    // lexicographic refinement: fix rows in order to the smallest column that
    // still admits an optimal completion
    std::vector<int> fixed(size_t(n), -1);
    std::vector<char> used(size_t(m), 0);
    for (int r = 0; r < n; ++r) {
        std::vector<int> free_rows;
        for (int rr = r + 1; rr < n; ++rr) free_rows.push_back(rr);
        double prefix = 0.0;
        for (int rr = 0; rr < r; ++rr) prefix += cost(rr, fixed[size_t(rr)]);

        int pick = -1;
        double pick_total = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (used[size_t(j)]) continue;
            std::vector<int> free_cols;
            for (int jj = 0; jj < m; ++jj)
                if (!used[size_t(jj)] && jj != j) free_cols.push_back(jj);
            if (int(free_cols.size()) < int(free_rows.size())) continue;
            const double total =
                prefix + cost(r, j) + best_completion(cost, free_rows, free_cols, nullptr);
            if (total == best) {
                pick = j;
                break;
            }
            if (total < pick_total) {
                pick_total = total;
                pick = j;
            }
        }
        fixed[size_t(r)] = pick;
        used[size_t(pick)] = 1;
    }

    Assignment out;
    out.col_of_row = fixed;
    out.cost = row_order_cost(cost, fixed);
    return out;
}

}  // namespace tvc
