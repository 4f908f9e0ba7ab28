#include <algorithm>
#include <cmath>
#include <limits>

#include "gwgl/error.hpp"
#include "gwgl/lp.hpp"

namespace gwgl {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau over columns 0..n-1 in canonical form for `basis`.
struct Tableau {
    Eigen::MatrixXd T;    // m x n, B^{-1} A
    Eigen::VectorXd rhs;  // B^{-1} b
    std::vector<Index> basis;

    void pivot(Index row, Index col) {
        const double piv = T(row, col);
        T.row(row) /= piv;
        rhs[row] /= piv;
        for (Index r = 0; r < T.rows(); ++r) {
            if (r == row) continue;
            const double f = T(r, col);
            if (f == 0.0) continue;
            T.row(r) -= f * T.row(row);
            rhs[r] -= f * rhs[row];
        }
        basis[static_cast<std::size_t>(row)] = col;
    }

    // Runs Bland's-rule simplex maximizing c'x over the allowed columns.
    int optimize(const Eigen::VectorXd& c, const std::vector<char>& allowed) {
        const Index m = T.rows();
        const Index n = T.cols();
        int pivots = 0;
        const int max_pivots = 100000;
        for (; pivots < max_pivots; ++pivots) {
            Index enter = -1;
            for (Index j = 0; j < n; ++j) {
                if (!allowed[static_cast<std::size_t>(j)]) continue;
                double reduced = c[j];
                for (Index r = 0; r < m; ++r) reduced -= c[basis[static_cast<std::size_t>(r)]] * T(r, j);
                if (reduced > 1e-10 * (1.0 + std::abs(c[j]))) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return pivots;

            Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Index r = 0; r < m; ++r) {
                if (T(r, enter) <= kPivotTol) continue;
                const double ratio = std::max(rhs[r], 0.0) / T(r, enter);
                if (ratio < best - 1e-14 ||
                    (ratio <= best + 1e-14 && leave >= 0 &&
                     basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = r;
                }
            }
            if (leave < 0) throw NumericalError("linear program is unbounded");
            pivot(leave, enter);
        }
        throw NumericalError("simplex pivot limit reached");
    }
};

Tableau canonical(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, std::vector<Index> basis) {
    Tableau tab{A, b, std::vector<Index>(basis.size(), -1)};
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const Index col = basis[k];
        // Pick the row with the largest entry in this column among rows not yet assigned.
        Index row = -1;
        double best = 0.0;
        for (Index r = 0; r < tab.T.rows(); ++r) {
            if (tab.basis[static_cast<std::size_t>(r)] >= 0) continue;
            if (std::abs(tab.T(r, col)) > best) {
                best = std::abs(tab.T(r, col));
                row = r;
            }
        }
        if (row < 0 || best <= kPivotTol) throw InvalidArgument("initial basis is singular");
        tab.pivot(row, col);
    }
    return tab;
}

}  // namespace

LpSolution maximize(const LinearProgram& lp, std::vector<Index> basis) {
    const Index m = lp.A.rows();
    const Index n = lp.A.cols();
    if (lp.b.size() != m || lp.c.size() != n) throw InvalidArgument("linear program shape");

    LpSolution sol;
    Tableau tab;
    if (!basis.empty()) {
        if (static_cast<Index>(basis.size()) != m) throw InvalidArgument("basis size must equal rows");
        tab = canonical(lp.A, lp.b, basis);
        if ((tab.rhs.array() < -1e-9).any()) throw InvalidArgument("initial basis is infeasible");
        std::vector<char> allowed(static_cast<std::size_t>(n), 1);
        sol.pivots = tab.optimize(lp.c, allowed);
    } else {
        // Phase one: artificial columns n..n+m-1, maximize -sum(artificials).
        Eigen::MatrixXd A(m, n + m);
        Eigen::VectorXd b = lp.b;
        A.leftCols(n) = lp.A;
        A.rightCols(m).setIdentity();
        for (Index r = 0; r < m; ++r)
            if (b[r] < 0.0) {
                A.row(r).head(n) *= -1.0;
                b[r] = -b[r];
            }
        std::vector<Index> art(static_cast<std::size_t>(m));
        for (Index r = 0; r < m; ++r) art[static_cast<std::size_t>(r)] = n + r;
        tab = canonical(A, b, art);
        Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + m);
        c1.tail(m).setConstant(-1.0);
        std::vector<char> all(static_cast<std::size_t>(n + m), 1);
        sol.pivots = tab.optimize(c1, all);
        double infeas = 0.0;
        for (Index r = 0; r < m; ++r)
            if (tab.basis[static_cast<std::size_t>(r)] >= n) infeas += tab.rhs[r];
        if (infeas > 1e-9) throw NumericalError("linear program is infeasible");
        // Drive remaining zero-level artificials out of the basis where possible.
        for (Index r = 0; r < m; ++r) {
            if (tab.basis[static_cast<std::size_t>(r)] < n) continue;
            for (Index j = 0; j < n; ++j)
                if (std::abs(tab.T(r, j)) > kPivotTol) {
                    tab.pivot(r, j);
                    break;
                }
        }
        Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n + m);
        c2.head(n) = lp.c;
        std::vector<char> allowed(static_cast<std::size_t>(n + m), 0);
        std::fill(allowed.begin(), allowed.begin() + n, 1);
        sol.pivots += tab.optimize(c2, allowed);
    }

    sol.x = Eigen::VectorXd::Zero(n);
    for (Index r = 0; r < m; ++r) {
        const Index col = tab.basis[static_cast<std::size_t>(r)];
        if (col < n) sol.x[col] = std::max(tab.rhs[r], 0.0);
    }
    sol.value = lp.c.dot(sol.x);
    sol.basis = tab.basis;
    return sol;
}

}  // namespace gwgl
