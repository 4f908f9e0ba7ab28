#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gwgl/error.hpp"
#include "gwgl/lp.hpp"

namespace gwgl {

namespace {

constexpr double kTol = 1e-13;

// Basis cells of a transportation tableau, kept as a spanning tree over the
// m row nodes and n column nodes (m + n - 1 cells).
struct TransportBasis {
    Index m, n;
    std::vector<std::vector<Index>> row_cells;  // column indices basic in each row
    std::vector<std::vector<Index>> col_cells;  // row indices basic in each column

    TransportBasis(Index rows, Index cols)
        : m(rows), n(cols), row_cells(static_cast<std::size_t>(rows)),
          col_cells(static_cast<std::size_t>(cols)) {}

    void add(Index i, Index j) {
        row_cells[static_cast<std::size_t>(i)].push_back(j);
        col_cells[static_cast<std::size_t>(j)].push_back(i);
    }

    void remove(Index i, Index j) {
        auto& r = row_cells[static_cast<std::size_t>(i)];
        r.erase(std::find(r.begin(), r.end(), j));
        auto& c = col_cells[static_cast<std::size_t>(j)];
        c.erase(std::find(c.begin(), c.end(), i));
    }

    // Node ids: rows are 0..m-1, columns are m..m+n-1.
    void potentials(const Eigen::MatrixXd& cost, Eigen::VectorXd& u, Eigen::VectorXd& v) const {
        u.setConstant(m, std::numeric_limits<double>::quiet_NaN());
        v.setConstant(n, std::numeric_limits<double>::quiet_NaN());
        std::queue<Index> todo;
        u[0] = 0.0;
        todo.push(0);
        while (!todo.empty()) {
            const Index node = todo.front();
            todo.pop();
            if (node < m) {
                for (Index j : row_cells[static_cast<std::size_t>(node)])
                    if (std::isnan(v[j])) {
                        v[j] = cost(node, j) - u[node];
                        todo.push(m + j);
                    }
            } else {
                const Index j = node - m;
                for (Index i : col_cells[static_cast<std::size_t>(j)])
                    if (std::isnan(u[i])) {
                        u[i] = cost(i, j) - v[j];
                        todo.push(i);
                    }
            }
        }
    }

    // Tree path from column node of j to row node i, as a list of cells
    // starting with a cell in column j and ending with a cell in row i.
    std::vector<std::pair<Index, Index>> path(Index i, Index j) const {
        const Index total = m + n;
        std::vector<Index> parent(static_cast<std::size_t>(total), -1);
        std::vector<char> seen(static_cast<std::size_t>(total), 0);
        std::queue<Index> todo;
        const Index start = m + j;
        seen[static_cast<std::size_t>(start)] = 1;
        todo.push(start);
        while (!todo.empty()) {
            const Index node = todo.front();
            todo.pop();
            if (node == i) break;
            auto visit = [&](Index next) {
                if (!seen[static_cast<std::size_t>(next)]) {
                    seen[static_cast<std::size_t>(next)] = 1;
                    parent[static_cast<std::size_t>(next)] = node;
                    todo.push(next);
                }
            };
            if (node < m) {
                for (Index c : row_cells[static_cast<std::size_t>(node)]) visit(m + c);
            } else {
                for (Index r : col_cells[static_cast<std::size_t>(node - m)]) visit(r);
            }
        }
        std::vector<Index> nodes;
        for (Index node = i; node != -1; node = parent[static_cast<std::size_t>(node)])
            nodes.push_back(node);
        std::reverse(nodes.begin(), nodes.end());  // start .. i
        std::vector<std::pair<Index, Index>> cells;
        for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
            const Index a = nodes[k];
            const Index b = nodes[k + 1];
            cells.emplace_back(a < m ? a : b, a < m ? b - m : a - m);
        }
        return cells;
    }
};

}  // namespace

TransportSolution solve_transport(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                                  const Eigen::MatrixXd& cost) {
    const Index m = supply.size();
    const Index n = demand.size();
    if (m == 0 || n == 0) throw InvalidArgument("transport: empty supply or demand");
    if (cost.rows() != m || cost.cols() != n) throw InvalidArgument("transport: cost shape");
    if ((supply.array() < 0.0).any() || (demand.array() < 0.0).any())
        throw InvalidArgument("transport: negative mass");
    if (std::abs(supply.sum() - demand.sum()) > 1e-9)
        throw InvalidArgument("transport: unbalanced problem");

    // Forbidden arcs get a penalty above any finite plan cost.
    double finite_max = 0.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
            if (std::isnan(cost(i, j)) || cost(i, j) == -std::numeric_limits<double>::infinity())
                throw InvalidArgument("transport: cost must be finite or +inf");
            if (std::isfinite(cost(i, j))) finite_max = std::max(finite_max, std::abs(cost(i, j)));
        }
    const double big = 1e6 * (finite_max + 1.0) * static_cast<double>(m + n);
    Eigen::MatrixXd c = cost;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            if (!std::isfinite(c(i, j))) c(i, j) = big;

    // Northwest-corner start: a staircase of exactly m + n - 1 cells.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, n);
    TransportBasis basis(m, n);
    {
        Eigen::VectorXd ra = supply;
        Eigen::VectorXd rb = demand;
        Index i = 0;
        Index j = 0;
        while (true) {
            const double amount = std::min(ra[i], rb[j]);
            x(i, j) = amount;
            ra[i] -= amount;
            rb[j] -= amount;
            basis.add(i, j);
            if (i == m - 1 && j == n - 1) break;
            if (j == n - 1 || (i < m - 1 && ra[i] <= rb[j])) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    TransportSolution sol;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    const int max_pivots = static_cast<int>(50 * (m + n) * (m + n) + 1000);
    for (; sol.pivots < max_pivots; ++sol.pivots) {
        basis.potentials(c, u, v);
        // Bland's rule: first non-basic cell with negative reduced cost.
        Index ei = -1;
        Index ej = -1;
        const double scale = 1e-12 * (1.0 + c.cwiseAbs().maxCoeff());
        for (Index i = 0; i < m && ei < 0; ++i)
            for (Index j = 0; j < n; ++j) {
                if (c(i, j) - u[i] - v[j] < -scale) {
                    const auto& r = basis.row_cells[static_cast<std::size_t>(i)];
                    if (std::find(r.begin(), r.end(), j) != r.end()) continue;
                    ei = i;
                    ej = j;
                    break;
                }
            }
        if (ei < 0) break;

        // Cycle: entering cell (+), then the tree path from column ej back to
        // row ei alternating (-, +, -, ...).
        const auto cells = basis.path(ei, ej);
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cells.size(); k += 2)
            theta = std::min(theta, x(cells[k].first, cells[k].second));
        Index leave = -1;
        for (std::size_t k = 0; k < cells.size(); k += 2) {
            const auto [ci, cj] = cells[k];
            const Index key = ci * n + cj;
            if (x(ci, cj) <= theta + kTol && (leave < 0 || key < leave)) leave = key;
        }
        theta = std::max(theta, 0.0);
        x(ei, ej) += theta;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto [ci, cj] = cells[k];
            x(ci, cj) += (k % 2 == 0) ? -theta : theta;
        }
        const Index li = leave / n;
        const Index lj = leave % n;
        x(li, lj) = 0.0;
        basis.remove(li, lj);
        basis.add(ei, ej);
    }
    x = x.cwiseMax(0.0);

    double total = 0.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
            if (x(i, j) == 0.0) continue;
            if (!std::isfinite(cost(i, j))) {
                if (x(i, j) > 1e-12) total = std::numeric_limits<double>::infinity();
                continue;
            }
            total += x(i, j) * cost(i, j);
        }
    sol.cost = total;
    sol.plan = std::move(x);
    return sol;
}

}  // namespace gwgl
