#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"

namespace gwgl {

/// Balanced transportation problem: min <cost, plan> subject to row sums =
/// supply and column sums = demand. Entries of `cost` may be +inf to forbid
/// an arc; the result is +inf when no plan avoids forbidden arcs.
struct TransportSolution {
    double cost = 0.0;
    Eigen::MatrixXd plan;
    int pivots = 0;
};

TransportSolution solve_transport(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                                  const Eigen::MatrixXd& cost);

/// max c'x subject to A x = b, x >= 0.
struct LinearProgram {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
};

struct LpSolution {
    Eigen::VectorXd x;
    double value = 0.0;
    std::vector<Index> basis;
    int pivots = 0;
};

/// Dense tableau simplex with Bland's rule. When `basis` is empty a phase-one
/// problem with artificial variables finds a starting vertex; otherwise the
/// given columns must form a feasible basis.
LpSolution maximize(const LinearProgram& lp, std::vector<Index> basis = {});

}  // namespace gwgl
