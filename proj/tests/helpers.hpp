#pragma once

#include <random>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"

namespace testutil {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

inline Eigen::VectorXd gaussian(Eigen::Index n, std::mt19937_64& rng) {
    return gaussian(n, 1, rng).col(0);
}

inline double uniform(double a, double b, std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

inline int uniform_int(int a, int b, std::mt19937_64& rng) {
    return std::uniform_int_distribution<int>(a, b)(rng);
}

/// Random partition of 0..p-1 into contiguous groups.
inline gwgl::GroupStructure random_contiguous(gwgl::Index p, std::mt19937_64& rng) {
    std::vector<gwgl::Index> sizes;
    gwgl::Index left = p;
    while (left > 0) {
        const auto s = static_cast<gwgl::Index>(uniform_int(1, static_cast<int>(left), rng));
        sizes.push_back(s);
        left -= s;
    }
    return gwgl::GroupStructure::contiguous(sizes);
}

inline std::vector<std::vector<Eigen::Index>> as_lists(const gwgl::GroupStructure& s) {
    return s.groups;
}

}  // namespace testutil
