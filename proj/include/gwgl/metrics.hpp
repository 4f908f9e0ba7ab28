#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"
#include "gwgl/solvers.hpp"

namespace gwgl {

/// Median of |y_true - y_pred|; the mean of the two middle values for even
/// lengths.
double mad(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

/// Median with the same even-length convention.
double median(std::vector<double> values);

struct OracleScores {
    double rr = 0.0;
    double rte = 0.0;
    double pve = 0.0;
    // Scores of beta_hat = beta_star and beta_hat = 0.
    double ideal_rr = 0.0, ideal_rte = 0.0, ideal_pve = 0.0;
    double null_rr = 0.0, null_rte = 0.0, null_pve = 0.0;
};

/// Relative risk, relative test error and proportion of variance explained of
/// beta_hat under predictor covariance Sigma and noise variance sigma2.
OracleScores oracle_scores(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
                           const Eigen::MatrixXd& covariance, double sigma2);

/// Within-group difference: average over groups of size >= 2 of the
/// pair-averaged |beta_i - beta_j| / |x_i'x_j|.
double wgd(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& X, const GroupStructure& structure);

struct PairBound {
    Index i = 0;
    Index j = 0;
    double correlation = 0.0;
    double difference = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct GroupingReport {
    std::vector<PairBound> pairs;
    std::vector<std::string> notes;
    bool all_pass = true;
};

/// Checks the grouping-effect bound
///   |sqrt(p_a) b_i/||b^a|| - sqrt(p_b) b_j/||b^b||| <= sqrt(2(1 - rho_ij)) / (sqrt(N) eps)
/// for every pair of predictors whose groups are nonzero, with relative slack
/// 1e-3 and absolute slack 1e-6 for solver accuracy.
GroupingReport grouping_bound_check(const FitResult& fit, const Eigen::MatrixXd& X,
                                    const GroupStructure& structure, double epsilon);

enum class Direction { Minimize, Maximize };

struct MpiResult {
    double value = 0.0;
    Index point = 0;  // 0-based sweep index attaining the value
    std::vector<std::string> warnings;
};

/// Maximum percentage improvement of `ours` over the best competitor across a
/// sweep. Points where the best competitor scores 0 are skipped.
MpiResult mpi(const std::vector<double>& ours, const std::vector<std::vector<double>>& others,
              Direction direction);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gwgl
