#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"
#include "gwgl/norms.hpp"
#include "gwgl/solvers.hpp"

namespace gwgl {

/// Finitely supported probability distribution. Each row of `support` is one
/// point.
struct DiscreteDistribution {
    Eigen::MatrixXd support;
    Eigen::VectorXd probs;

    Index size() const { return support.rows(); }
    Index dim() const { return support.cols(); }

    /// Throws InvalidArgument unless probs are non-negative, sum to one within
    /// 1e-12 and every support point is finite.
    void validate() const;

    /// Equal mass on every row of `points`.
    static DiscreteDistribution uniform(const Eigen::MatrixXd& points);

    /// Merges bit-identical support points, summing their mass.
    DiscreteDistribution merged() const;
};

/// Ground metric on the support space.
class GroundMetric {
public:
    using Fn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

    GroundMetric(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

    /// ||a - b||_r.
    static GroundMetric lp(double r);
    /// Weighted (q,t) group norm of a - b (response block included when the
    /// norm carries a response weight).
    static GroundMetric group(GroupStructure structure, WeightedGroupNorm norm);
    /// The last coordinate is a class label: points with different labels are
    /// infinitely far apart, otherwise `base` measures the remaining coordinates.
    static GroundMetric label_separated(GroundMetric base);

    double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return fn_(a, b); }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Fn fn_;
};

struct TransportPlan {
    Eigen::MatrixXd plan;  // source support x target support
};

struct W1Result {
    double distance = 0.0;
    TransportPlan plan;
};

/// Pairwise ground costs between two supports.
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to,
                            const GroundMetric& metric);

/// Exact order-one Wasserstein distance by the transportation simplex.
W1Result w1_discrete(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                     const GroundMetric& metric);

/// q * P_out + (1 - q) * P with duplicate support points merged.
DiscreteDistribution mixture(const DiscreteDistribution& P, const DiscreteDistribution& P_out,
                             double q);

/// W1(P_out, P_mix) / W1(P, P_mix) for P_mix = q * P_out + (1 - q) * P.
double mixture_ratio(const DiscreteDistribution& P, const DiscreteDistribution& P_out, double q,
                     const GroundMetric& metric);

/// Loss of the linear model beta at a predictor-response point z = (x, y).
double point_loss(const Eigen::VectorXd& z, const Eigen::VectorXd& beta, Loss loss);

struct DroResult {
    double worst_case = 0.0;
    double empirical = 0.0;
    /// Optimal coupling: row i = sample, column k = support point.
    Eigen::MatrixXd coupling;
};

/// Exact worst-case expected loss over distributions Q supported on the rows
/// of `support` with W1(Q, empirical) <= epsilon, solved as a linear program
/// in the coupling variables. Rows of `samples` and `support` are (x, y).
DroResult dro_worstcase(const Eigen::MatrixXd& samples, const Eigen::VectorXd& beta, double epsilon,
                        const Eigen::MatrixXd& support, Loss loss, const GroundMetric& metric);

/// Metric used by the GWGL regression model: weighted (2, inf) norm with
/// group weights 1/sqrt(p_l) and response weight M.
GroundMetric gwgl_regression_metric(const GroupStructure& structure, double response_weight);

/// Metric used by the GWGL classification model: weighted (2, inf) norm on
/// the predictors, infinite cost across labels.
GroundMetric gwgl_classification_metric(const GroupStructure& structure);

}  // namespace gwgl
