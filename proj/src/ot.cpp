#include "gwgl/ot.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "gwgl/error.hpp"
#include "gwgl/lp.hpp"

namespace gwgl {

namespace {

std::vector<double> row_key(const Eigen::MatrixXd& m, Index r) {
    std::vector<double> key(static_cast<std::size_t>(m.cols()));
    for (Index c = 0; c < m.cols(); ++c) key[static_cast<std::size_t>(c)] = m(r, c);
    return key;
}

// Equal as measures: same mass on every distinct support point.
bool same_distribution(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.dim() != b.dim()) return false;
    std::map<std::vector<double>, double> diff;
    for (Index r = 0; r < a.size(); ++r) diff[row_key(a.support, r)] += a.probs[r];
    for (Index r = 0; r < b.size(); ++r) diff[row_key(b.support, r)] -= b.probs[r];
    for (const auto& [point, mass] : diff)
        if (std::abs(mass) > 1e-12) return false;
    return true;
}

}  // namespace

void DiscreteDistribution::validate() const {
    if (support.rows() == 0) throw InvalidArgument("distribution has empty support");
    if (probs.size() != support.rows())
        throw InvalidArgument("distribution needs one probability per support point");
    if (!support.allFinite()) throw InvalidArgument("support points must be finite");
    if ((probs.array() < 0.0).any()) throw InvalidArgument("probabilities must be non-negative");
    if (std::abs(probs.sum() - 1.0) > 1e-12)
        throw InvalidArgument("probabilities must sum to 1 (off by " +
                              std::to_string(probs.sum() - 1.0) + ")");
}

DiscreteDistribution DiscreteDistribution::uniform(const Eigen::MatrixXd& points) {
    DiscreteDistribution d;
    d.support = points;
    d.probs = Eigen::VectorXd::Constant(points.rows(), 1.0 / static_cast<double>(points.rows()));
    return d;
}

DiscreteDistribution DiscreteDistribution::merged() const {
    std::map<std::vector<double>, Index> index;
    std::vector<Index> order;
    std::vector<double> mass;
    for (Index r = 0; r < support.rows(); ++r) {
        auto [it, inserted] = index.emplace(row_key(support, r), static_cast<Index>(order.size()));
        if (inserted) {
            order.push_back(r);
            mass.push_back(probs[r]);
        } else {
            mass[static_cast<std::size_t>(it->second)] += probs[r];
        }
    }
    DiscreteDistribution out;
    out.support.resize(static_cast<Index>(order.size()), support.cols());
    out.probs.resize(static_cast<Index>(order.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.support.row(static_cast<Index>(k)) = support.row(order[k]);
        out.probs[static_cast<Index>(k)] = mass[k];
    }
    return out;
}

GroundMetric GroundMetric::lp(double r) {
    if (!(r >= 1.0)) throw InvalidArgument("l_r metric needs r >= 1");
    return GroundMetric("l" + std::to_string(r),
                        [r](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                            return lp_norm(a - b, r);
                        });
}

GroundMetric GroundMetric::group(GroupStructure structure, WeightedGroupNorm norm) {
    norm.validate(structure.num_groups());
    return GroundMetric("group", [s = std::move(structure), n = std::move(norm)](
                                     const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return group_norm_qt(a - b, s, n);
    });
}

GroundMetric GroundMetric::label_separated(GroundMetric base) {
    const std::string name = "label-separated " + base.name();
    return GroundMetric(name, [base = std::move(base)](const Eigen::VectorXd& a,
                                                       const Eigen::VectorXd& b) {
        const Index d = a.size() - 1;
        if (a[d] != b[d]) return kInf;
        return base(a.head(d), b.head(d));
    });
}

GroundMetric gwgl_regression_metric(const GroupStructure& structure, double response_weight) {
    return GroundMetric::group(structure, WeightedGroupNorm::gwgl_metric(structure, response_weight));
}

GroundMetric gwgl_classification_metric(const GroupStructure& structure) {
    return GroundMetric::label_separated(
        GroundMetric::group(structure, WeightedGroupNorm::gwgl_metric(structure)));
}

Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to,
                            const GroundMetric& metric) {
    Eigen::MatrixXd c(from.rows(), to.rows());
    for (Index i = 0; i < from.rows(); ++i) {
        const Eigen::VectorXd a = from.row(i).transpose();
        for (Index j = 0; j < to.rows(); ++j) c(i, j) = metric(a, to.row(j).transpose());
    }
    return c;
}

W1Result w1_discrete(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                     const GroundMetric& metric) {
    P.validate();
    Q.validate();
    if (P.dim() != Q.dim()) throw InvalidArgument("w1: supports have different dimensions");
    const TransportSolution sol = solve_transport(P.probs, Q.probs, cost_matrix(P.support, Q.support, metric));
    return W1Result{sol.cost, TransportPlan{sol.plan}};
}

DiscreteDistribution mixture(const DiscreteDistribution& P, const DiscreteDistribution& P_out,
                             double q) {
    if (P.dim() != P_out.dim()) throw InvalidArgument("mixture: dimension mismatch");
    DiscreteDistribution mix;
    mix.support.resize(P.size() + P_out.size(), P.dim());
    mix.support << P_out.support, P.support;
    mix.probs.resize(P.size() + P_out.size());
    mix.probs << q * P_out.probs, (1.0 - q) * P.probs;
    return mix.merged();
}

double mixture_ratio(const DiscreteDistribution& P, const DiscreteDistribution& P_out, double q,
                     const GroundMetric& metric) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("mixture_ratio: q must lie in (0, 1)");
    P.validate();
    P_out.validate();

    if (same_distribution(P, P_out))
        throw NumericalError("mixture_ratio: P and P_out are the same distribution, ratio is 0/0");

    const DiscreteDistribution mix = mixture(P, P_out, q);
    const double to_out = w1_discrete(P_out, mix, metric).distance;
    const double to_true = w1_discrete(P, mix, metric).distance;
    if (to_true == 0.0)
        throw NumericalError("mixture_ratio: W1(P, P_mix) is zero under this metric");
    return to_out / to_true;
}

double point_loss(const Eigen::VectorXd& z, const Eigen::VectorXd& beta, Loss loss) {
    const Index p = beta.size();
    if (z.size() != p + 1) throw InvalidArgument("point_loss: expected (x, y) of length p + 1");
    Eigen::VectorXd pred(1);
    pred[0] = z.head(p).dot(beta);
    Eigen::VectorXd y(1);
    y[0] = z[p];
    return loss_of_predictions(pred, y, loss);
}

DroResult dro_worstcase(const Eigen::MatrixXd& samples, const Eigen::VectorXd& beta, double epsilon,
                        const Eigen::MatrixXd& support, Loss loss, const GroundMetric& metric) {
    if (!(epsilon >= 0.0)) throw InvalidArgument("dro_worstcase: epsilon must be non-negative");
    const Index n = samples.rows();
    const Index k = support.rows();
    if (n == 0 || k == 0) throw InvalidArgument("dro_worstcase: empty samples or support");
    if (samples.cols() != beta.size() + 1 || support.cols() != beta.size() + 1)
        throw InvalidArgument("dro_worstcase: rows must be (x, y) with x matching beta");

    std::vector<Index> own(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < k && own[static_cast<std::size_t>(i)] < 0; ++j)
            if (support.row(j) == samples.row(i)) own[static_cast<std::size_t>(i)] = j;
        if (own[static_cast<std::size_t>(i)] < 0)
            throw InvalidArgument("dro_worstcase: sample " + std::to_string(i) +
                                  " is missing from the support set");
    }

    const Eigen::MatrixXd cost = cost_matrix(samples, support, metric);
    Eigen::VectorXd point_losses(k);
    for (Index j = 0; j < k; ++j) point_losses[j] = point_loss(support.row(j).transpose(), beta, loss);

    // Columns: coupling entries with finite cost, then the budget slack.
    std::vector<std::pair<Index, Index>> vars;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < k; ++j)
            if (std::isfinite(cost(i, j))) vars.emplace_back(i, j);
    const Index nv = static_cast<Index>(vars.size());

    LinearProgram lp;
    lp.A = Eigen::MatrixXd::Zero(n + 1, nv + 1);
    lp.b = Eigen::VectorXd::Zero(n + 1);
    lp.c = Eigen::VectorXd::Zero(nv + 1);
    std::vector<Index> basis(static_cast<std::size_t>(n + 1), -1);
    const double mass = 1.0 / static_cast<double>(n);
    for (Index v = 0; v < nv; ++v) {
        const auto [i, j] = vars[static_cast<std::size_t>(v)];
        lp.A(i, v) = 1.0;
        lp.A(n, v) = cost(i, j);
        lp.c[v] = point_losses[j];
        if (j == own[static_cast<std::size_t>(i)] && basis[static_cast<std::size_t>(i)] < 0)
            basis[static_cast<std::size_t>(i)] = v;
    }
    lp.A(n, nv) = 1.0;
    lp.b.head(n).setConstant(mass);
    lp.b[n] = epsilon;
    basis[static_cast<std::size_t>(n)] = nv;

    const LpSolution sol = maximize(lp, basis);

    DroResult res;
    res.worst_case = sol.value;
    res.coupling = Eigen::MatrixXd::Zero(n, k);
    for (Index v = 0; v < nv; ++v) {
        const auto [i, j] = vars[static_cast<std::size_t>(v)];
        res.coupling(i, j) = sol.x[v];
    }
    for (Index i = 0; i < n; ++i) res.empirical += mass * point_losses[own[static_cast<std::size_t>(i)]];
    return res;
}

}  // namespace gwgl
