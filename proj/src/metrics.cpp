#include "gwgl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwgl/error.hpp"

namespace gwgl {

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty set");
    const std::size_t n = values.size();
    std::sort(values.begin(), values.end());
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mad(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    if (y_true.size() != y_pred.size()) throw InvalidArgument("mad: length mismatch");
    if (y_true.size() == 0) throw InvalidArgument("mad: empty input");
    std::vector<double> abs_res(static_cast<std::size_t>(y_true.size()));
    for (Index i = 0; i < y_true.size(); ++i)
        abs_res[static_cast<std::size_t>(i)] = std::abs(y_true[i] - y_pred[i]);
    return median(std::move(abs_res));
}

OracleScores oracle_scores(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
                           const Eigen::MatrixXd& covariance, double sigma2) {
    const Index p = beta_star.size();
    if (beta_hat.size() != p || covariance.rows() != p || covariance.cols() != p)
        throw InvalidArgument("oracle_scores: dimension mismatch");
    if (!(sigma2 > 0.0)) throw InvalidArgument("oracle_scores: noise variance must be positive");
    const double signal = beta_star.dot(covariance * beta_star);
    if (!(signal > 0.0)) throw InvalidArgument("oracle_scores: beta*' Sigma beta* = 0, RR undefined");

    auto score = [&](const Eigen::VectorXd& b, double& rr, double& rte, double& pve) {
        const Eigen::VectorXd diff = b - beta_star;
        const double risk = diff.dot(covariance * diff);
        rr = risk / signal;
        rte = (risk + sigma2) / sigma2;
        pve = 1.0 - (risk + sigma2) / (signal + sigma2);
    };
    OracleScores s;
    score(beta_hat, s.rr, s.rte, s.pve);
    score(beta_star, s.ideal_rr, s.ideal_rte, s.ideal_pve);
    score(Eigen::VectorXd::Zero(p), s.null_rr, s.null_rte, s.null_pve);
    return s;
}

double wgd(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& X, const GroupStructure& structure) {
    if (beta_hat.size() != X.cols() || structure.p != X.cols())
        throw InvalidArgument("wgd: dimension mismatch");
    double total = 0.0;
    int eligible = 0;
    for (const auto& g : structure.groups) {
        if (g.size() < 2) continue;
        ++eligible;
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b) {
                const double corr = X.col(g[a]).dot(X.col(g[b]));
                if (corr == 0.0)
                    throw InvalidArgument("wgd: predictors " + std::to_string(g[a]) + " and " +
                                          std::to_string(g[b]) + " are uncorrelated (division by zero)");
                sum += std::abs((beta_hat[g[a]] - beta_hat[g[b]]) / corr);
                ++pairs;
            }
        total += sum / static_cast<double>(pairs);
    }
    if (eligible == 0) throw InvalidArgument("wgd: no group has two or more predictors");
    return total / eligible;
}

GroupingReport grouping_bound_check(const FitResult& fit, const Eigen::MatrixXd& X,
                                    const GroupStructure& structure, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("grouping_bound_check: epsilon must be positive");
    if (!fit.converged) throw InvalidArgument("grouping_bound_check: fit did not converge");
    require_valid(structure, X.cols());
    if (structure.overlapping) throw InvalidArgument("grouping_bound_check: needs a partition");
    if (fit.beta.size() != X.cols()) throw InvalidArgument("grouping_bound_check: dimension mismatch");

    const auto owner = structure.membership();
    std::vector<double> block_norm(structure.num_groups(), 0.0);
    for (std::size_t l = 0; l < structure.num_groups(); ++l) {
        double sq = 0.0;
        for (Index j : structure.groups[l]) sq += fit.beta[j] * fit.beta[j];
        block_norm[l] = std::sqrt(sq);
    }

    GroupingReport report;
    for (std::size_t l = 0; l < structure.num_groups(); ++l)
        if (block_norm[l] == 0.0)
            report.notes.push_back("group " + std::to_string(l) + " is zero; its pairs are skipped");

    const double root_n = std::sqrt(static_cast<double>(X.rows()));
    auto normalized = [&](Index j) {
        const std::size_t l = owner[static_cast<std::size_t>(j)];
        return std::sqrt(static_cast<double>(structure.groups[l].size())) * fit.beta[j] / block_norm[l];
    };
    for (Index i = 0; i < X.cols(); ++i) {
        if (block_norm[owner[static_cast<std::size_t>(i)]] == 0.0) continue;
        for (Index j = i + 1; j < X.cols(); ++j) {
            if (block_norm[owner[static_cast<std::size_t>(j)]] == 0.0) continue;
            PairBound pb;
            pb.i = i;
            pb.j = j;
            pb.correlation = X.col(i).dot(X.col(j));
            pb.difference = std::abs(normalized(i) - normalized(j));
            pb.bound = std::sqrt(std::max(0.0, 2.0 * (1.0 - pb.correlation))) / (root_n * epsilon);
            pb.pass = pb.difference <= pb.bound * (1.0 + 1e-3) + 1e-6;
            report.all_pass = report.all_pass && pb.pass;
            report.pairs.push_back(pb);
        }
    }
    return report;
}

MpiResult mpi(const std::vector<double>& ours, const std::vector<std::vector<double>>& others,
              Direction direction) {
    if (others.empty()) throw InvalidArgument("mpi: need at least one competing method");
    for (const auto& o : others)
        if (o.size() != ours.size()) throw InvalidArgument("mpi: sweep lengths differ");
    if (ours.empty()) throw InvalidArgument("mpi: empty sweep");

    MpiResult res;
    bool found = false;
    for (std::size_t k = 0; k < ours.size(); ++k) {
        double best = others[0][k];
        for (const auto& o : others)
            best = direction == Direction::Minimize ? std::min(best, o[k]) : std::max(best, o[k]);
        if (best == 0.0) {
            res.warnings.push_back("sweep point " + std::to_string(k) +
                                   " skipped: best competitor scores 0");
            continue;
        }
        const double gain = direction == Direction::Minimize ? (best - ours[k]) / best
                                                             : (ours[k] - best) / best;
        const double value = 100.0 * gain;
        if (!found || value > res.value) {
            res.value = value;
            res.point = static_cast<Index>(k);
            found = true;
        }
    }
    if (!found) throw NumericalError("mpi: every sweep point was skipped");
    return res;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t k = 0; k < idx.size();) {
        std::size_t end = k;
        while (end + 1 < idx.size() && v[idx[end + 1]] == v[idx[k]]) ++end;
        const double r = 0.5 * static_cast<double>(k + end) + 1.0;
        for (std::size_t m = k; m <= end; ++m) rank[idx[m]] = r;
        k = end + 1;
    }
    return rank;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("spearman: need two equal-length samples");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) {
        num += (ra[k] - ma) * (rb[k] - mb);
        da += (ra[k] - ma) * (ra[k] - ma);
        db += (rb[k] - mb) * (rb[k] - mb);
    }
    if (da == 0.0 || db == 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

}  // namespace gwgl
