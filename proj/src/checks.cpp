#include "gwgl/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gwgl/error.hpp"
#include "gwgl/norms.hpp"
#include "gwgl/ot.hpp"

namespace gwgl {

namespace {

Eigen::MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

int uniform_int(int lo, int hi, std::mt19937_64& rng) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform(double lo, double hi, std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

DiscreteDistribution random_distribution(Index k, Index dim, std::mt19937_64& rng) {
    DiscreteDistribution d;
    d.support = gaussian(k, dim, rng);
    d.probs.resize(k);
    for (Index i = 0; i < k; ++i) d.probs[i] = uniform(0.1, 1.0, rng);
    d.probs /= d.probs.sum();
    d.probs[k - 1] = 1.0 - d.probs.head(k - 1).sum();
    return d;
}

GroupStructure random_partition(Index p, std::mt19937_64& rng) {
    std::vector<Index> sizes;
    Index left = p;
    while (left > 0) {
        const Index s = uniform_int(1, static_cast<int>(left), rng);
        sizes.push_back(s);
        left -= s;
    }
    return GroupStructure::contiguous(sizes);
}

// Unit-r-norm u maximizing v'u.
Eigen::VectorXd holder_direction(const Eigen::VectorXd& v, double r) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(v.size());
    if (v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0) return u;
    if (r == 1.0) {
        Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        u[k] = v[k] > 0 ? 1.0 : -1.0;
        return u;
    }
    if (std::isinf(r)) return v.cwiseSign();
    const double rs = conjugate_exponent(r);
    for (Index i = 0; i < v.size(); ++i)
        u[i] = (v[i] > 0 ? 1.0 : -1.0) * std::pow(std::abs(v[i]), rs - 1.0);
    return u / lp_norm(u, r);
}

double pick_exponent(std::mt19937_64& rng) {
    static const double choices[] = {1.0, 1.5, 2.0, 3.0, kInf};
    return choices[uniform_int(0, 4, rng)];
}

}  // namespace

MixtureCheck check_mixture(double q, int trials, int max_support, int dim, std::uint64_t seed,
                           double tolerance) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("--q must lie strictly between 0 and 1");
    if (trials < 1 || max_support < 1 || dim < 1)
        throw InvalidArgument("trials, support size and dimension must be positive");
    std::mt19937_64 rng(seed);
    const auto metric = GroundMetric::lp(2.0);
    MixtureCheck out;
    out.q = q;
    out.expected = (1.0 - q) / q;
    out.tolerance = tolerance;
    for (int k = 0; k < trials; ++k) {
        const auto P = random_distribution(uniform_int(1, max_support, rng), dim, rng);
        const auto P_out = random_distribution(uniform_int(1, max_support, rng), dim, rng);
        const double r = mixture_ratio(P, P_out, q, metric);
        out.ratios.push_back(r);
        out.max_abs_error = std::max(out.max_abs_error, std::abs(r - out.expected));
    }
    out.pass = out.max_abs_error <= tolerance;
    return out;
}

DroCheck check_dro_bound(int trials, Loss loss, std::uint64_t seed, double tolerance) {
    if (trials < 1) throw InvalidArgument("trials must be positive");
    if (loss == Loss::L2) throw InvalidArgument("the DRO bound is checked for lad and logloss only");
    std::mt19937_64 rng(seed);
    DroCheck out;
    out.loss = loss;
    out.tolerance = tolerance;
    out.max_excess = -kInf;
    for (int k = 0; k < trials; ++k) {
        const Index p = uniform_int(1, 3, rng);
        const Index n = uniform_int(1, 3, rng);
        const Index extra = uniform_int(0, 6 - static_cast<int>(n), rng);
        const GroupStructure s = random_partition(p, rng);
        Eigen::MatrixXd samples(n, p + 1), others(extra, p + 1);
        samples.leftCols(p) = gaussian(n, p, rng);
        others.leftCols(p) = gaussian(extra, p, rng);
        if (loss == Loss::Lad) {
            samples.col(p) = gaussian(n, 1, rng);
            others.col(p) = gaussian(extra, 1, rng);
        } else {
            for (Index i = 0; i < n; ++i) samples(i, p) = uniform_int(0, 1, rng) ? 1.0 : -1.0;
            for (Index i = 0; i < extra; ++i) others(i, p) = uniform_int(0, 1, rng) ? 1.0 : -1.0;
        }
        Eigen::MatrixXd support(n + extra, p + 1);
        support << samples, others;
        const Eigen::VectorXd beta = gaussian(p, 1, rng);
        const double eps = uniform(0.0, 1.0, rng);

        double bound = 0.0;
        DroResult res;
        if (loss == Loss::Lad) {
            const auto metric = gwgl_regression_metric(s, 1.0);
            res = dro_worstcase(samples, beta, eps, support, loss, metric);
            Eigen::VectorXd v(p + 1);
            v << -beta, 1.0;
            const auto norm = WeightedGroupNorm::gwgl_metric(s, 1.0);
            bound = res.empirical + eps * dual_norm_group(v, s, norm);
        } else {
            const auto metric = gwgl_classification_metric(s);
            res = dro_worstcase(samples, beta, eps, support, loss, metric);
            bound = res.empirical + eps * glasso_penalty(beta, s);
        }
        out.max_excess = std::max(out.max_excess, res.worst_case - bound);
        ++out.instances;
    }
    out.pass = out.max_excess <= tolerance;
    return out;
}

DualNormCheck check_dual_norm(int trials, int max_dim, std::uint64_t seed, double tolerance) {
    if (trials < 1 || max_dim < 1) throw InvalidArgument("trials and dimension must be positive");
    std::mt19937_64 rng(seed);
    DualNormCheck out;
    out.trials = trials;
    out.tolerance = tolerance;
    out.max_sampled_excess = -kInf;
    for (int k = 0; k < trials; ++k) {
        const Index p = uniform_int(1, max_dim, rng);
        const GroupStructure s = random_partition(p, rng);
        WeightedGroupNorm norm;
        norm.q = pick_exponent(rng);
        norm.t = pick_exponent(rng);
        norm.weights.resize(static_cast<Index>(s.num_groups()));
        for (Index l = 0; l < norm.weights.size(); ++l) norm.weights[l] = uniform(0.2, 3.0, rng);
        const bool with_response = uniform_int(0, 1, rng) == 1;
        if (with_response) norm.response_weight = uniform(0.2, 3.0, rng);
        const Index dim = p + (with_response ? 1 : 0);
        const Eigen::VectorXd v = gaussian(dim, 1, rng);
        const double dual = dual_norm_group(v, s, norm);

        // The response entry acts as one more block of weight M.
        std::vector<std::vector<Index>> blocks = s.groups;
        Eigen::VectorXd w = norm.weights;
        if (with_response) {
            blocks.push_back({p});
            w.conservativeResize(w.size() + 1);
            w[w.size() - 1] = *norm.response_weight;
        }
        const std::size_t L = blocks.size();
        std::vector<Eigen::VectorXd> dir(L);
        Eigen::VectorXd gain(static_cast<Index>(L));
        for (std::size_t l = 0; l < L; ++l) {
            Eigen::VectorXd vl(static_cast<Index>(blocks[l].size()));
            for (std::size_t j = 0; j < blocks[l].size(); ++j) vl[static_cast<Index>(j)] = v[blocks[l][j]];
            dir[l] = holder_direction(vl, norm.q);
            gain[static_cast<Index>(l)] = vl.dot(dir[l]) / w[static_cast<Index>(l)];
        }
        const Eigen::VectorXd a = holder_direction(gain, norm.t);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t j = 0; j < blocks[l].size(); ++j)
                x[blocks[l][j]] = a[static_cast<Index>(l)] / w[static_cast<Index>(l)] * dir[l][static_cast<Index>(j)];
        const double nx = group_norm_qt(x, s, norm);
        const double attained = nx > 0.0 ? v.dot(x) / nx : 0.0;
        out.max_abs_error = std::max(out.max_abs_error, std::abs(attained - dual));

        for (int m = 0; m < 20; ++m) {
            const Eigen::VectorXd z = gaussian(dim, 1, rng);
            const double nz = group_norm_qt(z, s, norm);
            if (nz > 0.0) out.max_sampled_excess = std::max(out.max_sampled_excess, v.dot(z) / nz - dual);
        }
    }
    out.pass = out.max_abs_error <= tolerance && out.max_sampled_excess <= tolerance;
    return out;
}

}  // namespace gwgl
