#include "gwgl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gwgl/error.hpp"
#include "gwgl/prox.hpp"

namespace gwgl {

namespace {

void check_exponent(double r, const char* name) {
    if (!(r >= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [1, inf]");
}

// Aggregates block values with an l_t norm.
class BlockAccumulator {
public:
    explicit BlockAccumulator(double t) : t_(t) {}

    void add(double value) {
        if (std::isinf(t_)) {
            acc_ = std::max(acc_, value);
        } else if (t_ == 1.0) {
            acc_ += value;
        } else {
            acc_ += std::pow(value, t_);
        }
    }

    double result() const {
        if (std::isinf(t_) || t_ == 1.0) return acc_;
        return std::pow(acc_, 1.0 / t_);
    }

private:
    double t_;
    double acc_ = 0.0;
};

double block_norm(const Eigen::Ref<const Eigen::VectorXd>& z, const std::vector<Index>& g,
                  double r) {
    Eigen::VectorXd block(static_cast<Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) block[static_cast<Index>(k)] = z[g[k]];
    return lp_norm(block, r);
}

void check_dims(Index n, const GroupStructure& s, const WeightedGroupNorm& norm,
                const char* who) {
    const Index expected = s.p + (norm.response_weight ? 1 : 0);
    if (n != expected)
        throw InvalidArgument(std::string(who) + ": dimension mismatch (expected " +
                              std::to_string(expected) + ", got " + std::to_string(n) + ")");
    norm.validate(s.num_groups());
}

}  // namespace

void WeightedGroupNorm::validate(std::size_t num_groups) const {
    check_exponent(q, "q");
    check_exponent(t, "t");
    if (static_cast<std::size_t>(weights.size()) != num_groups)
        throw InvalidArgument("norm weights must have one entry per group");
    if ((weights.array() <= 0.0).any()) throw InvalidArgument("norm weights must be positive");
    if (response_weight && !(*response_weight > 0.0))
        throw InvalidArgument("response weight M must be positive");
}

WeightedGroupNorm WeightedGroupNorm::gwgl_metric(const GroupStructure& s,
                                                 std::optional<double> response_weight) {
    WeightedGroupNorm n;
    n.q = 2.0;
    n.t = kInf;
    n.weights = sqrt_size_weights(s).cwiseInverse();
    n.response_weight = response_weight;
    return n;
}

double lp_norm(const Eigen::Ref<const Eigen::VectorXd>& z, double r) {
    if (z.size() == 0) return 0.0;
    if (std::isinf(r)) return z.cwiseAbs().maxCoeff();
    if (r == 1.0) return z.cwiseAbs().sum();
    if (r == 2.0) return z.norm();
    // Scale by the max entry so large exponents do not overflow.
    const double m = z.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    return m * std::pow((z.cwiseAbs() / m).array().pow(r).sum(), 1.0 / r);
}

double conjugate_exponent(double r) {
    if (std::isinf(r)) return 1.0;
    if (r == 1.0) return kInf;
    return r / (r - 1.0);
}

double group_norm_qt(const Eigen::Ref<const Eigen::VectorXd>& z, const GroupStructure& structure,
                     const WeightedGroupNorm& norm) {
    check_dims(z.size(), structure, norm, "group_norm_qt");
    BlockAccumulator acc(norm.t);
    for (std::size_t l = 0; l < structure.groups.size(); ++l)
        acc.add(norm.weights[static_cast<Index>(l)] * block_norm(z, structure.groups[l], norm.q));
    if (norm.response_weight) acc.add(*norm.response_weight * std::abs(z[structure.p]));
    return acc.result();
}

double dual_norm_group(const Eigen::Ref<const Eigen::VectorXd>& v,
                       const GroupStructure& structure, const WeightedGroupNorm& norm) {
    check_dims(v.size(), structure, norm, "dual_norm_group");
    const double q_star = conjugate_exponent(norm.q);
    BlockAccumulator acc(conjugate_exponent(norm.t));
    for (std::size_t l = 0; l < structure.groups.size(); ++l)
        acc.add(block_norm(v, structure.groups[l], q_star) / norm.weights[static_cast<Index>(l)]);
    if (norm.response_weight) acc.add(std::abs(v[structure.p]) / *norm.response_weight);
    return acc.result();
}

Eigen::VectorXd sqrt_size_weights(const GroupStructure& structure) {
    Eigen::VectorXd w(static_cast<Index>(structure.num_groups()));
    for (std::size_t l = 0; l < structure.num_groups(); ++l)
        w[static_cast<Index>(l)] = std::sqrt(static_cast<double>(structure.groups[l].size()));
    return w;
}

double weighted_group_l2(const Eigen::Ref<const Eigen::VectorXd>& beta,
                         const GroupStructure& structure, const Eigen::VectorXd& d) {
    double total = 0.0;
    for (std::size_t l = 0; l < structure.groups.size(); ++l) {
        double sq = 0.0;
        for (Index j : structure.groups[l]) sq += beta[j] * beta[j];
        total += d[static_cast<Index>(l)] * std::sqrt(sq);
    }
    return total;
}

double glasso_penalty(const Eigen::Ref<const Eigen::VectorXd>& beta,
                      const GroupStructure& structure) {
    if (structure.overlapping)
        throw InvalidArgument("glasso_penalty: overlapping structure, use omega_overlap");
    if (beta.size() != structure.p) throw InvalidArgument("glasso_penalty: dimension mismatch");
    return weighted_group_l2(beta, structure, sqrt_size_weights(structure));
}

DuplicatedLayout::DuplicatedLayout(const GroupStructure& structure) {
    multiplicity = Eigen::VectorXd::Zero(structure.p);
    Index next = 0;
    for (const auto& g : structure.groups) {
        std::vector<Index> block;
        for (Index j : g) {
            source.push_back(j);
            multiplicity[j] += 1.0;
            block.push_back(next++);
        }
        blocks.groups.push_back(std::move(block));
    }
    blocks.p = next;
}

Eigen::VectorXd DuplicatedLayout::collapse(const Eigen::VectorXd& dup, Index p) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
    for (Index k = 0; k < dim(); ++k) out[source[static_cast<std::size_t>(k)]] += dup[k];
    return out;
}

LatentDecomposition DuplicatedLayout::split(const Eigen::VectorXd& dup, Index p,
                                            const Eigen::VectorXd& d) const {
    LatentDecomposition dec;
    dec.weights = d;
    for (const auto& block : blocks.groups) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
        for (Index k : block) v[source[static_cast<std::size_t>(k)]] = dup[k];
        dec.latent.push_back(std::move(v));
    }
    return dec;
}

Eigen::MatrixXd DuplicatedLayout::expand_design(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd out(X.rows(), dim());
    for (Index k = 0; k < dim(); ++k) out.col(k) = X.col(source[static_cast<std::size_t>(k)]);
    return out;
}

OmegaResult omega_overlap(const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const GroupStructure& structure, const Eigen::VectorXd& d, double tol) {
    const Index p = beta.size();
    if (structure.p != p) throw InvalidArgument("omega_overlap: dimension mismatch");
    if (static_cast<std::size_t>(d.size()) != structure.num_groups())
        throw InvalidArgument("omega_overlap: need one weight per group");
    if ((d.array() <= 0.0).any()) throw InvalidArgument("omega_overlap: weights must be positive");
    for (std::size_t l = 0; l < structure.num_groups(); ++l) {
        if (structure.groups[l].empty())
            throw InvalidArgument("omega_overlap: group " + std::to_string(l) + " is empty");
        for (Index j : structure.groups[l])
            if (j < 0 || j >= p) throw InvalidArgument("omega_overlap: index out of range");
    }

    const DuplicatedLayout layout(structure);
    for (Index j = 0; j < p; ++j)
        if (layout.multiplicity[j] == 0.0 && beta[j] != 0.0)
            throw InvalidArgument("omega_overlap: infeasible, nonzero index " + std::to_string(j) +
                                  " is covered by no group");

    OmegaResult result;
    const Index n = layout.dim();
    auto project = [&](const Eigen::VectorXd& z) {
        // Euclidean projection onto {z : collapse(z) = beta}.
        Eigen::VectorXd excess = layout.collapse(z, p) - beta;
        Eigen::VectorXd out = z;
        for (Index k = 0; k < n; ++k) {
            const Index j = layout.source[static_cast<std::size_t>(k)];
            out[k] -= excess[j] / layout.multiplicity[j];
        }
        return out;
    };

    Eigen::VectorXd u(n);
    for (Index k = 0; k < n; ++k) {
        const Index j = layout.source[static_cast<std::size_t>(k)];
        u[k] = beta[j] / layout.multiplicity[j];
    }

    bool unique = true;
    for (Index j = 0; j < p; ++j) unique = unique && layout.multiplicity[j] <= 1.0;
    if (unique || beta.isZero(0.0)) {
        result.value = weighted_group_l2(u, layout.blocks, d);
        result.decomposition = layout.split(u, p, d);
        return result;
    }

    // Scaled-form ADMM splitting the block-norm prox from the affine projection.
    // The averaged scaled multiplier yields a dual-feasible certificate.
    const double rho = std::max(1.0, d.maxCoeff()) / std::max(1e-12, beta.cwiseAbs().maxCoeff());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v = u;
    const Eigen::VectorXd thresholds = d / rho;
    double primal = weighted_group_l2(u, layout.blocks, d);
    double gap = kInf;
    constexpr int kMaxIters = 500000;
    for (int it = 0; it < kMaxIters; ++it) {
        v = u - w;
        prox_group_l2_inplace(v, thresholds, layout.blocks);
        u = project(v + w);
        w += v - u;
        if (it % 10 != 0) continue;

        primal = weighted_group_l2(u, layout.blocks, d);
        // Dual variable alpha in R^p: beta'alpha <= Omega(beta) whenever
        // ||alpha_{G_l}||_2 <= d_l for every l.
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(p);
        for (Index k = 0; k < n; ++k) {
            const Index j = layout.source[static_cast<std::size_t>(k)];
            alpha[j] -= rho * w[k] / layout.multiplicity[j];
        }
        double scale = 1.0;
        for (std::size_t l = 0; l < structure.num_groups(); ++l) {
            double sq = 0.0;
            for (Index j : structure.groups[l]) sq += alpha[j] * alpha[j];
            const double norm = std::sqrt(sq);
            if (norm > d[static_cast<Index>(l)]) scale = std::min(scale, d[static_cast<Index>(l)] / norm);
        }
        const double dual = scale * alpha.dot(beta);
        gap = primal - dual;
        if (gap <= tol * std::max(1.0, primal)) break;
    }
    result.value = primal;
    result.duality_gap = gap;
    result.decomposition = layout.split(u, p, d);
    return result;
}

}  // namespace gwgl
