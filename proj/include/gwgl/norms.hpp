#pragma once

#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"

namespace gwgl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Weighted (q,t) group norm: the l_t norm of the per-group values
/// w_l * ||z^l||_q. q and t take values in [1, inf]; kInf selects the max
/// branch exactly. When `response_weight` is set, the vector carries one
/// extra trailing entry (the response) that contributes M|y| as its own block.
struct WeightedGroupNorm {
    double q = 2.0;
    double t = kInf;
    Eigen::VectorXd weights;
    std::optional<double> response_weight;

    void validate(std::size_t num_groups) const;

    /// The (2, inf) norm with w_l = 1/sqrt(p_l) used to build the GWGL metric.
    static WeightedGroupNorm gwgl_metric(const GroupStructure& s,
                                         std::optional<double> response_weight = std::nullopt);
};

/// ||z||_r for r in [1, inf].
double lp_norm(const Eigen::Ref<const Eigen::VectorXd>& z, double r);

/// Conjugate exponent r* with 1/r + 1/r* = 1.
double conjugate_exponent(double r);

double group_norm_qt(const Eigen::Ref<const Eigen::VectorXd>& z, const GroupStructure& structure,
                     const WeightedGroupNorm& norm);

/// Dual of the weighted (q,t) norm: the (q*, t*) norm with inverted weights
/// (and |v_resp|/M for the response block).
double dual_norm_group(const Eigen::Ref<const Eigen::VectorXd>& v,
                       const GroupStructure& structure, const WeightedGroupNorm& norm);

/// sum_l sqrt(p_l) ||beta^l||_2 for a partition.
double glasso_penalty(const Eigen::Ref<const Eigen::VectorXd>& beta,
                      const GroupStructure& structure);

/// sum_l d_l ||beta^l||_2 for a partition with arbitrary positive weights.
double weighted_group_l2(const Eigen::Ref<const Eigen::VectorXd>& beta,
                         const GroupStructure& structure, const Eigen::VectorXd& d);

/// sqrt(p_l) per group.
Eigen::VectorXd sqrt_size_weights(const GroupStructure& structure);

/// Column layout of the covariate-duplicated space: each original index is
/// copied once per group containing it, and the copies of group l occupy a
/// contiguous block.
struct DuplicatedLayout {
    std::vector<Index> source;  // duplicated coordinate -> original index
    GroupStructure blocks;      // contiguous, non-overlapping
    Eigen::VectorXd multiplicity;  // number of copies of each original index

    explicit DuplicatedLayout(const GroupStructure& structure);

    Index dim() const { return static_cast<Index>(source.size()); }
    /// Sums copies back onto the original coordinates.
    Eigen::VectorXd collapse(const Eigen::VectorXd& dup, Index p) const;
    /// Splits a duplicated vector into per-group latent vectors in R^p.
    LatentDecomposition split(const Eigen::VectorXd& dup, Index p, const Eigen::VectorXd& d) const;
    /// X~ whose columns are the duplicated columns of X.
    Eigen::MatrixXd expand_design(const Eigen::MatrixXd& X) const;
};

struct OmegaResult {
    double value = 0.0;
    LatentDecomposition decomposition;
    double duality_gap = 0.0;
};

/// Latent overlapping group norm Omega(beta) = min sum_l d_l ||v^l||_2 over
/// decompositions beta = sum_l v^l with supp(v^l) inside group l.
OmegaResult omega_overlap(const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const GroupStructure& structure, const Eigen::VectorXd& d,
                          double tol = 1e-8);

}  // namespace gwgl
