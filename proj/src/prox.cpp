#include "gwgl/prox.hpp"

#include <cmath>

#include "gwgl/error.hpp"
#include "gwgl/norms.hpp"

namespace gwgl {

void prox_group_l2_inplace(Eigen::Ref<Eigen::VectorXd> v, const Eigen::VectorXd& thresholds,
                           const GroupStructure& structure) {
    for (std::size_t l = 0; l < structure.groups.size(); ++l) {
        const auto& g = structure.groups[l];
        double sq = 0.0;
        for (Index j : g) sq += v[j] * v[j];
        const double norm = std::sqrt(sq);
        const double thr = thresholds[static_cast<Index>(l)];
        if (norm <= thr || norm == 0.0) {
            for (Index j : g) v[j] = 0.0;
        } else {
            const double scale = 1.0 - thr / norm;
            for (Index j : g) v[j] *= scale;
        }
    }
}

Eigen::VectorXd prox_group_l2(const Eigen::Ref<const Eigen::VectorXd>& v, double lambda,
                              const GroupStructure& structure) {
    if (v.size() != structure.p) throw InvalidArgument("prox_group_l2: dimension mismatch");
    if (structure.overlapping) throw InvalidArgument("prox_group_l2: overlapping structure");
    if (lambda < 0.0) throw InvalidArgument("prox_group_l2: lambda must be non-negative");
    Eigen::VectorXd out = v;
    prox_group_l2_inplace(out, lambda * sqrt_size_weights(structure), structure);
    return out;
}

}  // namespace gwgl
