#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gwgl {

using Index = Eigen::Index;

/// Ordered list of predictor index groups over {0, ..., p-1}. A partition
/// when `overlapping` is false, a cover otherwise.
struct GroupStructure {
    Index p = 0;
    std::vector<std::vector<Index>> groups;
    bool overlapping = false;

    std::size_t num_groups() const { return groups.size(); }
    Index size(std::size_t l) const { return static_cast<Index>(groups[l].size()); }
    std::vector<Index> sizes() const;
    Index max_size() const;

    /// Owning group of every predictor. Only meaningful for partitions.
    std::vector<std::size_t> membership() const;

    /// Groups of consecutive indices with the given sizes.
    static GroupStructure contiguous(const std::vector<Index>& sizes);
    static GroupStructure singletons(Index p);
};

/// Checks every structural invariant against dimension p. Returns the first
/// violation, or nullopt when the structure is valid.
std::optional<std::string> validate_groups(const GroupStructure& structure, Index p);

/// Throws InvalidArgument carrying the violation message.
void require_valid(const GroupStructure& structure, Index p);

/// Latent decomposition beta = sum_l v^l with supp(v^l) inside group l.
struct LatentDecomposition {
    std::vector<Eigen::VectorXd> latent;
    Eigen::VectorXd weights;

    Eigen::VectorXd reconstruct(Index p) const;
};

}  // namespace gwgl
