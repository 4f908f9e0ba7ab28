#include "gwgl/groups.hpp"

#include <algorithm>

#include "gwgl/error.hpp"

namespace gwgl {

std::vector<Index> GroupStructure::sizes() const {
    std::vector<Index> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(static_cast<Index>(g.size()));
    return out;
}

Index GroupStructure::max_size() const {
    Index m = 0;
    for (const auto& g : groups) m = std::max(m, static_cast<Index>(g.size()));
    return m;
}

std::vector<std::size_t> GroupStructure::membership() const {
    std::vector<std::size_t> owner(static_cast<std::size_t>(p), 0);
    for (std::size_t l = 0; l < groups.size(); ++l)
        for (Index j : groups[l]) owner[static_cast<std::size_t>(j)] = l;
    return owner;
}

GroupStructure GroupStructure::contiguous(const std::vector<Index>& sizes) {
    GroupStructure s;
    Index next = 0;
    for (Index sz : sizes) {
        std::vector<Index> g;
        for (Index k = 0; k < sz; ++k) g.push_back(next++);
        s.groups.push_back(std::move(g));
    }
    s.p = next;
    return s;
}

GroupStructure GroupStructure::singletons(Index p) {
    return contiguous(std::vector<Index>(static_cast<std::size_t>(p), 1));
}

std::optional<std::string> validate_groups(const GroupStructure& structure, Index p) {
    if (structure.p != p)
        return "structure has p=" + std::to_string(structure.p) + " but data has " +
               std::to_string(p) + " predictors";
    std::vector<int> seen(static_cast<std::size_t>(p), 0);
    for (std::size_t l = 0; l < structure.groups.size(); ++l) {
        const auto& g = structure.groups[l];
        if (g.empty()) return "group " + std::to_string(l) + " is empty";
        for (Index j : g) {
            if (j < 0 || j >= p)
                return "group " + std::to_string(l) + " has out-of-range index " +
                       std::to_string(j);
            auto& count = seen[static_cast<std::size_t>(j)];
            ++count;
            if (count > 1 && !structure.overlapping)
                return "index " + std::to_string(j) + " appears in more than one group";
        }
    }
    for (Index j = 0; j < p; ++j)
        if (seen[static_cast<std::size_t>(j)] == 0)
            return "index " + std::to_string(j) + " uncovered";
    return std::nullopt;
}

void require_valid(const GroupStructure& structure, Index p) {
    if (auto err = validate_groups(structure, p)) throw InvalidArgument("invalid groups: " + *err);
}

Eigen::VectorXd LatentDecomposition::reconstruct(Index p) const {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (const auto& v : latent) beta += v;
    return beta;
}

}  // namespace gwgl
