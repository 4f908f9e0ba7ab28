#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"

namespace gwgl {

/// Symmetric union-kNN graph with Gaussian similarity weights.
struct SimilarityGraph {
    Eigen::MatrixXd weights;  // p x p, zero diagonal
    int k = 0;
    double sigma = 0.0;
};

struct ClusteringConfig {
    std::optional<int> k_neighbors;  // smallest connected k when unset
    std::optional<int> n_clusters;   // eigengap heuristic when unset
    std::optional<double> sigma;     // mean k-th neighbour distance when unset
    int kmeans_restarts = 10;
    int kmeans_iters = 300;
    std::uint64_t seed = 0;
};

struct ClusteringResult {
    GroupStructure groups;
    Eigen::VectorXd eigenvalues;  // ascending, of the normalized Laplacian
    int k = 0;
    double sigma = 0.0;
    int clusters = 0;
    double inertia = 0.0;
};

/// Smallest k >= 1 whose union-kNN graph over the rows of `points` is connected.
int select_knn_k(const Eigen::MatrixXd& points);

/// Mean distance from each row to its k-th nearest other row.
double select_sigma(const Eigen::MatrixXd& points, int k);

/// Union-kNN graph over the rows of `points`.
SimilarityGraph build_similarity_graph(const Eigen::MatrixXd& points, const ClusteringConfig& config);

/// Index c (1-based count) of the largest gap lambda_{c+1} - lambda_c; ties
/// go to the smaller c.
int eigengap_select(const std::vector<double>& ascending);

/// I - D^{-1/2} W D^{-1/2}.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& weights);

/// Seeded k-means++ with restarts; returns labels for the rows of `points`.
struct KMeansResult {
    std::vector<int> labels;
    double inertia = 0.0;
};
KMeansResult kmeans(const Eigen::MatrixXd& points, int clusters, int restarts, int iters,
                    std::uint64_t seed);

/// Groups the columns of a standardized design by normalized spectral
/// clustering of the Gaussian similarity graph.
ClusteringResult cluster_predictors(const Eigen::MatrixXd& X, const ClusteringConfig& config);

}  // namespace gwgl
