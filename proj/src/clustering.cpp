#include "gwgl/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "gwgl/error.hpp"

namespace gwgl {

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
    const Index n = points.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
    return d;
}

// Other points ordered by (distance, index).
std::vector<std::vector<Index>> neighbour_order(const Eigen::MatrixXd& dist) {
    const Index n = dist.rows();
    std::vector<std::vector<Index>> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        auto& o = order[static_cast<std::size_t>(i)];
        for (Index j = 0; j < n; ++j)
            if (j != i) o.push_back(j);
        std::stable_sort(o.begin(), o.end(), [&](Index a, Index b) { return dist(i, a) < dist(i, b); });
    }
    return order;
}

std::vector<std::vector<char>> knn_adjacency(const std::vector<std::vector<Index>>& order, int k) {
    const std::size_t n = order.size();
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (int r = 0; r < k && r < static_cast<int>(order[i].size()); ++r) {
            const auto j = static_cast<std::size_t>(order[i][static_cast<std::size_t>(r)]);
            adj[i][j] = adj[j][i] = 1;
        }
    return adj;
}

bool connected(const std::vector<std::vector<char>>& adj) {
    const std::size_t n = adj.size();
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < n; ++j)
            if (adj[i][j] && !seen[j]) {
                seen[j] = 1;
                ++count;
                stack.push_back(j);
            }
    }
    return count == n;
}

void check_points(const Eigen::MatrixXd& points) {
    if (points.rows() < 2) throw InvalidArgument("clustering needs at least two points");
    if (!points.allFinite()) throw InvalidArgument("clustering points must be finite");
}

double squared_distance(const Eigen::MatrixXd& a, Index i, const Eigen::MatrixXd& b, Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

KMeansResult lloyd(const Eigen::MatrixXd& points, int clusters, int iters, std::mt19937_64& rng) {
    const Index n = points.rows();
    Eigen::MatrixXd centers(clusters, points.cols());

    // k-means++ seeding.
    std::uniform_int_distribution<Index> first(0, n - 1);
    centers.row(0) = points.row(first(rng));
    Eigen::VectorXd d2(n);
    for (Index i = 0; i < n; ++i) d2[i] = squared_distance(points, i, centers, 0);
    for (int c = 1; c < clusters; ++c) {
        const double total = d2.sum();
        Index pick = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> unif(0.0, total);
            double target = unif(rng);
            for (pick = 0; pick < n - 1; ++pick) {
                target -= d2[pick];
                if (target < 0.0) break;
            }
        } else {
            pick = first(rng);
        }
        centers.row(c) = points.row(pick);
        for (Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points, i, centers, c));
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < iters; ++it) {
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(points, i, centers, 0);
            for (int c = 1; c < clusters; ++c) {
                const double d = squared_distance(points, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[static_cast<std::size_t>(i)] != best) {
                labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(clusters, points.cols());
        std::vector<int> counts(static_cast<std::size_t>(clusters), 0);
        for (Index i = 0; i < n; ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < clusters; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            // Empty cluster: move it to the point farthest from its center.
            Index far = 0;
            double far_d = -1.0;
            for (Index i = 0; i < n; ++i) {
                const double d = squared_distance(points, i, centers, labels[static_cast<std::size_t>(i)]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centers.row(c) = points.row(far);
            labels[static_cast<std::size_t>(far)] = c;
            changed = true;
        }
        if (!changed) break;
    }

    KMeansResult res;
    res.labels = std::move(labels);
    for (Index i = 0; i < n; ++i)
        res.inertia += squared_distance(points, i, centers, res.labels[static_cast<std::size_t>(i)]);
    return res;
}

GroupStructure groups_from_labels(const std::vector<int>& labels, int clusters) {
    std::vector<std::vector<Index>> by_label(static_cast<std::size_t>(clusters));
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_label[static_cast<std::size_t>(labels[i])].push_back(static_cast<Index>(i));
    GroupStructure s;
    s.p = static_cast<Index>(labels.size());
    for (auto& g : by_label)
        if (!g.empty()) s.groups.push_back(std::move(g));
    // Canonical order: by smallest member.
    std::sort(s.groups.begin(), s.groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return s;
}

}  // namespace

int select_knn_k(const Eigen::MatrixXd& points) {
    check_points(points);
    const auto order = neighbour_order(pairwise_distances(points));
    const int n = static_cast<int>(points.rows());
    for (int k = 1; k < n; ++k)
        if (connected(knn_adjacency(order, k))) return k;
    return n - 1;
}

double select_sigma(const Eigen::MatrixXd& points, int k) {
    check_points(points);
    if (k < 1 || k >= points.rows()) throw InvalidArgument("select_sigma: need 1 <= k < p");
    const Eigen::MatrixXd dist = pairwise_distances(points);
    const auto order = neighbour_order(dist);
    double total = 0.0;
    for (Index i = 0; i < points.rows(); ++i)
        total += dist(i, order[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)]);
    return total / static_cast<double>(points.rows());
}

SimilarityGraph build_similarity_graph(const Eigen::MatrixXd& points, const ClusteringConfig& config) {
    check_points(points);
    const Index n = points.rows();
    SimilarityGraph g;
    g.k = config.k_neighbors.value_or(0);
    if (config.k_neighbors) {
        if (g.k < 1 || g.k >= n) throw InvalidArgument("k_neighbors must satisfy 1 <= k < p");
    } else {
        g.k = select_knn_k(points);
    }
    g.sigma = config.sigma ? *config.sigma : select_sigma(points, g.k);
    if (!(g.sigma > 0.0))
        throw InvalidArgument("similarity scale sigma is zero (all points identical?)");

    const Eigen::MatrixXd dist = pairwise_distances(points);
    const auto adj = knn_adjacency(neighbour_order(dist), g.k);
    g.weights = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j && adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                g.weights(i, j) = std::exp(-dist(i, j) * dist(i, j) / (2.0 * g.sigma * g.sigma));
    return g;
}

int eigengap_select(const std::vector<double>& ascending) {
    if (ascending.size() < 2) throw InvalidArgument("eigengap_select needs at least two eigenvalues");
    int best = 1;
    double best_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < ascending.size(); ++i) {
        const double gap = ascending[i + 1] - ascending[i];
        if (gap > best_gap) {
            best_gap = gap;
            best = static_cast<int>(i) + 1;
        }
    }
    return best;
}

Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& weights) {
    const Index n = weights.rows();
    const Eigen::VectorXd degree = weights.rowwise().sum();
    Eigen::VectorXd inv_sqrt(n);
    for (Index i = 0; i < n; ++i) inv_sqrt[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
    Eigen::MatrixXd L = -(inv_sqrt.asDiagonal() * weights * inv_sqrt.asDiagonal());
    L.diagonal().array() += 1.0;
    return L;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int clusters, int restarts, int iters,
                    std::uint64_t seed) {
    if (clusters < 1 || clusters > points.rows())
        throw InvalidArgument("k-means: cluster count must lie in [1, number of points]");
    if (restarts < 1) throw InvalidArgument("k-means: need at least one restart");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        KMeansResult run = lloyd(points, clusters, iters, rng);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

ClusteringResult cluster_predictors(const Eigen::MatrixXd& X, const ClusteringConfig& config) {
    const Index p = X.cols();
    if (p < 2) throw InvalidArgument("cluster_predictors needs at least two predictors");
    if (config.n_clusters && (*config.n_clusters < 1 || *config.n_clusters > p))
        throw InvalidArgument("number of clusters must lie in [1, p]");

    const Eigen::MatrixXd points = X.transpose();
    const SimilarityGraph graph = build_similarity_graph(points, config);
    const Eigen::MatrixXd L = normalized_laplacian(graph.weights);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
    if (eig.info() != Eigen::Success) throw NumericalError("Laplacian eigendecomposition failed");

    ClusteringResult res;
    res.eigenvalues = eig.eigenvalues();
    res.k = graph.k;
    res.sigma = graph.sigma;
    std::vector<double> ev(res.eigenvalues.data(), res.eigenvalues.data() + p);
    res.clusters = config.n_clusters ? *config.n_clusters : eigengap_select(ev);

    const int c = res.clusters;
    if (c == 1) {
        res.groups = GroupStructure::contiguous({p});
        return res;
    }
    if (c == p) {
        res.groups = GroupStructure::singletons(p);
        return res;
    }

    Eigen::MatrixXd embedding = eig.eigenvectors().leftCols(c);
    for (Index i = 0; i < p; ++i) {
        const double nrm = embedding.row(i).norm();
        if (nrm > 0.0) embedding.row(i) /= nrm;
    }
    const KMeansResult km = kmeans(embedding, c, config.kmeans_restarts, config.kmeans_iters, config.seed);
    res.inertia = km.inertia;
    res.groups = groups_from_labels(km.labels, c);
    return res;
}

}  // namespace gwgl
