#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"

namespace gwgl {

enum class Loss { Lad, Logloss, L2 };

std::string to_string(Loss loss);
Loss loss_from_string(const std::string& name);

struct FitConfig {
    /// Penalty magnitude (the Wasserstein ball radius for the GWGL models).
    double epsilon = 0.0;
    int max_iters = 100000;
    /// Relative objective change over a 10-iteration window.
    double tol = 1e-8;
    /// Relative primal-dual gap required by the LAD solver.
    double gap_tol = 1e-7;
    /// Block optimality residual required by the smooth-loss solvers.
    double certificate_tol = 1e-6;
    /// PDHG steps; chosen from the operator norm when unset.
    std::optional<double> primal_step;
    std::optional<double> dual_step;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FitResult {
    Eigen::VectorXd beta;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
    double epsilon = 0.0;
    Loss loss = Loss::Lad;
    /// Latent vectors for overlapping-group fits.
    std::optional<LatentDecomposition> latent;
    /// Final primal-dual gap (LAD) or block optimality residual (smooth losses).
    double certificate = 0.0;
    std::string diagnostic;
};

/// Mean loss without the penalty.
double empirical_loss(const Eigen::Ref<const Eigen::VectorXd>& beta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, Loss loss);

/// Loss of given linear predictions.
double loss_of_predictions(const Eigen::VectorXd& prediction, const Eigen::VectorXd& y, Loss loss);

/// Training objective: mean loss + epsilon * sum_l sqrt(p_l) ||beta^l||_2.
double eval_objective(const Eigen::Ref<const Eigen::VectorXd>& beta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const GroupStructure& structure, double epsilon,
                      Loss loss);

/// Objective of the latent overlapping formulation for a given decomposition.
double eval_latent_objective(const LatentDecomposition& latent, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, double epsilon, Loss loss);

/// Gradient of the mean smooth loss (logloss or l2) at beta.
Eigen::VectorXd loss_gradient(const Eigen::Ref<const Eigen::VectorXd>& beta,
                              const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Loss loss);

/// Largest violation of the block subdifferential conditions
/// ||grad_l|| <= lambda*w_l (zero blocks) and grad_l + lambda*w_l*beta_l/||beta_l|| = 0.
double block_optimality_residual(const Eigen::Ref<const Eigen::VectorXd>& beta,
                                 const Eigen::VectorXd& gradient, const GroupStructure& structure,
                                 const Eigen::VectorXd& weights, double lambda);

/// Largest singular value of X by power iteration.
double operator_norm(const Eigen::MatrixXd& X, std::uint64_t seed = 0, int iters = 50,
                     double tol = 1e-10);

/// min (1/N) sum |y_i - x_i'beta| + eps * sum_l sqrt(p_l)||beta^l||_2 by
/// primal-dual hybrid gradient.
FitResult fit_gwgl_lr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GroupStructure& structure, const FitConfig& config);

/// min (1/N) sum log(1 + exp(-y_i beta'x_i)) + eps * sum_l sqrt(p_l)||beta^l||_2
/// by accelerated proximal gradient with monotone restart.
FitResult fit_gwgl_lg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GroupStructure& structure, const FitConfig& config);

/// min (1/N)||y - X beta||^2 + lambda * sum_l sqrt(p_l)||beta^l||_2.
FitResult fit_glasso_l2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const GroupStructure& structure, double lambda, FitConfig config);

/// Latent overlapping group formulation solved on the duplicated design with
/// per-group weights d. Returns beta = sum_l v^l and the decomposition.
FitResult fit_latent_overlap(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const GroupStructure& structure, const Eigen::VectorXd& d,
                             double epsilon, Loss loss, FitConfig config);

/// Dispatches to the matching solver for a non-overlapping structure.
FitResult fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
              const GroupStructure& structure, double epsilon, Loss loss, FitConfig config);

}  // namespace gwgl
