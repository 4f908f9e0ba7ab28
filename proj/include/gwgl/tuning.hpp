#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwgl/data.hpp"
#include "gwgl/groups.hpp"
#include "gwgl/solvers.hpp"

namespace gwgl {

enum class GridKind { Gwgl, GlassoL2 };

GridKind grid_kind_for(Loss loss);

/// Log-spaced penalty grid anchored at lambda_m = ||X'y||_inf:
///   GWGL:      sqrt(exp(lin(log(0.005 lambda_m), log(lambda_m), n)) / max_l p_l)
///   l2 GLASSO: exp(lin(log(0.005 lambda_m), log(lambda_m), n)) / sqrt(max_l p_l)
Eigen::VectorXd tuning_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, GridKind kind,
                            Index max_group_size, int n = 50);

/// Smallest epsilon at which beta = 0 satisfies the block optimality
/// conditions: max_l ||(X^l)'g||_2 / sqrt(p_l) with g the loss (sub)gradient
/// at zero. For LAD, g uses sign(y) with sign(0) = 0.
double zero_threshold(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GroupStructure& structure, Loss loss);

/// The grid shape of tuning_grid with its top pinned at `top`:
///   GWGL:      top * sqrt(exp(lin(log 0.005, 0, n)))
///   l2 GLASSO: top * exp(lin(log 0.005, 0, n))
Eigen::VectorXd anchored_grid(double top, GridKind kind, int n = 50);

/// Where the tuning grid ends. `MaxCorrelation` uses lambda_m = ||X'y||_inf as in
/// tuning_grid; `ZeroThreshold` ends at the model's own zero threshold.
enum class GridAnchor { ZeroThreshold, MaxCorrelation };

std::string to_string(GridAnchor anchor);
GridAnchor grid_anchor_from_string(const std::string& name);

struct TuningOptions {
    int grid_size = 50;
    GridAnchor anchor = GridAnchor::ZeroThreshold;
    double validation_fraction = 0.3;
    std::uint64_t split_seed = 0;
    FitConfig fit;
};

struct TuningReport {
    Loss loss = Loss::Lad;
    GridAnchor anchor = GridAnchor::ZeroThreshold;
    Eigen::VectorXd grid;
    /// NaN marks an epsilon whose fit failed.
    Eigen::VectorXd validation_loss;
    double chosen_epsilon = 0.0;
    Index chosen_index = 0;
    FitResult refit;
    std::vector<std::string> warnings;
};

/// Splits `train` into fit/validation parts, fits every grid value on the fit
/// part, picks the smallest unpenalized validation loss (ties to the smaller
/// epsilon) and refits on all of `train`.
TuningReport tune_epsilon(const Dataset& train, const GroupStructure& structure, Loss loss,
                          const TuningOptions& options = {});

}  // namespace gwgl
