#include "gwgl/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "gwgl/error.hpp"
#include "gwgl/parallel.hpp"

namespace gwgl {

GridKind grid_kind_for(Loss loss) {
    return loss == Loss::L2 ? GridKind::GlassoL2 : GridKind::Gwgl;
}

Eigen::VectorXd tuning_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, GridKind kind,
                            Index max_group_size, int n) {
    if (n < 1) throw InvalidArgument("tuning grid needs at least one value");
    if (max_group_size < 1) throw InvalidArgument("tuning grid: max group size must be positive");
    if (X.rows() != y.size()) throw InvalidArgument("tuning grid: X/y row mismatch");
    const double lambda_m = (X.transpose() * y).cwiseAbs().maxCoeff();
    if (!(lambda_m > 0.0)) throw InvalidArgument("tuning grid: X'y = 0, no penalty scale");

    const double lo = std::log(0.005 * lambda_m);
    const double hi = std::log(lambda_m);
    const double pmax = static_cast<double>(max_group_size);
    Eigen::VectorXd grid(n);
    for (int k = 0; k < n; ++k) {
        const double t = n == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        const double e = std::exp(lo + t * (hi - lo));
        grid[k] = kind == GridKind::Gwgl ? std::sqrt(e / pmax) : e / std::sqrt(pmax);
    }
    return grid;
}

double zero_threshold(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GroupStructure& structure, Loss loss) {
    require_valid(structure, X.cols());
    if (X.rows() != y.size()) throw InvalidArgument("zero_threshold: X/y row mismatch");
    const double n = static_cast<double>(X.rows());
    Eigen::VectorXd g;
    switch (loss) {
        case Loss::Lad: g = X.transpose() * y.cwiseSign() / n; break;
        case Loss::Logloss: g = X.transpose() * y / (2.0 * n); break;
        case Loss::L2: g = 2.0 * (X.transpose() * y) / n; break;
    }
    double top = 0.0;
    for (std::size_t l = 0; l < structure.num_groups(); ++l) {
        double sq = 0.0;
        for (Index j : structure.groups[l]) sq += g[j] * g[j];
        top = std::max(top, std::sqrt(sq / static_cast<double>(structure.groups[l].size())));
    }
    return top;
}

Eigen::VectorXd anchored_grid(double top, GridKind kind, int n) {
    if (n < 1) throw InvalidArgument("tuning grid needs at least one value");
    if (!(top > 0.0)) throw InvalidArgument("tuning grid: zero threshold is 0, no penalty scale");
    const double lo = std::log(0.005);
    Eigen::VectorXd grid(n);
    for (int k = 0; k < n; ++k) {
        const double t = n == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        const double e = std::exp(lo * (1.0 - t));
        grid[k] = top * (kind == GridKind::Gwgl ? std::sqrt(e) : e);
    }
    return grid;
}

std::string to_string(GridAnchor anchor) {
    return anchor == GridAnchor::MaxCorrelation ? "max-correlation" : "zero-threshold";
}

GridAnchor grid_anchor_from_string(const std::string& name) {
    if (name == "max-correlation") return GridAnchor::MaxCorrelation;
    if (name == "zero-threshold") return GridAnchor::ZeroThreshold;
    throw InvalidArgument("unknown grid anchor '" + name + "' (expected max-correlation or zero-threshold)");
}

TuningReport tune_epsilon(const Dataset& train, const GroupStructure& structure, Loss loss,
                          const TuningOptions& options) {
    const double vf = options.validation_fraction;
    if (!(vf > 0.0 && vf < 1.0)) throw InvalidArgument("validation fraction must lie in (0, 1)");
    const DatasetSplit split = split_dataset(train, 1.0 - vf, vf, 0.0, options.split_seed);
    if (split.validation.rows() == 0 || split.train.rows() == 0)
        throw InvalidArgument("too few rows for a fit/validation split");

    TuningReport report;
    report.loss = loss;
    report.anchor = options.anchor;
    report.grid = options.anchor == GridAnchor::MaxCorrelation
                      ? tuning_grid(split.train.X, split.train.y, grid_kind_for(loss),
                                    structure.max_size(), options.grid_size)
                      : anchored_grid(zero_threshold(split.train.X, split.train.y, structure, loss),
                                      grid_kind_for(loss), options.grid_size);
    const Index n = report.grid.size();
    report.validation_loss = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> failures(static_cast<std::size_t>(n));

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
        try {
            const FitResult f = fit(split.train.X, split.train.y, structure,
                                    report.grid[static_cast<Index>(k)], loss, options.fit);
            report.validation_loss[static_cast<Index>(k)] =
                loss_of_predictions(split.validation.X * f.beta, split.validation.y, loss);
            if (!f.converged)
                failures[k] = "epsilon " + std::to_string(report.grid[static_cast<Index>(k)]) +
                              " did not converge; kept its last iterate";
        } catch (const std::exception& e) {
            failures[k] = "epsilon " + std::to_string(report.grid[static_cast<Index>(k)]) +
                          " excluded: " + e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) report.warnings.push_back(f);

    Index best = -1;
    for (Index k = 0; k < n; ++k) {
        const double v = report.validation_loss[k];
        if (std::isnan(v)) continue;
        if (best < 0 || v < report.validation_loss[best]) best = k;
    }
    if (best < 0) throw NumericalError("tuning failed: every grid value failed to fit");
    report.chosen_index = best;
    report.chosen_epsilon = report.grid[best];
    report.refit = fit(train.X, train.y, structure, report.chosen_epsilon, loss, options.fit);
    return report;
}

}  // namespace gwgl
