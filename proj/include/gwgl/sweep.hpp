#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gwgl/data.hpp"
#include "gwgl/metrics.hpp"
#include "gwgl/solvers.hpp"
#include "gwgl/tuning.hpp"

namespace gwgl {

enum class SweepAxis { Snr, Rho };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// Log-spaced SNR values between 0.5 and 2.
std::vector<double> default_snr_values(int count = 8);
/// 0.1, 0.2, ..., 0.9.
std::vector<double> default_rho_values();

struct SweepOptions {
    SweepAxis axis = SweepAxis::Snr;
    std::vector<double> values;
    int datasets = 10;
    Index n_train = 100;
    Index n_test = 60;
    std::vector<Index> group_sizes{1, 3, 5, 7};
    double outlier_prob = 0.3;
    /// SNR while sweeping rho_w; ignored on the SNR axis.
    double fixed_snr = 1.0;
    /// Spectral clustering into this many groups; the eigengap picks when
    /// unset and `use_true_groups` is false.
    std::optional<int> clusters;
    bool use_true_groups = false;
    std::vector<Loss> methods{Loss::Lad, Loss::L2};
    int grid_size = 50;
    GridAnchor anchor = GridAnchor::ZeroThreshold;
    std::uint64_t seed = 0;
    FitConfig fit;
};

/// Per-dataset outcome of one method at one sweep point.
struct SweepRecord {
    std::size_t point = 0;
    int dataset = 0;
    Loss method = Loss::Lad;
    double epsilon = 0.0;
    double mad = 0.0;
    OracleScores scores;
    bool converged = true;
};

struct SweepResult {
    SweepOptions options;
    std::vector<SweepRecord> records;
    std::vector<std::string> warnings;

    /// Median over datasets of `metric` (mad, rr, rte, pve) for a method, or
    /// of the ideal/null reference when `reference` is "ideal"/"null".
    double median_metric(std::size_t point, Loss method, const std::string& metric) const;
    double median_reference(std::size_t point, const std::string& reference,
                            const std::string& metric) const;
};

/// Synthetic experiment: for every sweep value and dataset, generate
/// training and test samples, group the predictors, tune epsilon for each
/// method on the training set and score the refit.
SweepResult run_sweep(const SweepOptions& options);

/// One CSV table per metric: axis value, method, median value.
std::string sweep_table_csv(const SweepResult& result, const std::string& metric);

/// Display name of a method in reports.
std::string method_name(Loss loss);

}  // namespace gwgl
