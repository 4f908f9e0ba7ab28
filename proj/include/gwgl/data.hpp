#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwgl/groups.hpp"

namespace gwgl {

/// Name of the generator behind every seeded draw in this library.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

/// Within-group correlation drawn per dataset as scale * U(low, high).
struct RhoJitter {
    double scale = 0.8;
    double low = 0.2;
    double high = 0.4;
};

/// Recipe for the grouped synthetic regression benchmark: predictors in
/// even-numbered groups (1-based) carry coefficient 0.5, the rest 0; x is
/// Gaussian with block-constant correlation; a fraction of responses is
/// shifted up by 5 sigma.
struct SyntheticSpec {
    std::vector<Index> group_sizes{1, 3, 5, 7};
    double rho_w = 0.0;
    std::optional<double> snr;
    std::optional<double> sigma2;
    double outlier_prob = 0.0;
    Index n = 100;
    std::uint64_t seed = 0;
    std::optional<RhoJitter> rho_jitter;
    /// Report sign(y) in {-1, +1} instead of y.
    bool binary = false;

    void validate() const;
    Index p() const;
};

enum class ResponseKind { Continuous, Binary };

std::string to_string(ResponseKind kind);
ResponseKind response_kind_from_string(const std::string& name);

/// Column transform x -> (x - shift) / scale.
struct Standardization {
    Eigen::VectorXd shift;
    Eigen::VectorXd scale;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
    /// Coefficients on the original predictor scale.
    Eigen::VectorXd original_coefficients(const Eigen::VectorXd& beta) const;
};

struct GroundTruth {
    Eigen::VectorXd beta;
    Eigen::MatrixXd covariance;
    double noise_variance = 0.0;
    double rho_w = 0.0;
    std::vector<char> outlier;  // per row
};

struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    ResponseKind kind = ResponseKind::Continuous;
    std::vector<std::string> feature_names;
    std::string response_name = "y";
    std::optional<Standardization> standardization;
    std::optional<GroundTruth> truth;

    Index rows() const { return X.rows(); }
    Index cols() const { return X.cols(); }
    /// Copy restricted to the given rows, in order.
    Dataset take_rows(const std::vector<Index>& rows) const;
    void validate() const;
};

/// Block-constant correlation matrix: 1 on the diagonal, rho within groups.
Eigen::MatrixXd block_covariance(const std::vector<Index>& group_sizes, double rho);

/// Coefficients 0.5 on even-numbered (1-based) groups, 0 elsewhere.
Eigen::VectorXd planted_coefficients(const std::vector<Index>& group_sizes);

Dataset generate_synthetic(const SyntheticSpec& spec);

/// Zero-mean, unit-l2-norm columns. Throws on a constant column.
Dataset standardize(const Dataset& data);

/// Applies an existing transform (e.g. the training one to a test set).
Dataset apply_standardization(const Dataset& data, const Standardization& record);

Dataset load_dataset(const std::string& path, const std::string& response, ResponseKind kind);

/// CSV with a header row; values written in shortest round-trip form.
void save_dataset(const std::string& path, const Dataset& data);

struct DatasetSplit {
    Dataset train;
    Dataset validation;
    Dataset test;
    std::vector<Index> train_rows;
    std::vector<Index> validation_rows;
    std::vector<Index> test_rows;
};

/// Seeded row shuffle; validation and test get floor(N * fraction) rows and
/// train takes the remainder.
DatasetSplit split_dataset(const Dataset& data, double train, double validation, double test,
                           std::uint64_t seed);

/// Writes `contents` to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace gwgl
