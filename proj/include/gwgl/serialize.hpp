#pragma once

#include <string>

#include <json.hpp>

#include "gwgl/data.hpp"
#include "gwgl/groups.hpp"
#include "gwgl/ot.hpp"
#include "gwgl/solvers.hpp"
#include "gwgl/tuning.hpp"

namespace gwgl {

using json = nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);
json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);

/// {"p": int, "groups": [[int, ...], ...], "overlapping": bool}
json groups_to_json(const GroupStructure& s);
GroupStructure groups_from_json(const json& j);

/// {"beta", "objective", "iterations", "converged", "epsilon", "loss"} plus
/// optional "latent", "certificate" and "diagnostic".
json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const json& j);

/// {"support": [[...], ...], "probs": [...]}
json distribution_to_json(const DiscreteDistribution& d);
DiscreteDistribution distribution_from_json(const json& j);

json standardization_to_json(const Standardization& s);
Standardization standardization_from_json(const json& j);

json synthetic_spec_to_json(const SyntheticSpec& spec);

json tuning_to_json(const TuningReport& report);
/// One row per grid value: index,epsilon,validation_loss,chosen
std::string tuning_to_csv(const TuningReport& report);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace gwgl
