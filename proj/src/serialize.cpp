#include "gwgl/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gwgl/error.hpp"

namespace gwgl {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw InvalidArgument("expected a JSON array of numbers");
    Eigen::VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InvalidArgument("expected a number at position " + std::to_string(i));
        v[static_cast<Index>(i)] = j[i].get<double>();
    }
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (Index r = 0; r < m.rows(); ++r) arr.push_back(vector_to_json(m.row(r).transpose()));
    return arr;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array()) throw InvalidArgument("expected a JSON array of rows");
    if (j.empty()) return {};
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != cols) throw InvalidArgument("ragged matrix rows");
        m.row(static_cast<Index>(r)) = vector_from_json(j[r]).transpose();
    }
    return m;
}

json groups_to_json(const GroupStructure& s) {
    json groups = json::array();
    for (const auto& g : s.groups) groups.push_back(g);
    return json{{"p", s.p}, {"groups", groups}, {"overlapping", s.overlapping}};
}

GroupStructure groups_from_json(const json& j) {
    try {
        GroupStructure s;
        s.p = j.at("p").get<Index>();
        s.overlapping = j.value("overlapping", false);
        for (const auto& g : j.at("groups")) s.groups.push_back(g.get<std::vector<Index>>());
        return s;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed groups JSON: ") + e.what());
    }
}

json fit_to_json(const FitResult& fit) {
    json j{{"beta", vector_to_json(fit.beta)},
           {"objective", fit.objective},
           {"iterations", fit.iterations},
           {"converged", fit.converged},
           {"epsilon", fit.epsilon},
           {"loss", to_string(fit.loss)},
           {"certificate", std::isfinite(fit.certificate) ? json(fit.certificate) : json(nullptr)}};
    if (fit.latent) {
        json latent = json::array();
        for (const auto& v : fit.latent->latent) latent.push_back(vector_to_json(v));
        j["latent"] = {{"vectors", latent}, {"weights", vector_to_json(fit.latent->weights)}};
    }
    if (!fit.diagnostic.empty()) j["diagnostic"] = fit.diagnostic;
    return j;
}

FitResult fit_from_json(const json& j) {
    try {
        FitResult f;
        f.beta = vector_from_json(j.at("beta"));
        f.objective = j.at("objective").get<double>();
        f.iterations = j.at("iterations").get<int>();
        f.converged = j.at("converged").get<bool>();
        f.epsilon = j.at("epsilon").get<double>();
        f.loss = loss_from_string(j.at("loss").get<std::string>());
        if (j.contains("latent")) {
            LatentDecomposition dec;
            for (const auto& v : j["latent"].at("vectors")) dec.latent.push_back(vector_from_json(v));
            dec.weights = vector_from_json(j["latent"].at("weights"));
            f.latent = std::move(dec);
        }
        if (j.contains("diagnostic")) f.diagnostic = j["diagnostic"].get<std::string>();
        return f;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed fit JSON: ") + e.what());
    }
}

json distribution_to_json(const DiscreteDistribution& d) {
    return json{{"support", matrix_to_json(d.support)}, {"probs", vector_to_json(d.probs)}};
}

DiscreteDistribution distribution_from_json(const json& j) {
    try {
        DiscreteDistribution d;
        d.support = matrix_from_json(j.at("support"));
        d.probs = vector_from_json(j.at("probs"));
        return d;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed distribution JSON: ") + e.what());
    }
}

json standardization_to_json(const Standardization& s) {
    return json{{"shift", vector_to_json(s.shift)}, {"scale", vector_to_json(s.scale)}};
}

Standardization standardization_from_json(const json& j) {
    return Standardization{vector_from_json(j.at("shift")), vector_from_json(j.at("scale"))};
}

json synthetic_spec_to_json(const SyntheticSpec& spec) {
    json j{{"group_sizes", spec.group_sizes},
           {"rho_w", spec.rho_w},
           {"outlier_prob", spec.outlier_prob},
           {"n", spec.n},
           {"seed", spec.seed},
           {"binary", spec.binary},
           {"rng", kRngAlgorithm}};
    j["snr"] = spec.snr ? json(*spec.snr) : json(nullptr);
    j["sigma2"] = spec.sigma2 ? json(*spec.sigma2) : json(nullptr);
    if (spec.rho_jitter)
        j["rho_jitter"] = {{"scale", spec.rho_jitter->scale},
                           {"low", spec.rho_jitter->low},
                           {"high", spec.rho_jitter->high}};
    return j;
}

json tuning_to_json(const TuningReport& report) {
    json losses = json::array();
    for (Index k = 0; k < report.validation_loss.size(); ++k) {
        const double v = report.validation_loss[k];
        losses.push_back(std::isnan(v) ? json(nullptr) : json(v));
    }
    return json{{"loss", to_string(report.loss)},
                {"anchor", to_string(report.anchor)},
                {"grid", vector_to_json(report.grid)},
                {"validation_loss", losses},
                {"chosen_epsilon", report.chosen_epsilon},
                {"chosen_index", report.chosen_index},
                {"refit", fit_to_json(report.refit)},
                {"warnings", report.warnings}};
}

std::string tuning_to_csv(const TuningReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "index,epsilon,validation_loss,chosen\n";
    for (Index k = 0; k < report.grid.size(); ++k) {
        out << k << ',' << report.grid[k] << ',';
        if (!std::isnan(report.validation_loss[k])) out << report.validation_loss[k];
        out << ',' << (k == report.chosen_index ? 1 : 0) << '\n';
    }
    return out.str();
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open JSON file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("invalid JSON in '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace gwgl
