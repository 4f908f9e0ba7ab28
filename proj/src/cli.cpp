#include "gwgl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gwgl/checks.hpp"
#include "gwgl/clustering.hpp"
#include "gwgl/data.hpp"
#include "gwgl/error.hpp"
#include "gwgl/metrics.hpp"
#include "gwgl/norms.hpp"
#include "gwgl/serialize.hpp"
#include "gwgl/solvers.hpp"
#include "gwgl/sweep.hpp"
#include "gwgl/tuning.hpp"

namespace gwgl::cli {

namespace {

namespace fs = std::filesystem;

enum class ModelKind { GwglLr, GwglLg, GlassoL2, LatentOverlap };

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::GwglLr: return "gwgl-lr";
        case ModelKind::GwglLg: return "gwgl-lg";
        case ModelKind::GlassoL2: return "glasso-l2";
        case ModelKind::LatentOverlap: return "latent-overlap";
    }
    return "";
}

ModelKind model_from_string(const std::string& name) {
    for (ModelKind k : {ModelKind::GwglLr, ModelKind::GwglLg, ModelKind::GlassoL2, ModelKind::LatentOverlap})
        if (to_string(k) == name) return k;
    throw InvalidArgument("--model: unknown model '" + name +
                          "' (expected gwgl-lr, gwgl-lg, glasso-l2 or latent-overlap)");
}

// Numerical failure that should still leave its report behind.
struct Incomplete {
    std::string message;
};

std::string meta_path(const std::string& data_path) { return data_path + ".meta.json"; }

void check_output(const std::string& path, const char* flag = "--out") {
    if (path.empty()) return;
    fs::path parent = fs::path(path).parent_path();
    if (parent.empty()) parent = ".";
    if (!fs::is_directory(parent))
        throw InvalidArgument(std::string(flag) + ": directory '" + parent.string() + "' does not exist");
}

void emit(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << j.dump(2) << '\n';
    else
        write_json_file(path, j);
}

std::optional<int> parse_clusters(const std::string& text) {
    if (text == "auto") return std::nullopt;
    int value = 0;
    std::size_t used = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || value < 1)
        throw InvalidArgument("--clusters: expected a positive integer or 'auto', got '" + text + "'");
    return value;
}

json clustering_to_json(const ClusteringResult& r, bool user_clusters) {
    return json{{"eigenvalues", vector_to_json(r.eigenvalues)},
                {"k_neighbors", r.k},
                {"sigma", r.sigma},
                {"clusters", r.clusters},
                {"chosen_by", user_clusters ? "user" : "eigengap"},
                {"inertia", r.inertia}};
}

// Options shared by every subcommand that fits a model.
struct ModelArgs {
    std::string data;
    std::string response = "y";
    std::string model = "gwgl-lr";
    std::string loss;
    std::string groups;
    bool auto_cluster = false;
    std::string clusters = "auto";
    double epsilon = 0.0;
    CLI::Option* epsilon_opt = nullptr;
    bool tune = false;
    std::string grid = "zero-threshold";
    int grid_size = 50;
    double validation_fraction = 0.3;
    bool no_standardize = false;
    int max_iters = 100000;
    double tol = 1e-8;
    std::vector<double> latent_weights;
    std::uint64_t seed = 0;
    std::string out;
};

void add_model_options(CLI::App* sub, ModelArgs& a, bool data_required) {
    auto* data = sub->add_option("--data", a.data, "CSV file with a header row")->check(CLI::ExistingFile);
    if (data_required) data->required();
    sub->add_option("--response", a.response, "Response column name")->capture_default_str();
    sub->add_option("--model", a.model, "gwgl-lr | gwgl-lg | glasso-l2 | latent-overlap")
        ->capture_default_str();
    sub->add_option("--loss", a.loss, "Loss of the latent-overlap model: lad | logloss | l2 (default lad)");
    auto* groups = sub->add_option("--groups", a.groups, "Group structure JSON")->check(CLI::ExistingFile);
    auto* autoc = sub->add_flag("--auto-cluster", a.auto_cluster, "Group predictors by spectral clustering");
    groups->excludes(autoc);
    sub->add_option("--clusters", a.clusters, "Number of clusters for --auto-cluster, or 'auto'")
        ->capture_default_str();
    a.epsilon_opt = sub->add_option("--epsilon", a.epsilon, "Penalty / Wasserstein radius");
    auto* tune = sub->add_flag("--tune", a.tune, "Choose epsilon on a validation split");
    a.epsilon_opt->excludes(tune);
    sub->add_option("--grid", a.grid, "Tuning grid anchor: zero-threshold | max-correlation")->capture_default_str();
    sub->add_option("--grid-size", a.grid_size, "Tuning grid length")->capture_default_str();
    sub->add_option("--validation-fraction", a.validation_fraction, "Share of rows held out when tuning")
        ->capture_default_str();
    sub->add_flag("--no-standardize", a.no_standardize, "Use the predictors as given");
    sub->add_option("--max-iters", a.max_iters, "Solver iteration cap")->capture_default_str();
    sub->add_option("--tol", a.tol, "Solver relative tolerance")->capture_default_str();
    sub->add_option("--latent-weights", a.latent_weights, "Per-group weights d_l (latent-overlap)")
        ->delimiter(',');
    sub->add_option("--seed", a.seed, "Seed for clustering, splits and power iteration")->capture_default_str();
    sub->add_option("-o,--out", a.out, "Output path (stdout when omitted)");
}

struct Prepared {
    Dataset data;
    ModelKind kind = ModelKind::GwglLr;
    Loss loss = Loss::Lad;
    GroupStructure groups;
    std::string group_source;
    json clustering = nullptr;
};

Loss loss_for(const ModelArgs& a, ModelKind kind) {
    switch (kind) {
        case ModelKind::GwglLr:
        case ModelKind::GwglLg:
        case ModelKind::GlassoL2: {
            const Loss fixed = kind == ModelKind::GwglLr   ? Loss::Lad
                               : kind == ModelKind::GwglLg ? Loss::Logloss
                                                           : Loss::L2;
            if (!a.loss.empty() && loss_from_string(a.loss) != fixed)
                throw InvalidArgument("--loss: " + to_string(kind) + " always uses " + to_string(fixed));
            return fixed;
        }
        case ModelKind::LatentOverlap: return a.loss.empty() ? Loss::Lad : loss_from_string(a.loss);
    }
    return Loss::Lad;
}

void attach_groups(Prepared& p, const ModelArgs& a) {
    if (!a.groups.empty()) {
        p.groups = groups_from_json(read_json_file(a.groups));
        if (auto why = validate_groups(p.groups, p.data.cols()))
            throw InvalidArgument("--groups '" + a.groups + "': " + *why);
        if (p.groups.overlapping && p.kind != ModelKind::LatentOverlap)
            throw InvalidArgument("--groups '" + a.groups + "' overlaps; use --model latent-overlap");
        p.group_source = "file";
        return;
    }
    if (!a.auto_cluster) throw InvalidArgument("no groups: pass --groups FILE or --auto-cluster");
    ClusteringConfig cfg;
    cfg.n_clusters = parse_clusters(a.clusters);
    cfg.seed = a.seed;
    const Eigen::MatrixXd X = p.data.standardization ? p.data.X : standardize(p.data).X;
    const ClusteringResult r = cluster_predictors(X, cfg);
    p.groups = r.groups;
    p.group_source = "auto-cluster";
    p.clustering = clustering_to_json(r, cfg.n_clusters.has_value());
}

Prepared prepare(const ModelArgs& a) {
    Prepared p;
    p.kind = model_from_string(a.model);
    p.loss = loss_for(a, p.kind);
    (void)grid_anchor_from_string(a.grid);
    check_output(a.out);
    const ResponseKind rk = p.loss == Loss::Logloss ? ResponseKind::Binary : ResponseKind::Continuous;
    p.data = load_dataset(a.data, a.response, rk);
    if (!a.no_standardize) p.data = standardize(p.data);
    attach_groups(p, a);
    return p;
}

FitConfig fit_config(const ModelArgs& a) {
    FitConfig cfg;
    cfg.max_iters = a.max_iters;
    cfg.tol = a.tol;
    cfg.seed = a.seed;
    return cfg;
}

Eigen::VectorXd latent_weights(const Prepared& p, const ModelArgs& a) {
    if (a.latent_weights.empty()) return sqrt_size_weights(p.groups);
    if (a.latent_weights.size() != p.groups.num_groups())
        throw InvalidArgument("--latent-weights: need " + std::to_string(p.groups.num_groups()) +
                              " values, got " + std::to_string(a.latent_weights.size()));
    return Eigen::Map<const Eigen::VectorXd>(a.latent_weights.data(),
                                             static_cast<Index>(a.latent_weights.size()));
}

TuningReport run_tuning(const Prepared& p, const ModelArgs& a) {
    if (p.kind == ModelKind::LatentOverlap)
        throw InvalidArgument("--tune is not available for latent-overlap; pass --epsilon");
    TuningOptions opt;
    opt.grid_size = a.grid_size;
    opt.validation_fraction = a.validation_fraction;
    opt.anchor = grid_anchor_from_string(a.grid);
    opt.split_seed = a.seed;
    opt.fit = fit_config(a);
    return tune_epsilon(p.data, p.groups, p.loss, opt);
}

FitResult run_fit(const Prepared& p, const ModelArgs& a, double epsilon) {
    if (p.kind == ModelKind::LatentOverlap)
        return fit_latent_overlap(p.data.X, p.data.y, p.groups, latent_weights(p, a), epsilon, p.loss,
                                  fit_config(a));
    return fit(p.data.X, p.data.y, p.groups, epsilon, p.loss, fit_config(a));
}

void report_fit(const FitResult& f, const std::string& model, std::ostream& err) {
    err << model << ": epsilon " << f.epsilon << ", " << f.iterations << " iterations, "
        << (f.converged ? "converged" : "not converged") << ", objective " << f.objective << '\n';
}

std::string join_names(const std::vector<std::string>& names) {
    std::string s;
    for (const auto& n : names) s += (s.empty() ? "" : ",") + n;
    return s;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
    Index n = 100;
    std::vector<Index> group_sizes{1, 3, 5, 7};
    double rho = 0.0;
    double snr = 1.0;
    CLI::Option* snr_opt = nullptr;
    double sigma2 = 0.0;
    CLI::Option* sigma2_opt = nullptr;
    double outlier_prob = 0.0;
    bool rho_jitter = false;
    bool binary = false;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& err) {
    check_output(a.out);
    SyntheticSpec spec;
    spec.n = a.n;
    spec.group_sizes = a.group_sizes;
    spec.rho_w = a.rho;
    if (a.sigma2_opt->count() > 0)
        spec.sigma2 = a.sigma2;
    else
        spec.snr = a.snr;
    spec.outlier_prob = a.outlier_prob;
    if (a.rho_jitter) spec.rho_jitter = RhoJitter{};
    spec.binary = a.binary;
    spec.seed = a.seed;
    spec.validate();
    const Dataset d = generate_synthetic(spec);
    save_dataset(a.out, d);

    const GroundTruth& t = *d.truth;
    std::vector<Index> outliers;
    for (std::size_t i = 0; i < t.outlier.size(); ++i)
        if (t.outlier[i]) outliers.push_back(static_cast<Index>(i));
    json meta{{"format", "gwgl-dataset-meta"},
              {"rows", d.rows()},
              {"features", d.feature_names},
              {"response", d.response_name},
              {"response_kind", to_string(d.kind)},
              {"seed", a.seed},
              {"rng", kRngAlgorithm},
              {"spec", synthetic_spec_to_json(spec)},
              {"groups", groups_to_json(GroupStructure::contiguous(spec.group_sizes))},
              {"standardization", nullptr},
              {"truth",
               {{"beta", vector_to_json(t.beta)},
                {"covariance", matrix_to_json(t.covariance)},
                {"noise_variance", t.noise_variance},
                {"rho_w", t.rho_w},
                {"outlier_rows", outliers}}}};
    write_json_file(meta_path(a.out), meta);
    err << "generate: " << d.rows() << " rows, " << d.cols() << " predictors -> " << a.out << '\n';
    return kExitOk;
}

// ---- cluster --------------------------------------------------------------

struct ClusterArgs {
    std::string data;
    std::string response = "y";
    std::string clusters = "auto";
    int knn = 0;
    double sigma = 0.0;
    int restarts = 10;
    bool no_standardize = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string diagnostics;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out, std::ostream& err) {
    check_output(a.out);
    check_output(a.diagnostics, "--diagnostics");
    ClusteringConfig cfg;
    cfg.n_clusters = parse_clusters(a.clusters);
    if (a.knn > 0) cfg.k_neighbors = a.knn;
    if (a.sigma > 0.0) cfg.sigma = a.sigma;
    cfg.kmeans_restarts = a.restarts;
    cfg.seed = a.seed;
    Dataset d = load_dataset(a.data, a.response, ResponseKind::Continuous);
    if (!a.no_standardize) d = standardize(d);
    const ClusteringResult r = cluster_predictors(d.X, cfg);
    json groups = groups_to_json(r.groups);
    json diag = clustering_to_json(r, cfg.n_clusters.has_value());
    diag["format"] = "gwgl-cluster-diagnostics";
    diag["features"] = d.feature_names;
    diag["seed"] = a.seed;
    if (a.out.empty()) {
        out << json{{"groups", groups}, {"diagnostics", diag}}.dump(2) << '\n';
    } else {
        write_json_file(a.out, groups);
        const std::string dpath =
            a.diagnostics.empty() ? fs::path(a.out).replace_extension(".diagnostics.json").string()
                                  : a.diagnostics;
        write_json_file(dpath, diag);
    }
    err << "cluster: " << r.clusters << " groups over " << d.cols() << " predictors\n";
    return kExitOk;
}

// ---- fit / tune -----------------------------------------------------------

json model_json(const Prepared& p, const ModelArgs& a, const FitResult& f,
                const std::optional<TuningReport>& tuning) {
    const Eigen::VectorXd original =
        p.data.standardization ? p.data.standardization->original_coefficients(f.beta) : f.beta;
    json tj = nullptr;
    if (tuning) {
        tj = tuning_to_json(*tuning);
        tj.erase("refit");
    }
    json weights = nullptr;
    if (p.kind == ModelKind::LatentOverlap) weights = vector_to_json(latent_weights(p, a));
    return json{{"format", "gwgl-model"},
                {"model", to_string(p.kind)},
                {"loss", to_string(p.loss)},
                {"response", p.data.response_name},
                {"response_kind", to_string(p.data.kind)},
                {"features", p.data.feature_names},
                {"standardization", p.data.standardization
                                        ? standardization_to_json(*p.data.standardization)
                                        : json(nullptr)},
                {"groups", groups_to_json(p.groups)},
                {"group_source", p.group_source},
                {"clustering", p.clustering},
                {"latent_weights", weights},
                {"seed", a.seed},
                {"epsilon", f.epsilon},
                {"tuning", tj},
                {"training_rows", p.data.rows()},
                {"fit", fit_to_json(f)},
                {"coefficients_original", vector_to_json(original)}};
}

int cmd_fit(const ModelArgs& a, std::ostream& out, std::ostream& err) {
    if (a.epsilon_opt->count() == 0 && !a.tune) throw InvalidArgument("fit needs --epsilon F or --tune");
    const Prepared p = prepare(a);
    std::optional<TuningReport> tuning;
    FitResult f;
    if (a.tune) {
        tuning = run_tuning(p, a);
        for (const auto& w : tuning->warnings) err << "warning: " << w << '\n';
        f = tuning->refit;
    } else {
        f = run_fit(p, a, a.epsilon);
    }
    report_fit(f, to_string(p.kind), err);
    emit(model_json(p, a, f, tuning), a.out, out);
    if (!f.converged) throw Incomplete{"fit did not converge within " + std::to_string(a.max_iters) + " iterations"};
    return kExitOk;
}

struct TuneExtra {
    std::string table;
};

int cmd_tune(const ModelArgs& a, const TuneExtra& x, std::ostream& out, std::ostream& err) {
    check_output(x.table, "--table");
    const Prepared p = prepare(a);
    const TuningReport rep = run_tuning(p, a);
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
    json j = tuning_to_json(rep);
    j["format"] = "gwgl-tuning";
    j["model"] = to_string(p.kind);
    j["groups"] = groups_to_json(p.groups);
    j["group_source"] = p.group_source;
    j["seed"] = a.seed;
    emit(j, a.out, out);
    std::string table = x.table;
    if (table.empty() && !a.out.empty()) table = fs::path(a.out).replace_extension(".csv").string();
    if (!table.empty()) write_file_atomic(table, tuning_to_csv(rep));
    err << "tune: chose epsilon " << rep.chosen_epsilon << " (grid index " << rep.chosen_index << ")\n";
    if (!rep.refit.converged) throw Incomplete{"refit at the chosen epsilon did not converge"};
    return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
    std::string model;
    std::string data;
    std::string meta;
    std::string out;
};

json scores_json(double rr, double rte, double pve) {
    return json{{"rr", rr}, {"rte", rte}, {"pve", pve}};
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    check_output(a.out);
    const json m = read_json_file(a.model);
    ModelKind kind;
    Loss loss;
    std::string response;
    std::vector<std::string> features;
    std::optional<Standardization> record;
    GroupStructure groups;
    FitResult f;
    try {
        if (m.at("format") != "gwgl-model") throw InvalidArgument("not a model file");
        kind = model_from_string(m.at("model").get<std::string>());
        loss = loss_from_string(m.at("loss").get<std::string>());
        response = m.at("response").get<std::string>();
        features = m.at("features").get<std::vector<std::string>>();
        if (!m.at("standardization").is_null()) record = standardization_from_json(m["standardization"]);
        groups = groups_from_json(m.at("groups"));
        f = fit_from_json(m.at("fit"));
    } catch (const json::exception& e) {
        throw InvalidArgument("--model '" + a.model + "': " + e.what());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument("--model '" + a.model + "': " + e.what());
    }

    Dataset d = load_dataset(a.data, response,
                             loss == Loss::Logloss ? ResponseKind::Binary : ResponseKind::Continuous);
    if (d.feature_names != features)
        throw InvalidArgument("--data '" + a.data + "': columns [" + join_names(d.feature_names) +
                              "] do not match the model's [" + join_names(features) + "]");
    if (record) d = apply_standardization(d, *record);

    const double objective =
        kind == ModelKind::LatentOverlap
            ? eval_latent_objective(f.latent.value(), d.X, d.y, f.epsilon, loss)
            : eval_objective(f.beta, d.X, d.y, groups, f.epsilon, loss);
    const Eigen::VectorXd pred = d.X * f.beta;

    json report{{"format", "gwgl-evaluation"},
                {"model", to_string(kind)},
                {"loss", to_string(loss)},
                {"data", a.data},
                {"rows", d.rows()},
                {"objective", objective},
                {"training_objective", f.objective},
                {"mean_loss", loss_of_predictions(pred, d.y, loss)}};
    if (loss == Loss::Logloss) {
        Index wrong = 0;
        for (Index i = 0; i < d.rows(); ++i) wrong += (pred[i] >= 0.0 ? 1.0 : -1.0) != d.y[i];
        report["misclassification"] = static_cast<double>(wrong) / static_cast<double>(d.rows());
        report["mad"] = nullptr;
    } else {
        report["mad"] = mad(d.y, pred);
        report["misclassification"] = nullptr;
    }
    json nonzero = json::array();
    for (std::size_t l = 0; l < groups.num_groups(); ++l) {
        double sq = 0.0;
        for (Index j : groups.groups[l]) sq += f.beta[j] * f.beta[j];
        if (sq > 0.0) nonzero.push_back(l);
    }
    report["nonzero_groups"] = nonzero;
    report["wgd"] = nullptr;
    if (record && !groups.overlapping) {
        try {
            report["wgd"] = wgd(f.beta, d.X, groups);
        } catch (const InvalidArgument& e) {
            err << "note: wgd not reported: " << e.what() << '\n';
        }
    }

    std::string meta = a.meta;
    if (meta.empty() && fs::exists(meta_path(a.data))) meta = meta_path(a.data);
    report["meta"] = meta.empty() ? json(nullptr) : json(meta);
    report["oracle"] = nullptr;
    if (!meta.empty()) {
        const json mj = read_json_file(meta);
        if (mj.contains("truth") && !mj["truth"].is_null()) {
            const json& t = mj["truth"];
            const Eigen::VectorXd original = record ? record->original_coefficients(f.beta) : f.beta;
            const OracleScores s =
                oracle_scores(original, vector_from_json(t.at("beta")), matrix_from_json(t.at("covariance")),
                              t.at("noise_variance").get<double>());
            report["oracle"] = {{"estimate", scores_json(s.rr, s.rte, s.pve)},
                                {"ideal", scores_json(s.ideal_rr, s.ideal_rte, s.ideal_pve)},
                                {"null", scores_json(s.null_rr, s.null_rte, s.null_pve)}};
        }
    }
    emit(report, a.out, out);
    err << "evaluate: " << d.rows() << " rows, objective " << objective << '\n';
    return kExitOk;
}

// ---- oracle-check ---------------------------------------------------------

int finish_check(const json& report, bool pass, const std::string& path, const std::string& name,
                 std::ostream& out, std::ostream& err) {
    emit(report, path, out);
    err << "oracle-check " << name << ": " << (pass ? "pass" : "FAIL") << '\n';
    if (!pass) throw Incomplete{"oracle-check " + name + " failed"};
    return kExitOk;
}

struct MixtureArgs {
    double q = 0.0;
    int trials = 1;
    int support = 10;
    int dim = 3;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_mixture(const MixtureArgs& a, std::ostream& out, std::ostream& err) {
    check_output(a.out);
    const MixtureCheck c = check_mixture(a.q, a.trials, a.support, a.dim, a.seed);
    std::size_t worst = 0;
    for (std::size_t k = 0; k < c.ratios.size(); ++k)
        if (std::abs(c.ratios[k] - c.expected) > std::abs(c.ratios[worst] - c.expected)) worst = k;
    const json report{{"check", "mixture"},
                      {"q", c.q},
                      {"expected", c.expected},
                      {"ratio", c.ratios[worst]},
                      {"ratios", c.ratios},
                      {"max_abs_error", c.max_abs_error},
                      {"tolerance", c.tolerance},
                      {"trials", a.trials},
                      {"seed", a.seed},
                      {"pass", c.pass}};
    return finish_check(report, c.pass, a.out, "mixture", out, err);
}

struct DroArgs {
    int trials = 200;
    std::string loss = "both";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_dro(const DroArgs& a, std::ostream& out, std::ostream& err) {
    check_output(a.out);
    std::vector<Loss> losses;
    if (a.loss == "both")
        losses = {Loss::Lad, Loss::Logloss};
    else
        losses = {loss_from_string(a.loss)};
    json results = json::array();
    bool pass = true;
    for (Loss l : losses) {
        const DroCheck c = check_dro_bound(a.trials, l, a.seed);
        results.push_back({{"loss", to_string(l)},
                           {"instances", c.instances},
                           {"max_excess", c.max_excess},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
        pass = pass && c.pass;
    }
    const json report{{"check", "dro-bound"}, {"results", results}, {"seed", a.seed}, {"pass", pass}};
    return finish_check(report, pass, a.out, "dro-bound", out, err);
}

struct DualArgs {
    int trials = 1000;
    int max_dim = 12;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_dual(const DualArgs& a, std::ostream& out, std::ostream& err) {
    check_output(a.out);
    const DualNormCheck c = check_dual_norm(a.trials, a.max_dim, a.seed);
    const json report{{"check", "dual-norm"},
                      {"trials", c.trials},
                      {"max_abs_error", c.max_abs_error},
                      {"max_sampled_excess", c.max_sampled_excess},
                      {"tolerance", c.tolerance},
                      {"seed", a.seed},
                      {"pass", c.pass}};
    return finish_check(report, c.pass, a.out, "dual-norm", out, err);
}

struct GroupingExtra {
    Index n = 100;
    double rho = 0.5;
    double snr = 1.0;
    double outlier_prob = 0.3;
};

int cmd_grouping(ModelArgs a, const GroupingExtra& x, std::ostream& out, std::ostream& err) {
    Prepared p;
    p.kind = model_from_string(a.model);
    if (p.kind != ModelKind::GwglLr && p.kind != ModelKind::GwglLg)
        throw InvalidArgument("--model: the grouping check covers gwgl-lr and gwgl-lg");
    p.loss = loss_for(a, p.kind);
    (void)grid_anchor_from_string(a.grid);
    check_output(a.out);
    std::string source;
    if (!a.data.empty()) {
        p = prepare(a);
        source = a.data;
    } else {
        SyntheticSpec spec;
        spec.n = x.n;
        spec.rho_w = x.rho;
        spec.snr = x.snr;
        spec.outlier_prob = x.outlier_prob;
        spec.binary = p.loss == Loss::Logloss;
        spec.seed = a.seed;
        p.data = generate_synthetic(spec);
        if (!a.no_standardize) p.data = standardize(p.data);
        if (a.groups.empty() && !a.auto_cluster) {
            p.groups = GroupStructure::contiguous(spec.group_sizes);
            p.group_source = "true";
        } else {
            attach_groups(p, a);
        }
        source = "synthetic";
    }
    if (!p.data.standardization)
        err << "warning: the bound assumes unit-norm columns; --no-standardize was given\n";

    FitResult f;
    if (a.epsilon_opt->count() > 0) {
        f = run_fit(p, a, a.epsilon);
    } else {
        const TuningReport rep = run_tuning(p, a);
        f = rep.refit;
    }
    report_fit(f, to_string(p.kind), err);
    if (!f.converged) throw Incomplete{"fit did not converge; the grouping bound needs a converged fit"};
    if (!(f.epsilon > 0.0)) throw InvalidArgument("--epsilon: the grouping bound needs epsilon > 0");
    const GroupingReport g = grouping_bound_check(f, p.data.X, p.groups, f.epsilon);
    json pairs = json::array();
    double worst = 0.0;
    for (const auto& pb : g.pairs) {
        pairs.push_back({{"i", pb.i},
                         {"j", pb.j},
                         {"correlation", pb.correlation},
                         {"difference", pb.difference},
                         {"bound", pb.bound},
                         {"pass", pb.pass}});
        if (pb.bound > 0.0) worst = std::max(worst, pb.difference / pb.bound);
    }
    const json report{{"check", "grouping"},
                      {"model", to_string(p.kind)},
                      {"data", source},
                      {"groups", groups_to_json(p.groups)},
                      {"group_source", p.group_source},
                      {"epsilon", f.epsilon},
                      {"seed", a.seed},
                      {"pairs_checked", g.pairs.size()},
                      {"notes", g.notes},
                      {"max_difference_over_bound", worst},
                      {"pairs", pairs},
                      {"pass", g.all_pass}};
    return finish_check(report, g.all_pass, a.out, "grouping", out, err);
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    std::string axis = "snr";
    std::vector<double> values;
    int datasets = 10;
    Index n = 100;
    Index n_test = 60;
    std::vector<Index> group_sizes{1, 3, 5, 7};
    double outlier_prob = 0.3;
    double fixed_snr = 1.0;
    std::string clusters;
    std::vector<std::string> methods{"gwgl-lr", "glasso-l2"};
    int grid_size = 50;
    std::string grid = "zero-threshold";
    std::uint64_t seed = 0;
    std::string out;
};

json sweep_record_json(const SweepRecord& r) {
    return json{{"point", r.point},
                {"dataset", r.dataset},
                {"method", method_name(r.method)},
                {"epsilon", r.epsilon},
                {"mad", r.mad},
                {"rr", r.scores.rr},
                {"rte", r.scores.rte},
                {"pve", r.scores.pve},
                {"converged", r.converged}};
}

int cmd_sweep(const SweepArgs& a, std::ostream& err) {
    SweepOptions o;
    o.axis = sweep_axis_from_string(a.axis);
    o.values = a.values.empty() ? (o.axis == SweepAxis::Snr ? default_snr_values() : default_rho_values())
                                : a.values;
    o.datasets = a.datasets;
    o.n_train = a.n;
    o.n_test = a.n_test;
    o.group_sizes = a.group_sizes;
    o.outlier_prob = a.outlier_prob;
    o.fixed_snr = a.fixed_snr;
    if (a.clusters == "true")
        o.use_true_groups = true;
    else if (a.clusters.empty())
        o.clusters = static_cast<int>(a.group_sizes.size());
    else
        o.clusters = parse_clusters(a.clusters);
    o.methods.clear();
    for (const auto& m : a.methods) {
        const ModelKind k = model_from_string(m);
        if (k == ModelKind::GwglLr)
            o.methods.push_back(Loss::Lad);
        else if (k == ModelKind::GlassoL2)
            o.methods.push_back(Loss::L2);
        else
            throw InvalidArgument("--methods: the regression sweep runs gwgl-lr and glasso-l2 only");
    }
    o.grid_size = a.grid_size;
    o.anchor = grid_anchor_from_string(a.grid);
    o.seed = a.seed;
    if (a.out.empty()) throw InvalidArgument("--out: sweep needs an output directory");
    fs::create_directories(a.out);

    const SweepResult r = run_sweep(o);
    const fs::path dir(a.out);
    const std::vector<std::pair<std::string, Direction>> metrics{
        {"mad", Direction::Minimize}, {"rr", Direction::Minimize}, {"rte", Direction::Minimize},
        {"pve", Direction::Maximize}};
    for (const auto& [metric, dirn] : metrics)
        write_file_atomic((dir / (metric + ".csv")).string(), sweep_table_csv(r, metric));

    json mpi_json{{"format", "gwgl-sweep-mpi"},
                  {"axis", to_string(o.axis)},
                  {"values", o.values},
                  {"reference_method", method_name(Loss::Lad)},
                  {"seed", a.seed}};
    json per_metric = json::object();
    const bool has_lad = std::find(o.methods.begin(), o.methods.end(), Loss::Lad) != o.methods.end();
    for (const auto& [metric, dirn] : metrics) {
        if (!has_lad || o.methods.size() < 2) {
            per_metric[metric] = nullptr;
            continue;
        }
        std::vector<double> ours;
        std::vector<std::vector<double>> others;
        for (std::size_t k = 0; k < o.values.size(); ++k) ours.push_back(r.median_metric(k, Loss::Lad, metric));
        for (Loss m : o.methods) {
            if (m == Loss::Lad) continue;
            std::vector<double> v;
            for (std::size_t k = 0; k < o.values.size(); ++k) v.push_back(r.median_metric(k, m, metric));
            others.push_back(std::move(v));
        }
        try {
            const MpiResult res = mpi(ours, others, dirn);
            per_metric[metric] = {{"direction", dirn == Direction::Minimize ? "minimize" : "maximize"},
                                  {"value", res.value},
                                  {"point", res.point},
                                  {"axis_value", o.values[static_cast<std::size_t>(res.point)]},
                                  {"warnings", res.warnings}};
        } catch (const NumericalError& e) {
            per_metric[metric] = nullptr;
            err << "warning: mpi for " << metric << ": " << e.what() << '\n';
        }
    }
    mpi_json["metrics"] = per_metric;
    write_json_file((dir / "mpi.json").string(), mpi_json);

    json records = json::array();
    for (const auto& rec : r.records) records.push_back(sweep_record_json(rec));
    json methods = json::array();
    for (Loss m : o.methods) methods.push_back(method_name(m));
    const json summary{{"format", "gwgl-sweep"},
                       {"axis", to_string(o.axis)},
                       {"values", o.values},
                       {"datasets", o.datasets},
                       {"n_train", o.n_train},
                       {"n_test", o.n_test},
                       {"group_sizes", o.group_sizes},
                       {"outlier_prob", o.outlier_prob},
                       {"fixed_snr", o.fixed_snr},
                       {"grouping", o.use_true_groups ? json("true")
                                                      : (o.clusters ? json(*o.clusters) : json("auto"))},
                       {"methods", methods},
                       {"grid_size", o.grid_size},
                       {"grid", to_string(o.anchor)},
                       {"seed", a.seed},
                       {"rng", kRngAlgorithm},
                       {"records", records},
                       {"warnings", r.warnings}};
    write_json_file((dir / "sweep.json").string(), summary);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    err << "sweep: " << o.values.size() << " points x " << o.datasets << " datasets -> " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Groupwise Wasserstein grouped LASSO: fitting, clustering and oracle checks", "gwgl"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Draw a synthetic grouped regression dataset");
    generate->add_option("--n", gen.n, "Rows")->capture_default_str();
    generate->add_option("--group-sizes", gen.group_sizes, "Comma-separated group sizes")->delimiter(',');
    generate->add_option("--rho", gen.rho, "Within-group correlation")->capture_default_str();
    gen.snr_opt = generate->add_option("--snr", gen.snr, "Signal-to-noise ratio")->capture_default_str();
    gen.sigma2_opt = generate->add_option("--sigma2", gen.sigma2, "Noise variance (instead of --snr)");
    gen.snr_opt->excludes(gen.sigma2_opt);
    generate->add_option("--outlier-prob", gen.outlier_prob, "Share of rows shifted by 5 sigma")
        ->capture_default_str();
    generate->add_flag("--rho-jitter", gen.rho_jitter, "Draw rho as 0.8 * U(0.2, 0.4)");
    generate->add_flag("--binary", gen.binary, "Report sign(y) labels");
    generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
    generate->add_option("-o,--out", gen.out, "CSV output path")->required();

    ClusterArgs cl;
    auto* cluster = app.add_subcommand("cluster", "Group predictors by spectral clustering");
    cluster->add_option("--data", cl.data, "CSV file")->required()->check(CLI::ExistingFile);
    cluster->add_option("--response", cl.response, "Response column (excluded)")->capture_default_str();
    cluster->add_option("--clusters", cl.clusters, "Number of groups or 'auto'")->capture_default_str();
    cluster->add_option("--knn", cl.knn, "Neighbours per node (smallest connected when omitted)");
    cluster->add_option("--sigma", cl.sigma, "Gaussian bandwidth (mean k-th neighbour distance when omitted)");
    cluster->add_option("--restarts", cl.restarts, "k-means restarts")->capture_default_str();
    cluster->add_flag("--no-standardize", cl.no_standardize, "Cluster the columns as given");
    cluster->add_option("--seed", cl.seed, "Seed")->capture_default_str();
    cluster->add_option("-o,--out", cl.out, "Group structure JSON");
    cluster->add_option("--diagnostics", cl.diagnostics, "Diagnostics JSON (next to --out by default)");

    ModelArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a grouped model");
    add_model_options(fit_cmd, fit_args, true);

    ModelArgs tune_args;
    TuneExtra tune_extra;
    auto* tune_cmd = app.add_subcommand("tune", "Tune epsilon on a validation split");
    add_model_options(tune_cmd, tune_args, true);
    tune_cmd->add_option("--table", tune_extra.table, "CSV table of the grid (next to --out by default)");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score a fitted model on a dataset");
    evaluate->add_option("--model", ev.model, "Model JSON from fit")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--data", ev.data, "CSV file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--meta", ev.meta, "Dataset metadata with ground truth (DATA.meta.json by default)")
        ->check(CLI::ExistingFile);
    evaluate->add_option("-o,--out", ev.out, "Report JSON");

    auto* oracle = app.add_subcommand("oracle-check", "Numerical checks of the theory");
    oracle->require_subcommand(1);

    MixtureArgs mix;
    auto* mixture = oracle->add_subcommand("mixture", "Wasserstein ratio of a mixture against (1-q)/q");
    mixture->add_option("--q", mix.q, "Outlier share in (0, 1)")->required();
    mixture->add_option("--trials", mix.trials, "Random distribution pairs")->capture_default_str();
    mixture->add_option("--support", mix.support, "Largest support size")->capture_default_str();
    mixture->add_option("--dim", mix.dim, "Support dimension")->capture_default_str();
    mixture->add_option("--seed", mix.seed, "Seed")->capture_default_str();
    mixture->add_option("-o,--out", mix.out, "Report JSON");

    DroArgs dro;
    auto* dro_cmd = oracle->add_subcommand("dro-bound", "Worst-case loss against the regularized objective");
    dro_cmd->add_option("--trials", dro.trials, "Random instances per loss")->capture_default_str();
    dro_cmd->add_option("--loss", dro.loss, "lad | logloss | both")->capture_default_str();
    dro_cmd->add_option("--seed", dro.seed, "Seed")->capture_default_str();
    dro_cmd->add_option("-o,--out", dro.out, "Report JSON");

    DualArgs dual;
    auto* dual_cmd = oracle->add_subcommand("dual-norm", "Dual group norm against explicit maximizers");
    dual_cmd->add_option("--trials", dual.trials, "Random vectors")->capture_default_str();
    dual_cmd->add_option("--max-dim", dual.max_dim, "Largest dimension")->capture_default_str();
    dual_cmd->add_option("--seed", dual.seed, "Seed")->capture_default_str();
    dual_cmd->add_option("-o,--out", dual.out, "Report JSON");

    ModelArgs grp_args;
    GroupingExtra grp_extra;
    auto* grouping = oracle->add_subcommand("grouping", "Grouping-effect bound on a fitted model");
    add_model_options(grouping, grp_args, false);
    grouping->add_option("--n", grp_extra.n, "Synthetic rows when --data is omitted")->capture_default_str();
    grouping->add_option("--rho", grp_extra.rho, "Synthetic within-group correlation")->capture_default_str();
    grouping->add_option("--snr", grp_extra.snr, "Synthetic SNR")->capture_default_str();
    grouping->add_option("--outlier-prob", grp_extra.outlier_prob, "Synthetic outlier share")
        ->capture_default_str();

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "SNR / rho_w experiment tables");
    sweep->add_option("--axis", sw.axis, "snr | rho")->capture_default_str();
    sweep->add_option("--values", sw.values, "Comma-separated sweep values")->delimiter(',');
    sweep->add_option("--datasets", sw.datasets, "Datasets per sweep value")->capture_default_str();
    sweep->add_option("--n", sw.n, "Training rows")->capture_default_str();
    sweep->add_option("--n-test", sw.n_test, "Test rows")->capture_default_str();
    sweep->add_option("--group-sizes", sw.group_sizes, "Comma-separated group sizes")->delimiter(',');
    sweep->add_option("--outlier-prob", sw.outlier_prob, "Share of outlying responses")->capture_default_str();
    sweep->add_option("--fixed-snr", sw.fixed_snr, "SNR on the rho axis")->capture_default_str();
    sweep->add_option("--clusters", sw.clusters,
                      "Spectral groups: a count, 'auto', or 'true' for the planted groups "
                      "(default: number of planted groups)");
    sweep->add_option("--methods", sw.methods, "gwgl-lr,glasso-l2")->delimiter(',');
    sweep->add_option("--grid-size", sw.grid_size, "Tuning grid length")->capture_default_str();
    sweep->add_option("--grid", sw.grid, "Tuning grid anchor: zero-threshold | max-correlation")->capture_default_str();
    sweep->add_option("--seed", sw.seed, "Seed")->capture_default_str();
    sweep->add_option("-o,--out", sw.out, "Output directory")->required();

    std::vector<std::string> storage{"gwgl"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen, err);
        if (cluster->parsed()) return cmd_cluster(cl, out, err);
        if (fit_cmd->parsed()) return cmd_fit(fit_args, out, err);
        if (tune_cmd->parsed()) return cmd_tune(tune_args, tune_extra, out, err);
        if (evaluate->parsed()) return cmd_evaluate(ev, out, err);
        if (mixture->parsed()) return cmd_mixture(mix, out, err);
        if (dro_cmd->parsed()) return cmd_dro(dro, out, err);
        if (dual_cmd->parsed()) return cmd_dual(dual, out, err);
        if (grouping->parsed()) return cmd_grouping(grp_args, grp_extra, out, err);
        if (sweep->parsed()) return cmd_sweep(sw, err);
    } catch (const Incomplete& e) {
        err << "error: " << e.message << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        err << "error: malformed JSON input: " << e.what() << '\n';
        return kExitUsage;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace gwgl::cli
