#include "gwgl/sweep.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gwgl/clustering.hpp"
#include "gwgl/error.hpp"
#include "gwgl/parallel.hpp"
#include "gwgl/tuning.hpp"

namespace gwgl {

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(stream), 0x5eedu};
    std::mt19937_64 rng(seq);
    return rng();
}

double pick(const OracleScores& s, const std::string& metric, int which) {
    // which: 0 fitted, 1 ideal, 2 null
    if (metric == "rr") return which == 0 ? s.rr : which == 1 ? s.ideal_rr : s.null_rr;
    if (metric == "rte") return which == 0 ? s.rte : which == 1 ? s.ideal_rte : s.null_rte;
    if (metric == "pve") return which == 0 ? s.pve : which == 1 ? s.ideal_pve : s.null_pve;
    throw InvalidArgument("unknown metric '" + metric + "'");
}

std::string format(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

std::string to_string(SweepAxis axis) { return axis == SweepAxis::Snr ? "snr" : "rho"; }

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "snr") return SweepAxis::Snr;
    if (name == "rho") return SweepAxis::Rho;
    throw InvalidArgument("unknown sweep axis '" + name + "' (expected snr or rho)");
}

std::vector<double> default_snr_values(int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    const double lo = std::log(0.5), hi = std::log(2.0);
    for (int k = 0; k < count; ++k)
        v[static_cast<std::size_t>(k)] =
            count == 1 ? 0.5 : std::exp(lo + (hi - lo) * k / static_cast<double>(count - 1));
    return v;
}

std::vector<double> default_rho_values() {
    std::vector<double> v;
    for (int k = 1; k <= 9; ++k) v.push_back(k / 10.0);
    return v;
}

std::string method_name(Loss loss) {
    switch (loss) {
        case Loss::Lad: return "gwgl-lr";
        case Loss::Logloss: return "gwgl-lg";
        case Loss::L2: return "glasso-l2";
    }
    return "unknown";
}

double SweepResult::median_metric(std::size_t point, Loss method, const std::string& metric) const {
    std::vector<double> v;
    for (const auto& r : records) {
        if (r.point != point || r.method != method) continue;
        v.push_back(metric == "mad" ? r.mad : pick(r.scores, metric, 0));
    }
    return median(std::move(v));
}

double SweepResult::median_reference(std::size_t point, const std::string& reference,
                                     const std::string& metric) const {
    const int which = reference == "ideal" ? 1 : reference == "null" ? 2 : -1;
    if (which < 0) throw InvalidArgument("reference must be ideal or null");
    std::vector<double> v;
    // References do not depend on the method; use the first method's rows.
    const Loss first = options.methods.front();
    for (const auto& r : records)
        if (r.point == point && r.method == first) v.push_back(pick(r.scores, metric, which));
    return median(std::move(v));
}

SweepResult run_sweep(const SweepOptions& options) {
    if (options.values.empty()) throw InvalidArgument("sweep needs at least one axis value");
    if (options.datasets < 1) throw InvalidArgument("sweep needs at least one dataset");
    if (options.methods.empty()) throw InvalidArgument("sweep needs at least one method");
    for (Loss m : options.methods)
        if (m == Loss::Logloss) throw InvalidArgument("the regression sweep takes lad and l2 methods");

    const std::size_t points = options.values.size();
    const auto datasets = static_cast<std::size_t>(options.datasets);
    const std::size_t methods = options.methods.size();
    std::vector<SweepRecord> records(points * datasets * methods);
    std::vector<std::string> notes(points * datasets);

    parallel_for(points * datasets, [&](std::size_t task) {
        const std::size_t point = task / datasets;
        const std::size_t ds = task % datasets;

        SyntheticSpec spec;
        spec.group_sizes = options.group_sizes;
        spec.outlier_prob = options.outlier_prob;
        spec.n = options.n_train + options.n_test;
        // The same draws at every sweep point, so the axis is the only change.
        spec.seed = derive_seed(options.seed, ds);
        if (options.axis == SweepAxis::Snr) {
            spec.snr = options.values[point];
            spec.rho_jitter = RhoJitter{};
        } else {
            spec.snr = options.fixed_snr;
            spec.rho_w = options.values[point];
        }
        const Dataset all = generate_synthetic(spec);
        std::vector<Index> train_rows(static_cast<std::size_t>(options.n_train));
        std::iota(train_rows.begin(), train_rows.end(), Index{0});
        std::vector<Index> test_rows(static_cast<std::size_t>(options.n_test));
        std::iota(test_rows.begin(), test_rows.end(), options.n_train);
        const Dataset train = standardize(all.take_rows(train_rows));
        const Dataset test = apply_standardization(all.take_rows(test_rows), *train.standardization);

        GroupStructure groups;
        if (options.use_true_groups) {
            groups = GroupStructure::contiguous(options.group_sizes);
        } else {
            ClusteringConfig cc;
            cc.n_clusters = options.clusters;
            cc.seed = spec.seed;
            groups = cluster_predictors(train.X, cc).groups;
        }

        for (std::size_t m = 0; m < methods; ++m) {
            TuningOptions topt;
            topt.grid_size = options.grid_size;
            topt.anchor = options.anchor;
            topt.split_seed = spec.seed;
            topt.fit = options.fit;
            const TuningReport rep = tune_epsilon(train, groups, options.methods[m], topt);

            SweepRecord& rec = records[task * methods + m];
            rec.point = point;
            rec.dataset = static_cast<int>(ds);
            rec.method = options.methods[m];
            rec.epsilon = rep.chosen_epsilon;
            rec.converged = rep.refit.converged;
            rec.mad = mad(test.y, test.X * rep.refit.beta);
            rec.scores = oracle_scores(train.standardization->original_coefficients(rep.refit.beta),
                                       all.truth->beta, all.truth->covariance,
                                       all.truth->noise_variance);
            if (!rec.converged)
                notes[task] += method_name(rec.method) + " refit did not converge at point " +
                               std::to_string(point) + ", dataset " + std::to_string(ds) + "; ";
        }
    });

    SweepResult res;
    res.options = options;
    res.records = std::move(records);
    for (auto& n : notes)
        if (!n.empty()) res.warnings.push_back(n.substr(0, n.size() - 2));
    return res;
}

std::string sweep_table_csv(const SweepResult& result, const std::string& metric) {
    std::string out = to_string(result.options.axis) + ",method," + metric + "\n";
    for (std::size_t k = 0; k < result.options.values.size(); ++k) {
        const std::string x = format(result.options.values[k]);
        for (Loss m : result.options.methods)
            out += x + "," + method_name(m) + "," + format(result.median_metric(k, m, metric)) + "\n";
        if (metric != "mad") {
            out += x + ",ideal," + format(result.median_reference(k, "ideal", metric)) + "\n";
            out += x + ",null," + format(result.median_reference(k, "null", metric)) + "\n";
        }
    }
    return out;
}

}  // namespace gwgl
