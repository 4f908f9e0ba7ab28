// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "gwgl/cli.hpp"
#include "gwgl/clustering.hpp"
#include "gwgl/data.hpp"
#include "gwgl/metrics.hpp"
#include "gwgl/norms.hpp"
#include "gwgl/ot.hpp"
#include "gwgl/solvers.hpp"
#include "gwgl/sweep.hpp"
#include "gwgl/tuning.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gwgl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = limit_s <= 0.0 || secs < limit_s;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    char timing[96];
    if (limit_s > 0.0)
        std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", secs, limit_s);
    else
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::printf("%s  %2d. %s: %s; %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(), timing);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

DiscreteDistribution random_distribution(Index k, Index dim, std::mt19937_64& rng) {
    DiscreteDistribution d;
    d.support = testutil::gaussian(k, dim, rng);
    d.probs.resize(k);
    for (Index i = 0; i < k; ++i) d.probs[i] = testutil::uniform(0.1, 1.0, rng);
    d.probs /= d.probs.sum();
    d.probs[k - 1] = 1.0 - d.probs.head(k - 1).sum();
    return d;
}

GroupStructure random_partition(Index p, std::mt19937_64& rng) {
    std::vector<Index> sizes;
    for (Index left = p; left > 0;) {
        const Index s = testutil::uniform_int(1, static_cast<int>(left), rng);
        sizes.push_back(s);
        left -= s;
    }
    return GroupStructure::contiguous(sizes);
}

double pick_exponent(std::mt19937_64& rng) {
    static const double choices[] = {1.0, 1.5, 2.0, 3.0, kInf};
    return choices[testutil::uniform_int(0, 4, rng)];
}

double penalty(const Eigen::VectorXd& b, const std::vector<std::vector<Index>>& groups,
               const Eigen::VectorXd& w) {
    double pen = 0.0;
    for (std::size_t l = 0; l < groups.size(); ++l) {
        double sq = 0.0;
        for (Index j : groups[l]) sq += b[j] * b[j];
        pen += w[static_cast<Index>(l)] * std::sqrt(sq);
    }
    return pen;
}

double mean_loss(const Eigen::VectorXd& b, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Loss loss) {
    const Eigen::VectorXd u = X * b;
    double total = 0.0;
    for (Index i = 0; i < X.rows(); ++i) {
        if (loss == Loss::Lad) total += std::abs(y[i] - u[i]);
        if (loss == Loss::Logloss) total += std::log1p(std::exp(-y[i] * u[i]));
        if (loss == Loss::L2) total += (y[i] - u[i]) * (y[i] - u[i]);
    }
    return total / static_cast<double>(X.rows());
}

Eigen::VectorXd mean_gradient(const Eigen::VectorXd& b, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              Loss loss) {
    const Eigen::VectorXd u = X * b;
    Eigen::VectorXd r(X.rows());
    for (Index i = 0; i < X.rows(); ++i)
        r[i] = loss == Loss::Logloss ? -y[i] / (1.0 + std::exp(y[i] * u[i])) : -2.0 * (y[i] - u[i]);
    return X.transpose() * r / static_cast<double>(X.rows());
}

// Largest violation of the block subdifferential conditions.
double certificate(const Eigen::VectorXd& b, const Eigen::VectorXd& grad, const GroupStructure& s, double eps) {
    double worst = 0.0;
    for (const auto& g : s.groups) {
        const double w = eps * std::sqrt(static_cast<double>(g.size()));
        double bn = 0.0;
        for (Index j : g) bn += b[j] * b[j];
        bn = std::sqrt(bn);
        double viol = 0.0;
        if (bn < 1e-12) {
            double gn = 0.0;
            for (Index j : g) gn += grad[j] * grad[j];
            viol = std::max(0.0, std::sqrt(gn) - w);
        } else {
            for (Index j : g) viol += std::pow(grad[j] + w * b[j] / bn, 2);
            viol = std::sqrt(viol);
        }
        worst = std::max(worst, viol);
    }
    return worst;
}

std::vector<std::vector<Index>> canonical(const GroupStructure& s) {
    auto g = s.groups;
    for (auto& x : g) std::sort(x.begin(), x.end());
    std::sort(g.begin(), g.end());
    return g;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Criterion 4's fleet, shared with criterion 6.
struct FleetEntry {
    Loss loss;
    bool latent;
    double certificate;
};
std::vector<FleetEntry> fleet;

}  // namespace

int main() {
    std::printf("Acceptance criteria (GWGL_THREADS=%s)\n", std::getenv("GWGL_THREADS") ? std::getenv("GWGL_THREADS") : "unset");

    report(1, "Wasserstein mixture ratio equals (1-q)/q", 10.0, [] {
        std::mt19937_64 rng(101);
        const auto metric = GroundMetric::lp(2.0);
        double worst = 0.0;
        int count = 0;
        for (int pair = 0; pair < 100; ++pair) {
            const Index dim = testutil::uniform_int(1, 4, rng);
            const auto P = random_distribution(testutil::uniform_int(1, 10, rng), dim, rng);
            const auto Q = random_distribution(testutil::uniform_int(1, 10, rng), dim, rng);
            for (int k = 1; k <= 9; ++k) {
                const double q = 0.1 * k;
                worst = std::max(worst, std::abs(mixture_ratio(P, Q, q, metric) - (1.0 - q) / q));
                ++count;
            }
        }
        return Verdict{worst <= 1e-9, std::to_string(count) + " ratios, max error " + fmt("%.3g", worst) +
                                          " (tol 1e-9)"};
    });

    report(2, "Dual group norm matches the per-group maximizer", 5.0, [] {
        std::mt19937_64 rng(202);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const Index p = testutil::uniform_int(1, 12, rng);
            const GroupStructure s = random_partition(p, rng);
            WeightedGroupNorm norm;
            const bool metric_norm = trial % 4 == 0;
            if (metric_norm) {
                norm = WeightedGroupNorm::gwgl_metric(s);
            } else {
                norm.q = pick_exponent(rng);
                norm.t = pick_exponent(rng);
                norm.weights.resize(static_cast<Index>(s.num_groups()));
                for (Index l = 0; l < norm.weights.size(); ++l) norm.weights[l] = testutil::uniform(0.2, 3.0, rng);
            }
            const Eigen::VectorXd v = testutil::gaussian(p, rng);
            const Eigen::VectorXd z = oracle::dual_norm_maximizer(v, s.groups, norm.weights, norm.q, norm.t);
            const double expect = v.dot(z) / oracle::group_norm(z, s.groups, norm.weights, norm.q, norm.t);
            worst = std::max(worst, std::abs(dual_norm_group(v, s, norm) - expect));
        }
        return Verdict{worst <= 1e-9, "1000 vectors, max error " + fmt("%.3g", worst) + " (tol 1e-9)"};
    });

    report(3, "Worst-case DRO loss stays below the regularized objective", 30.0, [] {
        std::mt19937_64 rng(303);
        double worst = -kInf;
        int count = 0;
        for (Loss loss : {Loss::Lad, Loss::Logloss}) {
            for (int trial = 0; trial < 200; ++trial) {
                const Index p = testutil::uniform_int(1, 3, rng);
                const Index n = testutil::uniform_int(1, 3, rng);
                const Index extra = testutil::uniform_int(0, 6 - static_cast<int>(n), rng);
                const GroupStructure s = random_partition(p, rng);
                Eigen::MatrixXd support(n + extra, p + 1);
                support.leftCols(p) = testutil::gaussian(n + extra, p, rng);
                for (Index i = 0; i < n + extra; ++i)
                    support(i, p) = loss == Loss::Lad ? testutil::gaussian(1, rng)[0]
                                                      : (testutil::uniform_int(0, 1, rng) ? 1.0 : -1.0);
                const Eigen::MatrixXd samples = support.topRows(n);
                const Eigen::VectorXd beta = testutil::gaussian(p, rng);
                const double eps = testutil::uniform(0.0, 1.0, rng);
                const Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Index>(s.num_groups()));
                Eigen::VectorXd rootp(static_cast<Index>(s.num_groups()));
                for (std::size_t l = 0; l < s.num_groups(); ++l)
                    rootp[static_cast<Index>(l)] = std::sqrt(static_cast<double>(s.groups[l].size()));
                double bound = 0.0, worst_case = 0.0;
                const Eigen::MatrixXd Xs = samples.leftCols(p);
                const Eigen::VectorXd ys = samples.col(p);
                if (loss == Loss::Lad) {
                    const double M = testutil::uniform(0.5, 5.0, rng);
                    worst_case = dro_worstcase(samples, beta, eps, support, loss, gwgl_regression_metric(s, M)).worst_case;
                    // Dual norm of (-beta, 1): sum_l sqrt(p_l)||beta^l|| + 1/M.
                    bound = mean_loss(beta, Xs, ys, loss) + eps * (penalty(beta, s.groups, rootp) + 1.0 / M);
                } else {
                    worst_case = dro_worstcase(samples, beta, eps, support, loss, gwgl_classification_metric(s)).worst_case;
                    bound = mean_loss(beta, Xs, ys, loss) + eps * penalty(beta, s.groups, rootp);
                }
                worst = std::max(worst, worst_case - bound);
                ++count;
            }
        }
        return Verdict{worst <= 1e-8, std::to_string(count) + " instances (lad + logloss), max excess " +
                                          fmt("%.3g", worst) + " (tol 1e-8)"};
    });

    report(4, "Solvers match derivative-free reference minimizers", 120.0, [] {
        std::mt19937_64 rng(404);
        double worst = 0.0;
        int count = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const Index p = testutil::uniform_int(2, 4, rng);
            const Index n = testutil::uniform_int(8, 15, rng);
            const GroupStructure s = random_partition(p, rng);
            Eigen::VectorXd rootp(static_cast<Index>(s.num_groups()));
            for (std::size_t l = 0; l < s.num_groups(); ++l)
                rootp[static_cast<Index>(l)] = std::sqrt(static_cast<double>(s.groups[l].size()));
            const Eigen::MatrixXd X = testutil::gaussian(n, p, rng);
            const Eigen::VectorXd y = X * testutil::gaussian(p, rng) + testutil::gaussian(n, rng);
            Eigen::VectorXd labels(n);
            for (Index i = 0; i < n; ++i) labels[i] = testutil::uniform_int(0, 1, rng) ? 1.0 : -1.0;
            const double eps = testutil::uniform(0.02, 0.3, rng);

            for (Loss loss : {Loss::Lad, Loss::Logloss, Loss::L2}) {
                const Eigen::VectorXd& yy = loss == Loss::Logloss ? labels : y;
                const FitResult f = fit(X, yy, s, eps, loss, {});
                const double ref = oracle::minimize(
                    [&](const Eigen::VectorXd& b) { return mean_loss(b, X, yy, loss) + eps * penalty(b, s.groups, rootp); },
                    p, static_cast<unsigned>(trial + 1));
                worst = std::max(worst, std::abs(f.objective - ref));
                if (loss != Loss::Lad)
                    fleet.push_back({loss, false, certificate(f.beta, mean_gradient(f.beta, X, yy, loss), s, eps)});
                ++count;
            }

            // Latent overlap: two groups sharing one coordinate.
            GroupStructure ov{p, {}, true};
            std::vector<Index> first, second;
            for (Index j = 0; j < p; ++j) {
                if (j <= p / 2) first.push_back(j);
                if (j >= p / 2) second.push_back(j);
            }
            ov.groups = {first, second};
            const Eigen::Vector2d d(testutil::uniform(0.5, 2.0, rng), testutil::uniform(0.5, 2.0, rng));
            const Loss lloss = trial % 2 == 0 ? Loss::Lad : Loss::L2;
            const FitResult lf = fit_latent_overlap(X, y, ov, d, eps, lloss, {});
            const Index dim = static_cast<Index>(first.size() + second.size());
            auto latent_obj = [&](const Eigen::VectorXd& v) {
                Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
                Index k = 0;
                double pen = 0.0;
                for (std::size_t l = 0; l < 2; ++l) {
                    double sq = 0.0;
                    for (Index j : ov.groups[l]) {
                        beta[j] += v[k];
                        sq += v[k] * v[k];
                        ++k;
                    }
                    pen += d[static_cast<Index>(l)] * std::sqrt(sq);
                }
                return mean_loss(beta, X, y, lloss) + eps * pen;
            };
            const double lref = oracle::minimize(latent_obj, dim, static_cast<unsigned>(trial + 101));
            worst = std::max(worst, std::abs(lf.objective - lref));
            ++count;
        }
        return Verdict{worst <= 1e-5, std::to_string(count) + " fits (gwgl-lr, gwgl-lg, glasso-l2, latent-overlap), "
                                      "max |objective - reference| " + fmt("%.3g", worst) + " (tol 1e-5)"};
    });

    report(5, "Grouping effect bound on synthetic fits", 300.0, [] {
        int fits = 0, pairs = 0, failed = 0;
        std::string first_failure;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            for (Loss loss : {Loss::Lad, Loss::Logloss}) {
                SyntheticSpec spec;
                spec.snr = 1.0;
                spec.rho_w = 0.1 + 0.8 * static_cast<double>(seed % 9) / 8.0;
                spec.outlier_prob = loss == Loss::Lad ? 0.3 : 0.0;
                spec.binary = loss == Loss::Logloss;
                spec.n = 100;
                spec.seed = 5000 + seed;
                const Dataset d = standardize(generate_synthetic(spec));
                const auto s = GroupStructure::contiguous(spec.group_sizes);
                const Eigen::VectorXd grid =
                    anchored_grid(zero_threshold(d.X, d.y, s, loss), grid_kind_for(loss), 50);
                const double eps = grid[static_cast<Index>((seed * 7) % 50)];
                const FitResult f = fit(d.X, d.y, s, eps, loss, {});
                ++fits;
                if (!f.converged) {
                    ++failed;
                    if (first_failure.empty()) first_failure = "seed " + std::to_string(seed) + " did not converge";
                    continue;
                }
                const GroupingReport g = grouping_bound_check(f, d.X, s, eps);
                pairs += static_cast<int>(g.pairs.size());
                for (const auto& pb : g.pairs)
                    if (!pb.pass) {
                        ++failed;
                        if (first_failure.empty())
                            first_failure = "seed " + std::to_string(seed) + " pair (" + std::to_string(pb.i) + "," +
                                            std::to_string(pb.j) + ")";
                    }
            }
        }
        // Duplicated column inside a group.
        double dup_gap = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed)
            for (Loss loss : {Loss::Lad, Loss::Logloss}) {
                SyntheticSpec spec;
                spec.snr = 2.0;
                spec.rho_w = 0.5;
                spec.binary = loss == Loss::Logloss;
                spec.seed = 9000 + seed;
                Dataset d = standardize(generate_synthetic(spec));
                d.X.col(2) = d.X.col(1);  // both in the second group
                const auto s = GroupStructure::contiguous(spec.group_sizes);
                const double eps = 0.2 * zero_threshold(d.X, d.y, s, loss);
                const FitResult f = fit(d.X, d.y, s, eps, loss, {});
                dup_gap = std::max(dup_gap, std::abs(f.beta[1] - f.beta[2]));
            }
        const bool pass = failed == 0 && dup_gap <= 1e-6;
        std::string detail = std::to_string(fits) + " fits, " + std::to_string(pairs) + " pairs, " +
                             std::to_string(failed) + " violations; duplicated column max |b_i - b_j| " +
                             fmt("%.3g", dup_gap) + " (tol 1e-6)";
        if (!first_failure.empty()) detail += "; first: " + first_failure;
        return Verdict{pass, detail};
    });

    report(6, "Block optimality certificates on the criterion-4 fleet", 0.0, [] {
        double worst = 0.0;
        for (const auto& e : fleet) worst = std::max(worst, e.certificate);
        return Verdict{!fleet.empty() && worst <= 1e-4,
                       std::to_string(fleet.size()) + " gwgl-lg / glasso-l2 solutions, max residual " +
                           fmt("%.3g", worst) + " (tol 1e-4)"};
    });

    report(7, "Figure-1 trend: GWGL-LR vs l2 GLASSO over SNR", 900.0, [] {
        SweepOptions o;
        o.values = default_snr_values(8);
        o.datasets = 10;
        o.n_train = 100;
        o.outlier_prob = 0.3;
        o.group_sizes = {1, 3, 5, 7};
        o.clusters = 4;
        o.seed = 0;
        const SweepResult r = run_sweep(o);
        std::vector<double> lad, l2;
        int wins = 0;
        for (std::size_t k = 0; k < o.values.size(); ++k) {
            lad.push_back(r.median_metric(k, Loss::Lad, "mad"));
            l2.push_back(r.median_metric(k, Loss::L2, "mad"));
            wins += lad.back() < l2.back();
        }
        const double rho_lad = spearman(o.values, lad), rho_l2 = spearman(o.values, l2);
        const bool pass = wins >= 6 && rho_lad < -0.8 && rho_l2 < -0.8;
        return Verdict{pass, "GWGL-LR below l2 at " + std::to_string(wins) + "/8 SNR points (need 6), Spearman " +
                                 fmt("%.3f", rho_lad) + " / " + fmt("%.3f", rho_l2) + " (need < -0.8)"};
    });

    report(8, "Spectral clustering recovers a planted 4-block design", 60.0, [] {
        const std::vector<Index> sizes{4, 4, 4, 4};
        int exact = 0, gap = 0, legacy = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            SyntheticSpec spec;
            spec.group_sizes = sizes;
            spec.rho_w = 0.9;
            spec.sigma2 = 1.0;
            spec.n = 100;
            spec.seed = seed;
            const Eigen::MatrixXd X = standardize(generate_synthetic(spec)).X;
            ClusteringConfig cfg;
            cfg.n_clusters = 4;
            cfg.seed = seed;
            exact += canonical(cluster_predictors(X, cfg).groups) == canonical(GroupStructure::contiguous(sizes));
            ClusteringConfig autoc;
            autoc.seed = seed;
            gap += cluster_predictors(X, autoc).clusters == 4;

            spec.group_sizes = {1, 3, 5, 7};
            const Eigen::MatrixXd X2 = standardize(generate_synthetic(spec)).X;
            legacy += canonical(cluster_predictors(X2, cfg).groups) ==
                      canonical(GroupStructure::contiguous(spec.group_sizes));
        }
        int population = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            SyntheticSpec spec;
            spec.group_sizes = sizes;
            spec.rho_w = 0.9;
            spec.sigma2 = 1.0;
            spec.n = 100;
            spec.seed = seed;
            ClusteringConfig autoc;
            autoc.seed = seed;
            population += cluster_predictors(standardize(generate_synthetic(spec)).X, autoc).clusters == 4;
        }
        return Verdict{exact >= 9 && gap >= 9,
                       "blocks (4,4,4,4): exact recovery " + std::to_string(exact) + "/10, eigengap picks 4 in " +
                           std::to_string(gap) + "/10 (need 9 each); info: eigengap picks 4 in " + std::to_string(population) +
                           "/200 seeds, sizes (1,3,5,7) recovered " +
                           std::to_string(legacy) + "/10"};
    });

    report(9, "Oracle score identities", 0.0, [] {
        std::mt19937_64 rng(909);
        bool exact = true;
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const Index p = testutil::uniform_int(1, 8, rng);
            const Eigen::MatrixXd A = testutil::gaussian(p, p, rng);
            const Eigen::MatrixXd cov = A * A.transpose() + 0.05 * Eigen::MatrixXd::Identity(p, p);
            const Eigen::VectorXd bs = testutil::gaussian(p, rng), bh = testutil::gaussian(p, rng);
            const double sigma2 = testutil::uniform(0.1, 10.0, rng);
            const OracleScores s = oracle_scores(bh, bs, cov, sigma2);
            const OracleScores at_star = oracle_scores(bs, bs, cov, sigma2);
            const OracleScores at_zero = oracle_scores(Eigen::VectorXd::Zero(p), bs, cov, sigma2);
            exact = exact && at_star.rr == 0.0 && at_star.rte == 1.0 && at_zero.pve == 0.0;
            const double signal = bs.dot(cov * bs);
            const double rte = s.rr * signal / sigma2 + 1.0;
            const double pve = 1.0 - s.rte * sigma2 / (signal + sigma2);
            worst = std::max(worst, std::abs(s.rte - rte) / std::max(1.0, std::abs(rte)));
            worst = std::max(worst, std::abs(s.pve - pve) / std::max(1.0, std::abs(pve)));
        }
        return Verdict{exact && worst <= 1e-10, std::string("exact values ") + (exact ? "hold" : "VIOLATED") +
                                                    ", max identity error " + fmt("%.3g", worst) + " (tol 1e-10)"};
    });

    report(10, "CLI reports are byte-identical across runs", 0.0, [] {
        const fs::path dir = fs::temp_directory_path() / ("gwgl_accept_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        const std::string data = (dir / "data.csv").string();
        const std::string model = (dir / "model.json").string();
        std::ostringstream sink;
        auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
        if (run({"generate", "--seed", "11", "--rho", "0.5", "--outlier-prob", "0.3", "-o", data}) != 0)
            return Verdict{false, "generate failed"};
        if (run({"fit", "--data", data, "--auto-cluster", "--tune", "--seed", "3", "-o", model}) != 0)
            return Verdict{false, "fit failed"};

        struct Case {
            std::string name;
            std::vector<std::string> args;
            std::vector<std::string> files;  // relative to the run's output target
            bool directory = false;
        };
        const std::vector<Case> cases{
            {"generate", {"generate", "--seed", "11", "--rho", "0.5"}, {"", ".meta.json"}},
            {"cluster", {"cluster", "--data", data, "--seed", "3"}, {""}},
            {"fit", {"fit", "--data", data, "--auto-cluster", "--tune", "--seed", "3"}, {""}},
            {"tune", {"tune", "--model", "glasso-l2", "--data", data, "--auto-cluster", "--seed", "3"}, {""}},
            {"evaluate", {"evaluate", "--model", model, "--data", data}, {""}},
            {"oracle-check mixture", {"oracle-check", "mixture", "--q", "0.2", "--trials", "5", "--seed", "1"}, {""}},
            {"oracle-check dro-bound", {"oracle-check", "dro-bound", "--trials", "50", "--seed", "1"}, {""}},
            {"oracle-check dual-norm", {"oracle-check", "dual-norm", "--seed", "1"}, {""}},
            {"oracle-check grouping", {"oracle-check", "grouping", "--seed", "1"}, {""}},
            {"sweep",
             {"sweep", "--datasets", "2", "--values", "0.5,1,2", "--seed", "1"},
             {"mad.csv", "rr.csv", "rte.csv", "pve.csv", "mpi.json", "sweep.json"},
             true},
        };
        int identical = 0;
        std::string mismatch;
        for (std::size_t c = 0; c < cases.size(); ++c) {
            std::vector<std::string> outputs[2];
            for (int rep = 0; rep < 2; ++rep) {
                const fs::path target = dir / ("out" + std::to_string(c) + "_" + std::to_string(rep) +
                                               (cases[c].directory ? "" : ".json"));
                auto args = cases[c].args;
                args.insert(args.end(), {"-o", target.string()});
                if (run(args) != 0) return Verdict{false, cases[c].name + " failed"};
                for (const auto& f : cases[c].files)
                    outputs[rep].push_back(slurp(cases[c].directory ? target / f : fs::path(target.string() + f)));
            }
            if (outputs[0] == outputs[1])
                ++identical;
            else if (mismatch.empty())
                mismatch = cases[c].name;
        }
        fs::remove_all(dir);
        std::string detail = std::to_string(identical) + "/" + std::to_string(cases.size()) +
                             " subcommands identical";
        if (!mismatch.empty()) detail += "; first difference: " + mismatch;
        return Verdict{identical == static_cast<int>(cases.size()), detail};
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
