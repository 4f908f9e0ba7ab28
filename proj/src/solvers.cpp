#include "gwgl/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gwgl/error.hpp"
#include "gwgl/norms.hpp"
#include "gwgl/prox.hpp"

namespace gwgl {

namespace {

constexpr int kWindow = 10;
constexpr double kZeroBlock = 1e-12;

// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
    if (margin > 0.0) return std::log1p(std::exp(-margin));
    return -margin + std::log1p(std::exp(margin));
}

void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() < 1) throw InvalidArgument("need at least one sample");
    if (X.rows() != y.size()) throw InvalidArgument("X and y have different numbers of rows");
    if (!X.allFinite()) throw InvalidArgument("X contains non-finite entries");
    if (!y.allFinite()) throw InvalidArgument("y contains non-finite entries");
}

void check_labels(const Eigen::VectorXd& y) {
    for (Index i = 0; i < y.size(); ++i)
        if (y[i] != 1.0 && y[i] != -1.0)
            throw InvalidArgument("label at row " + std::to_string(i) + " is not in {-1, +1}");
}

bool window_stalled(const std::vector<double>& trace, double tol) {
    if (trace.size() <= static_cast<std::size_t>(kWindow)) return false;
    const double now = trace.back();
    const double before = trace[trace.size() - 1 - kWindow];
    return std::abs(before - now) <= tol * std::max(1.0, std::abs(now));
}

double penalty(const Eigen::VectorXd& beta, const GroupStructure& blocks,
               const Eigen::VectorXd& weights) {
    return weighted_group_l2(beta, blocks, weights);
}

// Problem on a non-overlapping block structure with explicit group weights.
struct GroupProblem {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    const GroupStructure& blocks;
    Eigen::VectorXd weights;
    double lambda;
    Loss loss;

    double objective(const Eigen::VectorXd& beta) const {
        return empirical_loss(beta, X, y, loss) + lambda * penalty(beta, blocks, weights);
    }
};

FitResult solve_pdhg(const GroupProblem& prob, const FitConfig& cfg) {
    const Eigen::MatrixXd& X = prob.X;
    const Eigen::VectorXd& y = prob.y;
    const Index n = X.rows();
    const Index p = X.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    FitResult res;
    res.loss = Loss::Lad;
    res.epsilon = prob.lambda;
    res.beta = Eigen::VectorXd::Zero(p);

    const double norm = operator_norm(X, cfg.seed);
    if (norm == 0.0) {
        res.objective = prob.objective(res.beta);
        res.trace.push_back(res.objective);
        res.converged = true;
        return res;
    }
    // Dual variables live in the box |z_i| <= 1/N while the coefficients are
    // O(1); balancing the steps by sqrt(N) keeps both sides moving.
    const double ratio = std::sqrt(static_cast<double>(n));
    double tau = cfg.primal_step.value_or(0.99 * ratio / norm);
    double sigma = cfg.dual_step.value_or(0.99 / (ratio * norm));
    if (tau * sigma * norm * norm >= 1.0)
        throw InvalidArgument("PDHG steps violate tau*sigma*||X||^2 < 1");

    const Eigen::VectorXd thresholds = tau * prob.lambda * prob.weights;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd beta_bar = beta;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd best = beta;
    double best_obj = prob.objective(beta);
    res.trace.reserve(static_cast<std::size_t>(std::min(cfg.max_iters, 200000)));

    double gap = kInf;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        z.noalias() += sigma * (X * beta_bar - y);
        z = z.cwiseMax(-inv_n).cwiseMin(inv_n);

        Eigen::VectorXd next = beta - tau * (X.transpose() * z);
        prox_group_l2_inplace(next, thresholds, prob.blocks);
        beta_bar = 2.0 * next - beta;
        beta = std::move(next);

        const Eigen::VectorXd resid = y - X * beta;
        const double obj = resid.cwiseAbs().sum() * inv_n +
                           prob.lambda * penalty(beta, prob.blocks, prob.weights);
        res.trace.push_back(obj);
        if (obj < best_obj) {
            best_obj = obj;
            best = beta;
        }

        if ((it + 1) % kWindow != 0) continue;
        if (prob.lambda > 0.0) {
            // Scale z into the dual feasible set ||(X'z)^l|| <= lambda*w_l.
            const Eigen::VectorXd xz = X.transpose() * z;
            double scale = 1.0;
            for (std::size_t l = 0; l < prob.blocks.num_groups(); ++l) {
                double sq = 0.0;
                for (Index j : prob.blocks.groups[l]) sq += xz[j] * xz[j];
                const double bnorm = std::sqrt(sq);
                const double cap = prob.lambda * prob.weights[static_cast<Index>(l)];
                if (bnorm > cap) scale = std::min(scale, cap / bnorm);
            }
            const double dual = -scale * y.dot(z);
            gap = best_obj - dual;
            if (gap <= cfg.gap_tol * std::max(1.0, std::abs(best_obj)) &&
                window_stalled(res.trace, std::sqrt(cfg.tol))) {
                res.converged = true;
                ++it;
                break;
            }
        } else if (window_stalled(res.trace, cfg.tol)) {
            res.converged = true;
            ++it;
            break;
        }
    }
    res.iterations = it;
    res.beta = best;
    res.objective = prob.objective(best);
    res.certificate = gap;
    return res;
}

FitResult solve_apg(const GroupProblem& prob, const FitConfig& cfg) {
    const Eigen::MatrixXd& X = prob.X;
    const Index n = X.rows();
    const Index p = X.cols();

    FitResult res;
    res.loss = prob.loss;
    res.epsilon = prob.lambda;

    const double norm = operator_norm(X, cfg.seed);
    const double lip = prob.loss == Loss::Logloss
                           ? norm * norm / (4.0 * static_cast<double>(n))
                           : 2.0 * norm * norm / static_cast<double>(n);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
    double fx = prob.objective(x);
    res.trace.push_back(fx);
    if (lip == 0.0) {
        res.beta = x;
        res.objective = fx;
        res.converged = true;
        return res;
    }
    const double step = 1.0 / lip;
    const Eigen::VectorXd thresholds = step * prob.lambda * prob.weights;

    Eigen::VectorXd z = x;
    double t = 1.0;
    bool restarted = true;
    double cert = kInf;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        Eigen::VectorXd next = z - step * loss_gradient(z, X, prob.y, prob.loss);
        prox_group_l2_inplace(next, thresholds, prob.blocks);
        const double fnext = prob.objective(next);

        if (fnext > fx) {
            // Reject the extrapolated step and restart momentum from x.
            z = x;
            t = 1.0;
            if (restarted) {
                // A plain proximal step from x failed to descend: x is
                // stationary to machine precision.
                res.trace.push_back(fx);
            } else {
                restarted = true;
                res.trace.push_back(fx);
                continue;
            }
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            z = next + ((t - 1.0) / t_next) * (next - x);
            x = std::move(next);
            fx = fnext;
            t = t_next;
            restarted = false;
            res.trace.push_back(fx);
        }

        if (window_stalled(res.trace, cfg.tol)) {
            cert = block_optimality_residual(x, loss_gradient(x, X, prob.y, prob.loss),
                                             prob.blocks, prob.weights, prob.lambda);
            if (cert <= cfg.certificate_tol) {
                res.converged = true;
                ++it;
                break;
            }
        }
    }
    res.iterations = it;
    res.beta = x;
    res.objective = fx;
    if (!res.converged)
        cert = block_optimality_residual(x, loss_gradient(x, X, prob.y, prob.loss), prob.blocks,
                                         prob.weights, prob.lambda);
    res.certificate = cert;
    return res;
}

FitResult solve(const GroupProblem& prob, const FitConfig& cfg) {
    if (prob.loss == Loss::Lad) return solve_pdhg(prob, cfg);
    return solve_apg(prob, cfg);
}

void check_partition(const GroupStructure& structure, Index p) {
    require_valid(structure, p);
    if (structure.overlapping)
        throw InvalidArgument("overlapping structure: use the latent overlap solver");
}

}  // namespace

std::string to_string(Loss loss) {
    switch (loss) {
        case Loss::Lad: return "lad";
        case Loss::Logloss: return "logloss";
        case Loss::L2: return "l2";
    }
    return "unknown";
}

Loss loss_from_string(const std::string& name) {
    if (name == "lad") return Loss::Lad;
    if (name == "logloss") return Loss::Logloss;
    if (name == "l2") return Loss::L2;
    throw InvalidArgument("unknown loss '" + name + "' (expected lad, logloss or l2)");
}

void FitConfig::validate() const {
    if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
}

double loss_of_predictions(const Eigen::VectorXd& prediction, const Eigen::VectorXd& y,
                           Loss loss) {
    if (prediction.size() != y.size()) throw InvalidArgument("prediction/response size mismatch");
    const double n = static_cast<double>(y.size());
    switch (loss) {
        case Loss::Lad: return (y - prediction).cwiseAbs().sum() / n;
        case Loss::L2: return (y - prediction).squaredNorm() / n;
        case Loss::Logloss: {
            double total = 0.0;
            for (Index i = 0; i < y.size(); ++i) total += logistic_loss(y[i] * prediction[i]);
            return total / n;
        }
    }
    return 0.0;
}

double empirical_loss(const Eigen::Ref<const Eigen::VectorXd>& beta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, Loss loss) {
    if (X.cols() != beta.size()) throw InvalidArgument("beta/X dimension mismatch");
    return loss_of_predictions(X * beta, y, loss);
}

double eval_objective(const Eigen::Ref<const Eigen::VectorXd>& beta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const GroupStructure& structure, double epsilon,
                      Loss loss) {
    if (X.rows() != y.size()) throw InvalidArgument("X/y dimension mismatch");
    if (structure.p != beta.size()) throw InvalidArgument("structure/beta dimension mismatch");
    return empirical_loss(beta, X, y, loss) + epsilon * glasso_penalty(beta, structure);
}

double eval_latent_objective(const LatentDecomposition& latent, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, double epsilon, Loss loss) {
    const Eigen::VectorXd beta = latent.reconstruct(X.cols());
    double pen = 0.0;
    for (std::size_t l = 0; l < latent.latent.size(); ++l)
        pen += latent.weights[static_cast<Index>(l)] * latent.latent[l].norm();
    return empirical_loss(beta, X, y, loss) + epsilon * pen;
}

Eigen::VectorXd loss_gradient(const Eigen::Ref<const Eigen::VectorXd>& beta,
                              const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Loss loss) {
    const double n = static_cast<double>(X.rows());
    const Eigen::VectorXd pred = X * beta;
    switch (loss) {
        case Loss::L2: return (-2.0 / n) * (X.transpose() * (y - pred));
        case Loss::Logloss: {
            Eigen::VectorXd w(y.size());
            for (Index i = 0; i < y.size(); ++i) {
                const double m = y[i] * pred[i];
                // d/dm log(1+exp(-m)) = -1/(1+exp(m))
                const double s = m > 0.0 ? std::exp(-m) / (1.0 + std::exp(-m))
                                         : 1.0 / (1.0 + std::exp(m));
                w[i] = -y[i] * s;
            }
            return (X.transpose() * w) / n;
        }
        case Loss::Lad: break;
    }
    throw InvalidArgument("loss_gradient: LAD loss is not differentiable");
}

double block_optimality_residual(const Eigen::Ref<const Eigen::VectorXd>& beta,
                                 const Eigen::VectorXd& gradient, const GroupStructure& structure,
                                 const Eigen::VectorXd& weights, double lambda) {
    double worst = 0.0;
    for (std::size_t l = 0; l < structure.num_groups(); ++l) {
        const auto& g = structure.groups[l];
        const double cap = lambda * weights[static_cast<Index>(l)];
        double bsq = 0.0;
        double gsq = 0.0;
        for (Index j : g) {
            bsq += beta[j] * beta[j];
            gsq += gradient[j] * gradient[j];
        }
        const double bnorm = std::sqrt(bsq);
        if (bnorm < kZeroBlock) {
            worst = std::max(worst, std::sqrt(gsq) - cap);
        } else {
            double rsq = 0.0;
            for (Index j : g) {
                const double r = gradient[j] + cap * beta[j] / bnorm;
                rsq += r * r;
            }
            worst = std::max(worst, std::sqrt(rsq));
        }
    }
    return worst;
}

double operator_norm(const Eigen::MatrixXd& X, std::uint64_t seed, int iters, double tol) {
    if (X.size() == 0) return 0.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    Eigen::VectorXd v(X.cols());
    for (Index j = 0; j < v.size(); ++j) v[j] = unif(rng);
    v.normalize();
    double sigma = 0.0;
    for (int k = 0; k < iters; ++k) {
        Eigen::VectorXd w = X.transpose() * (X * v);
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        const double next = std::sqrt(wn);
        v = w / wn;
        if (std::abs(next - sigma) <= tol * next) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    // Power iteration approaches the top singular value from below.
    return sigma * (1.0 + 1e-6) + 1e-12;
}

FitResult fit_gwgl_lr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GroupStructure& structure, const FitConfig& config) {
    config.validate();
    check_finite(X, y);
    check_partition(structure, X.cols());
    GroupProblem prob{X, y, structure, sqrt_size_weights(structure), config.epsilon, Loss::Lad};
    return solve(prob, config);
}

FitResult fit_gwgl_lg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GroupStructure& structure, const FitConfig& config) {
    config.validate();
    check_finite(X, y);
    check_labels(y);
    check_partition(structure, X.cols());
    GroupProblem prob{X, y, structure, sqrt_size_weights(structure), config.epsilon,
                      Loss::Logloss};
    const bool one_class = (y.array() == y[0]).all();
    if (one_class && config.epsilon == 0.0) {
        FitResult res;
        res.loss = Loss::Logloss;
        res.beta = Eigen::VectorXd::Zero(X.cols());
        res.objective = prob.objective(res.beta);
        res.trace.push_back(res.objective);
        res.diagnostic =
            "all labels belong to one class and epsilon = 0: the logloss has no minimizer";
        return res;
    }
    return solve(prob, config);
}

FitResult fit_glasso_l2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const GroupStructure& structure, double lambda, FitConfig config) {
    config.epsilon = lambda;
    config.validate();
    check_finite(X, y);
    check_partition(structure, X.cols());
    GroupProblem prob{X, y, structure, sqrt_size_weights(structure), lambda, Loss::L2};
    return solve(prob, config);
}

FitResult fit_latent_overlap(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const GroupStructure& structure, const Eigen::VectorXd& d,
                             double epsilon, Loss loss, FitConfig config) {
    config.epsilon = epsilon;
    config.validate();
    check_finite(X, y);
    require_valid(structure, X.cols());
    if (static_cast<std::size_t>(d.size()) != structure.num_groups())
        throw InvalidArgument("need one latent weight per group");
    if ((d.array() <= 0.0).any()) throw InvalidArgument("latent weights must be positive");
    if (loss == Loss::Logloss) check_labels(y);

    const DuplicatedLayout layout(structure);
    const Eigen::MatrixXd expanded = layout.expand_design(X);
    GroupProblem prob{expanded, y, layout.blocks, d, epsilon, loss};
    FitResult dup = solve(prob, config);

    FitResult res = dup;
    res.beta = layout.collapse(dup.beta, X.cols());
    res.latent = layout.split(dup.beta, X.cols(), d);
    res.objective = eval_latent_objective(*res.latent, X, y, epsilon, loss);
    return res;
}

FitResult fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
              const GroupStructure& structure, double epsilon, Loss loss, FitConfig config) {
    config.epsilon = epsilon;
    switch (loss) {
        case Loss::Lad: return fit_gwgl_lr(X, y, structure, config);
        case Loss::Logloss: return fit_gwgl_lg(X, y, structure, config);
        case Loss::L2: return fit_glasso_l2(X, y, structure, epsilon, config);
    }
    throw InvalidArgument("unknown loss");
}

}  // namespace gwgl
