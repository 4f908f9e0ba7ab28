#pragma once

#include <cstdint>
#include <vector>

#include "gwgl/solvers.hpp"

namespace gwgl {

/// W1(P_out, P_mix) / W1(P, P_mix) on random pairs of discrete distributions
/// against (1 - q) / q.
struct MixtureCheck {
    double q = 0.0;
    double expected = 0.0;
    std::vector<double> ratios;
    double max_abs_error = 0.0;
    double tolerance = 1e-9;
    bool pass = false;
};

MixtureCheck check_mixture(double q, int trials, int max_support, int dim, std::uint64_t seed,
                           double tolerance = 1e-9);

/// Worst-case expected loss over a finite-support Wasserstein ball against
/// the regularized empirical objective, on tiny random instances.
struct DroCheck {
    Loss loss = Loss::Lad;
    int instances = 0;
    /// max over instances of worst_case - (empirical + eps * penalty).
    double max_excess = 0.0;
    double tolerance = 1e-8;
    bool pass = false;
};

DroCheck check_dro_bound(int trials, Loss loss, std::uint64_t seed, double tolerance = 1e-8);

/// dual_norm_group against an explicit maximizer over the weighted (q,t)
/// unit ball, plus random feasible points that must never exceed it.
struct DualNormCheck {
    int trials = 0;
    /// max |v'x* - dual| over trials, x* the constructed maximizer.
    double max_abs_error = 0.0;
    /// max over sampled feasible x of v'x - dual (should be <= 0).
    double max_sampled_excess = 0.0;
    double tolerance = 1e-9;
    bool pass = false;
};

DualNormCheck check_dual_norm(int trials, int max_dim, std::uint64_t seed, double tolerance = 1e-9);

}  // namespace gwgl
