#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "gwgl/data.hpp"
#include "gwgl/error.hpp"
#include "gwgl/metrics.hpp"
#include "gwgl/tuning.hpp"
#include "helpers.hpp"

using namespace gwgl;

TEST_CASE("mad conventions") {
    CHECK(mad(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d::Zero()) == 2.0);
    CHECK(mad(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 3)) == 0.0);
    CHECK(mad(Eigen::Vector2d(1, -3), Eigen::Vector2d::Zero()) == 2.0);
    CHECK_THROWS_AS(mad(Eigen::VectorXd(0), Eigen::VectorXd(0)), InvalidArgument);
}

TEST_CASE("oracle_scores hand values") {
    const auto s = oracle_scores(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1, 0), Eigen::Matrix2d::Identity(), 1.0);
    CHECK(s.rr == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.rte == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(s.pve == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.ideal_rr == 0.0);
    CHECK(s.ideal_rte == 1.0);
    CHECK(s.ideal_pve == doctest::Approx(0.5));
    CHECK(s.null_rr == 1.0);
    CHECK(s.null_pve == 0.0);
    CHECK_THROWS_AS(oracle_scores(Eigen::Vector2d(1, 0), Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), 1.0),
                    InvalidArgument);
}

TEST_CASE("oracle_scores identities on random inputs") {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 200; ++k) {
        const Eigen::MatrixXd A = testutil::gaussian(4, 4, rng);
        const Eigen::MatrixXd cov = A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
        const Eigen::VectorXd bs = testutil::gaussian(4, rng), bh = testutil::gaussian(4, rng);
        const double s2 = testutil::uniform(0.1, 3.0, rng);
        const auto s = oracle_scores(bh, bs, cov, s2);
        const double sig = bs.dot(cov * bs);
        CHECK(std::abs(s.rte - (s.rr * sig / s2 + 1.0)) <= 1e-10 * s.rte);
        CHECK(std::abs(s.pve - (1.0 - s.rte * s2 / (sig + s2))) <= 1e-10 * (1 + std::abs(s.pve)));
        CHECK(s.rr >= 0.0);
        CHECK(s.rte >= 1.0);
        CHECK(s.pve <= s.ideal_pve);
    }
}

TEST_CASE("wgd") {
    Eigen::MatrixXd X(2, 2);
    // Columns with inner product 0.5.
    X << 1.0, 0.5, 0.0, std::sqrt(0.75);
    const GroupStructure one = GroupStructure::contiguous({2});
    CHECK(wgd(Eigen::Vector2d(1, 0), X, one) == doctest::Approx(2.0));
    CHECK(wgd(Eigen::Vector2d(0.3, 0.3), X, one) == 0.0);
    CHECK_THROWS_AS(wgd(Eigen::Vector2d(1, 0), X, GroupStructure::singletons(2)), InvalidArgument);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_WITH_AS(wgd(Eigen::Vector2d(1, 0), I, one), doctest::Contains("0 and 1"), InvalidArgument);
}

TEST_CASE("grouping bound: duplicated column and zero blocks") {
    SyntheticSpec spec;
    spec.snr = 2.0;
    spec.rho_w = 0.5;
    spec.n = 60;
    spec.group_sizes = {3, 3};
    Dataset d = generate_synthetic(spec);
    d.X.col(1) = d.X.col(0);
    d = standardize(d);
    const auto s = GroupStructure::contiguous({3, 3});
    const auto grid = tuning_grid(d.X, d.y, GridKind::Gwgl, 3);
    const double eps = grid[2];
    const auto f = fit(d.X, d.y, s, eps, Loss::Lad, {});
    REQUIRE(f.converged);
    CHECK(std::abs(f.beta[0] - f.beta[1]) <= 1e-6);
    const auto report = grouping_bound_check(f, d.X, s, eps);
    CHECK(report.all_pass);

    FitResult zero = f;
    zero.beta.head(3).setZero();
    const auto skipped = grouping_bound_check(zero, d.X, s, eps);
    REQUIRE_FALSE(skipped.notes.empty());
    CHECK(skipped.notes.front().find("group 0") != std::string::npos);
    for (const auto& pb : skipped.pairs) CHECK(pb.i >= 3);

    CHECK_THROWS_AS(grouping_bound_check(f, d.X, s, 0.0), InvalidArgument);
}

TEST_CASE("tuning grid endpoints") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::Vector2d y(4, -1);
    const auto g = tuning_grid(X, y, GridKind::Gwgl, 1);
    CHECK(g.size() == 50);
    CHECK(g[0] == doctest::Approx(std::sqrt(0.02)).epsilon(1e-14));
    CHECK(g[49] == doctest::Approx(2.0).epsilon(1e-14));
    for (Index k = 1; k < 50; ++k) CHECK(g[k] > g[k - 1]);
    const auto l2 = tuning_grid(X, y, GridKind::GlassoL2, 4, 5);
    CHECK(l2[0] == doctest::Approx(0.02 / 2.0));
    CHECK(l2[4] == doctest::Approx(2.0));
    // log-spaced before the outer transform
    for (Index k = 2; k < 50; ++k)
        CHECK(std::log(g[k] * g[k]) - std::log(g[k - 1] * g[k - 1]) ==
              doctest::Approx(std::log(g[1] * g[1]) - std::log(g[0] * g[0])));
    CHECK_THROWS_AS(tuning_grid(X, Eigen::Vector2d::Zero(), GridKind::Gwgl, 1), InvalidArgument);
}

TEST_CASE("tune_epsilon picks a grid minimizer deterministically") {
    SyntheticSpec spec;
    spec.snr = 1.0;
    spec.rho_w = 0.3;
    spec.outlier_prob = 0.3;
    spec.n = 80;
    spec.seed = 4;
    const Dataset d = standardize(generate_synthetic(spec));
    const auto s = GroupStructure::contiguous(spec.group_sizes);
    TuningOptions opt;
    opt.grid_size = 12;
    opt.split_seed = 3;
    const auto a = tune_epsilon(d, s, Loss::Lad, opt);
    const auto b = tune_epsilon(d, s, Loss::Lad, opt);
    CHECK(a.chosen_epsilon == b.chosen_epsilon);
    CHECK(a.refit.beta == b.refit.beta);
    CHECK(a.grid.size() == 12);
    for (Index k = 0; k < a.grid.size(); ++k) CHECK(a.validation_loss[a.chosen_index] <= a.validation_loss[k]);
    for (Index k = 0; k < a.chosen_index; ++k) CHECK(a.validation_loss[k] > a.validation_loss[a.chosen_index]);
    CHECK(a.chosen_epsilon > 0.0);
}

TEST_CASE("tune_epsilon tie-breaks to the smallest epsilon") {
    // Validation rows have x = 0, so every fit predicts 0 there and all
    // validation losses coincide.
    std::mt19937_64 rng(8);
    Dataset d;
    d.X = testutil::gaussian(20, 3, rng);
    d.y = testutil::gaussian(20, rng);
    d.feature_names = {"a", "b", "c"};
    const auto split = split_dataset(d, 0.7, 0.3, 0.0, 5);
    for (Index r : split.validation_rows) d.X.row(r).setZero();
    TuningOptions opt;
    opt.grid_size = 6;
    opt.split_seed = 5;
    for (Loss loss : {Loss::Lad, Loss::L2}) {
        const auto rep = tune_epsilon(d, GroupStructure::singletons(3), loss, opt);
        for (Index k = 1; k < 6; ++k) CHECK(rep.validation_loss[k] == rep.validation_loss[0]);
        CHECK(rep.chosen_index == 0);
    }
}

TEST_CASE("zero threshold separates null and non-null fits") {
    std::mt19937_64 rng(21);
    const auto s = GroupStructure::contiguous({2, 3, 1});
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd X = testutil::gaussian(25, 6, rng);
        Eigen::VectorXd y = testutil::gaussian(25, rng);
        for (Loss loss : {Loss::Lad, Loss::Logloss, Loss::L2}) {
            Eigen::VectorXd yy = y;
            if (loss == Loss::Logloss) yy = y.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
            const double thr = zero_threshold(X, yy, s, loss);
            REQUIRE(thr > 0.0);
            const auto above = fit(X, yy, s, thr * 1.01, loss, {});
            const auto below = fit(X, yy, s, thr * 0.9, loss, {});
            CHECK(above.beta.norm() <= 1e-7);
            CHECK(below.beta.norm() > 1e-4);
        }
    }
}

TEST_CASE("anchored grid shape") {
    const auto g = anchored_grid(0.3, GridKind::Gwgl, 50);
    CHECK(g.size() == 50);
    CHECK(g[49] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(g[0] == doctest::Approx(0.3 * std::sqrt(0.005)).epsilon(1e-14));
    for (Index k = 1; k < 50; ++k) CHECK(g[k] > g[k - 1]);
    const auto l2 = anchored_grid(2.0, GridKind::GlassoL2, 5);
    CHECK(l2[0] == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(l2[4] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(anchored_grid(0.0, GridKind::Gwgl, 5), InvalidArgument);
    CHECK(grid_anchor_from_string(to_string(GridAnchor::MaxCorrelation)) == GridAnchor::MaxCorrelation);
    CHECK_THROWS_AS(grid_anchor_from_string("bogus"), InvalidArgument);
}

TEST_CASE("max-correlation anchor reproduces tuning_grid") {
    SyntheticSpec spec;
    spec.snr = 1.0;
    spec.n = 60;
    spec.seed = 2;
    const Dataset d = standardize(generate_synthetic(spec));
    const auto s = GroupStructure::contiguous(spec.group_sizes);
    TuningOptions opt;
    opt.grid_size = 4;
    opt.anchor = GridAnchor::MaxCorrelation;
    const auto rep = tune_epsilon(d, s, Loss::L2, opt);
    const auto split = split_dataset(d, 0.7, 0.3, 0.0, opt.split_seed);
    const auto expect = tuning_grid(split.train.X, split.train.y, GridKind::GlassoL2, 7, 4);
    CHECK(rep.grid == expect);
}

TEST_CASE("mpi") {
    CHECK(mpi({1.0, 2.0}, {{1.0, 2.0}}, Direction::Minimize).value == 0.0);
    const auto r = mpi({1.0, 2.0}, {{1.2, 2.0}, {1.5, 3.0}}, Direction::Minimize);
    CHECK(r.value == doctest::Approx(100.0 * 0.2 / 1.2));
    CHECK(r.point == 0);
    const auto single = mpi({0.9}, {{0.8}}, Direction::Maximize);
    CHECK(single.point == 0);
    CHECK(single.value == doctest::Approx(12.5));
    const auto skip = mpi({1.0, 1.0}, {{0.0, 2.0}}, Direction::Minimize);
    CHECK(skip.warnings.size() == 1);
    CHECK(skip.point == 1);
    CHECK_THROWS_AS(mpi({1.0}, {}, Direction::Minimize), InvalidArgument);
}

TEST_CASE("spearman with ties") {
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 2, 3}) == doctest::Approx(1.0));
}
