#include "tvglasso/solver.hpp"

#include "support/glasso_oracle.hpp"
#include "support/test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace tvglasso;
using tvglasso::testing::glasso_coordinate_descent;
using tvglasso::testing::glasso_kkt_violation;
using tvglasso::testing::random_correlation;
using tvglasso::testing::random_spd;

namespace {

SolverSettings tight_settings() {
    SolverSettings settings;
    settings.tol = 1e-9;
    settings.max_iter = 50000;
    return settings;
}

EmpiricalCovariance as_cov(Matrix s, Index n = 100) { return {std::move(s), n}; }

}  // namespace

TEST_CASE("identity covariance with moderate lambda1 returns the identity") {
    const BlockLayout layout(5, 1, 0);
    const EmpiricalCovariance S = as_cov(Matrix::Identity(5, 5));
    PenaltyConfig config;
    config.lambda1 = 0.5;
    const PrecisionEstimate est = solve(S, layout, config, tight_settings());
    CHECK(est.diagnostics.converged);
    for (Index q = 0; q < 5; ++q) {
        CHECK(est.theta(q, q) == doctest::Approx(1.0).epsilon(1e-7));
        for (Index p = 0; p < q; ++p) CHECK(est.theta(p, q) == 0.0);  // exact zeros
    }
}

TEST_CASE("lambda2 = 0 matches the independent glasso oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 6; ++trial) {
        const Index dim = 4 + static_cast<Index>(rng() % 5);
        const Matrix s = random_correlation(dim, rng);
        const double lambda = (trial % 2 == 0) ? 0.1 : 0.25;

        const Matrix oracle = glasso_coordinate_descent(s, lambda);
        CHECK(glasso_kkt_violation(s, oracle, lambda) < 1e-7);

        const BlockLayout layout(dim, 1, 0);
        PenaltyConfig config;
        config.lambda1 = lambda;
        const PrecisionEstimate est = solve(as_cov(s), layout, config, tight_settings());
        CHECK(est.diagnostics.converged);
        CAPTURE(trial);
        CHECK((est.theta - oracle).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("sparsity limit: large lambda1 gives the decoupled diagonal solution") {
    Rng rng(103);
    for (int trial = 0; trial < 10; ++trial) {
        const Index dim = 3 + static_cast<Index>(rng() % 6);
        const Matrix s = random_spd(dim, rng);
        double max_off = 0.0;
        for (Index q = 0; q < dim; ++q)
            for (Index p = 0; p < q; ++p) max_off = std::max(max_off, std::abs(s(p, q)));

        const BlockLayout layout(dim, 1, 0);
        PenaltyConfig config;
        config.lambda1 = max_off * 1.01 + 1e-6;
        const PrecisionEstimate est = solve(as_cov(s), layout, config, tight_settings());
        CHECK(est.diagnostics.converged);
        CHECK(edge_set(est).empty());
        for (Index p = 0; p < dim; ++p)
            CHECK(est.theta(p, p) == doctest::Approx(1.0 / s(p, p)).epsilon(1e-6));
    }
}

TEST_CASE("fusion limit: huge lambda2 equalizes all same-lag blocks") {
    Rng rng(107);
    const BlockLayout layout(3, 3, 1);
    const Matrix s = random_correlation(layout.dim(), rng);
    PenaltyConfig config;
    config.lambda1 = 0.05;
    config.lambda2 = 1e4;
    const PrecisionEstimate est = solve(as_cov(s), layout, config, tight_settings());
    CHECK(est.diagnostics.converged);
    const DifferenceMap map = build_difference_map(layout);
    CHECK(map.apply(est.theta).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("estimates are symmetric positive definite with masked entries exactly zero") {
    Rng rng(109);
    for (int trial = 0; trial < 5; ++trial) {
        const BlockLayout layout(3, 3, 1);  // lag-2 entries masked
        const Matrix s = random_correlation(layout.dim(), rng);
        PenaltyConfig config;
        config.lambda1 = 0.02 + 0.05 * trial;
        config.lambda2 = 0.05 * trial;
        const PrecisionEstimate est = solve(as_cov(s), layout, config);
        CHECK(est.diagnostics.converged);
        // the splitting is non-monotone in the objective, so the convergence
        // contract is on the scaled residuals
        CHECK(est.diagnostics.primal_residual <= est.settings.tol);
        CHECK(est.diagnostics.dual_residual <= est.settings.tol);
        CHECK((est.theta - est.theta.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(est.theta, Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
        for (Index k = 0; k < 3; ++k)
            for (Index i = 0; i < 3; ++i)
                CHECK(est.theta(layout.flat(i, 0), layout.flat(k, 2)) == 0.0);
    }
}

TEST_CASE("objective closed forms and independent recomputation") {
    const BlockLayout layout(2, 2, 1);
    const DifferenceMap map = build_difference_map(layout);
    const Index d = layout.dim();

    SUBCASE("identity: objective equals the dimension") {
        PenaltyConfig config;
        CHECK(objective(Matrix::Identity(d, d), as_cov(Matrix::Identity(d, d)), config, map) ==
              doctest::Approx(static_cast<double>(d)).epsilon(1e-14));
        config.lambda1 = 1.0;
        CHECK(objective(Matrix::Identity(d, d), as_cov(Matrix::Identity(d, d)), config, map) ==
              doctest::Approx(static_cast<double>(d)).epsilon(1e-14));
    }

    SUBCASE("random PD matrix matches an eigenvalue-based recomputation") {
        Rng rng(113);
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix theta = random_spd(d, rng);
            const Matrix s = random_spd(d, rng);
            PenaltyConfig config;
            config.lambda1 = 0.3;
            config.lambda2 = 0.7;

            Eigen::SelfAdjointEigenSolver<Matrix> eig(theta, Eigen::EigenvaluesOnly);
            double expected = -eig.eigenvalues().array().log().sum();
            expected += (s * theta).trace();
            for (Index q = 0; q < d; ++q)
                for (Index p = 0; p < q; ++p) expected += 2.0 * 0.3 * std::abs(theta(p, q));
            for (const auto& row : map.row_list())
                expected += 0.7 * std::abs(theta(row.plus.first, row.plus.second) -
                                           theta(row.minus.first, row.minus.second));
            CHECK(objective(theta, as_cov(s), config, map) ==
                  doctest::Approx(expected).epsilon(1e-10));
        }
    }

    SUBCASE("non-PD input is rejected") {
        Matrix bad = Matrix::Identity(d, d);
        bad(0, 0) = -1.0;
        CHECK_THROWS_AS(objective(bad, as_cov(Matrix::Identity(d, d)), PenaltyConfig{}, map),
                        validation_error);
    }
}

TEST_CASE("optimality certificate") {
    SUBCASE("passes on converged solves with mixed penalties") {
        Rng rng(127);
        const BlockLayout layout(3, 2, 1);
        const Matrix s = random_correlation(layout.dim(), rng);
        PenaltyConfig config;
        config.lambda1 = 0.1;
        config.lambda2 = 0.1;
        const PrecisionEstimate est = solve(as_cov(s), layout, config, tight_settings());
        REQUIRE(est.diagnostics.converged);
        const DifferenceMap map = build_difference_map(layout);
        const CertificateReport report = check_optimality(est, as_cov(s), map, 200);
        CAPTURE(report.worst_direction);
        CHECK(report.min_directional_derivative >= -1e-5);
        CHECK(report.directions_checked > 200);
    }

    SUBCASE("rejects a perturbed estimate") {
        Rng rng(131);
        const BlockLayout layout(3, 2, 1);
        const Matrix s = random_correlation(layout.dim(), rng);
        PenaltyConfig config;
        config.lambda1 = 0.1;
        const PrecisionEstimate est = solve(as_cov(s), layout, config, tight_settings());
        PrecisionEstimate bumped = est;
        bumped.theta(0, 1) += 0.1;
        bumped.theta(1, 0) += 0.1;
        const DifferenceMap map = build_difference_map(layout);
        const CertificateReport report = check_optimality(bumped, as_cov(s), map, 50);
        CHECK(report.min_directional_derivative < -1e-3);
    }

    SUBCASE("unpenalized MLE is stationary") {
        Rng rng(137);
        const BlockLayout layout(4, 1, 0);
        const Matrix s = random_spd(4, rng, 1.0);
        PrecisionEstimate est{s.inverse(), layout, PenaltyConfig{}, SolverSettings{}, {}};
        est.theta = ((est.theta + est.theta.transpose()) / 2).eval();
        const DifferenceMap map = build_difference_map(layout);
        const CertificateReport report = check_optimality(est, as_cov(s), map, 100);
        CHECK(report.min_directional_derivative >= -1e-8);
    }
}

TEST_CASE("edge extraction") {
    const BlockLayout layout(3, 2, 1);
    SUBCASE("diagonal estimate has no edges") {
        PrecisionEstimate est{Matrix::Identity(6, 6), layout, PenaltyConfig{}, SolverSettings{},
                              {}};
        CHECK(edge_set(est).empty());
    }
    SUBCASE("threshold sweep is monotone") {
        Rng rng(139);
        Matrix theta = random_spd(6, rng);
        std::size_t last = SIZE_MAX;
        for (double threshold : {0.0, 0.01, 0.05, 0.2, 1.0, 5.0}) {
            const auto edges = edges_from_matrix(theta, layout, threshold);
            CHECK(edges.size() <= last);
            last = edges.size();
        }
    }
    SUBCASE("edges carry their block descriptors") {
        Matrix theta = Matrix::Identity(6, 6);
        theta(layout.flat(0, 0), layout.flat(1, 1)) = 0.5;  // lag-1 network
        theta(layout.flat(1, 1), layout.flat(0, 0)) = 0.5;
        const auto edges = edges_from_matrix(theta, layout, 1e-4);
        REQUIRE(edges.size() == 1);
        CHECK(edges[0].ref.kind == BlockKind::Network);
        CHECK(edges[0].ref.lag == 1);
        CHECK(edges[0].ref.gene_i == 0);
        CHECK(edges[0].ref.gene_j == 1);
        CHECK(edges[0].weight == 0.5);
    }
}

TEST_CASE("solver error paths and non-convergence flag") {
    const BlockLayout layout(3, 1, 0);
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(solve(as_cov(Matrix::Identity(4, 4)), layout, PenaltyConfig{}),
                        validation_error);
    }
    SUBCASE("singular covariance requires lambda1 > 0") {
        Matrix s = Matrix::Zero(3, 3);
        s(0, 0) = s(1, 1) = 1.0;  // rank 2
        s(0, 1) = s(1, 0) = 0.5;
        s(2, 2) = 0.0;
        PenaltyConfig config;
        config.lambda1 = 0.0;
        CHECK_THROWS_AS(solve(as_cov(s), layout, config), validation_error);
    }
    SUBCASE("iteration cap returns a flagged best iterate") {
        Rng rng(149);
        const Matrix s = random_correlation(3, rng);
        PenaltyConfig config;
        config.lambda1 = 0.1;
        SolverSettings settings;
        settings.max_iter = 2;
        const PrecisionEstimate est = solve(as_cov(s), layout, config, settings);
        CHECK_FALSE(est.diagnostics.converged);
        CHECK(est.theta.rows() == 3);
    }
    SUBCASE("negative penalties are rejected") {
        PenaltyConfig config;
        config.lambda1 = -0.1;
        CHECK_THROWS_AS(solve(as_cov(Matrix::Identity(3, 3)), layout, config),
                        validation_error);
    }
}

TEST_CASE("warm start reaches the same optimum") {
    Rng rng(151);
    const BlockLayout layout(4, 1, 0);
    const Matrix s = random_correlation(4, rng);
    PenaltyConfig config;
    config.lambda1 = 0.15;
    const PrecisionEstimate cold = solve(as_cov(s), layout, config, tight_settings());
    PenaltyConfig warm_config = config;
    warm_config.lambda1 = 0.1;
    const PrecisionEstimate step = solve(as_cov(s), layout, warm_config, tight_settings());
    const PrecisionEstimate warmed =
        solve(as_cov(s), layout, config, tight_settings(), &step.theta);
    CHECK((warmed.theta - cold.theta).cwiseAbs().maxCoeff() < 1e-6);
}

namespace {

// slow, independent route to the penalized optimum: projected subgradient
// descent over the PD cone with diminishing steps
double subgradient_descent_objective(const EmpiricalCovariance& S, const BlockLayout& layout,
                                     const PenaltyConfig& config, const DifferenceMap& map,
                                     int iters) {
    const Index d = layout.dim();
    Matrix theta = Matrix::Identity(d, d);
    double best = objective(theta, S, config, map);
    for (int it = 1; it <= iters; ++it) {
        Matrix grad = S.s - theta.inverse();
        for (Index q = 0; q < d; ++q)
            for (Index p = 0; p < d; ++p) {
                if (p == q) continue;
                if (layout.is_masked(p, q)) continue;
                grad(p, q) += config.lambda1 * (theta(p, q) > 0 ? 1.0 : (theta(p, q) < 0 ? -1.0 : 0.0));
            }
        for (const auto& row : map.row_list()) {
            const double diff = theta(row.plus.first, row.plus.second) -
                                theta(row.minus.first, row.minus.second);
            const double sgn = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
            const double half = config.lambda2 * sgn / 2.0;  // split across both triangles
            grad(row.plus.first, row.plus.second) += half;
            grad(row.plus.second, row.plus.first) += half;
            grad(row.minus.first, row.minus.second) -= half;
            grad(row.minus.second, row.minus.first) -= half;
        }
        const double step = 0.05 / std::sqrt(static_cast<double>(it));
        theta -= step * grad;
        theta = ((theta + theta.transpose()) / 2).eval();
        // project onto masked support and the PD cone
        for (Index q = 0; q < d; ++q)
            for (Index p = 0; p < d; ++p)
                if (p != q && layout.is_masked(p, q)) theta(p, q) = 0.0;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(theta);
        Vector vals = eig.eigenvalues().cwiseMax(1e-6);
        theta = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
        theta = ((theta + theta.transpose()) / 2).eval();
        best = std::min(best, objective(theta, S, config, map));
    }
    return best;
}

}  // namespace

TEST_CASE("solver objective is no worse than an independent subgradient descent") {
    Rng rng(163);
    for (int trial = 0; trial < 3; ++trial) {
        const BlockLayout layout(2, 3, 1);
        const Matrix s = random_correlation(layout.dim(), rng);
        PenaltyConfig config;
        config.lambda1 = 0.1;
        config.lambda2 = 0.15;
        const DifferenceMap map = build_difference_map(layout);
        const PrecisionEstimate est = solve(as_cov(s), layout, config, tight_settings());
        REQUIRE(est.diagnostics.converged);
        const double admm_objective = objective(est.theta, as_cov(s), config, map);
        const double subgrad_objective =
            subgradient_descent_objective(as_cov(s), layout, config, map, 4000);
        // the ADMM solution must match or beat the slow independent route
        CHECK(admm_objective <= subgrad_objective + 1e-6);
    }
}

TEST_CASE("unpenalized solve recovers the inverse covariance") {
    Rng rng(157);
    const BlockLayout layout(4, 1, 0);
    const Matrix s = random_spd(4, rng, 1.0);
    const PrecisionEstimate est = solve(as_cov(s), layout, PenaltyConfig{}, tight_settings());
    CHECK(est.diagnostics.converged);
    CHECK((est.theta - s.inverse()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("scalar problem solves in closed form") {
    const BlockLayout layout(1, 1, 0);
    Matrix s(1, 1);
    s << 2.0;
    const PrecisionEstimate est = solve(as_cov(s), layout, PenaltyConfig{}, tight_settings());
    CHECK(est.diagnostics.converged);
    CHECK(est.theta(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
}
