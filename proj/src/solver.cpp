#include "tvglasso/solver.hpp"

#include "tvglasso/prox.hpp"
#include "tvglasso/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace tvglasso {

namespace {

constexpr double kKinkTol = 1e-10;  // |x| below this counts as sitting on an l1 kink

void check_inputs(const EmpiricalCovariance& S, const BlockLayout& layout,
                  const PenaltyConfig& config, const SolverSettings& settings) {
    const Index d = layout.dim();
    if (S.s.rows() != d || S.s.cols() != d)
        throw validation_error("solve: covariance dimension does not match layout");
    const double scale = std::max(1.0, S.s.cwiseAbs().maxCoeff());
    if ((S.s - S.s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw validation_error("solve: covariance matrix is not symmetric");
    if (config.lambda1 < 0 || config.lambda2 < 0)
        throw validation_error("solve: penalties must be nonnegative");
    if (settings.tol <= 0 || settings.max_iter < 1)
        throw validation_error("solve: invalid solver settings");
    if (config.extra_mask.size() != 0 &&
        (config.extra_mask.rows() != d || config.extra_mask.cols() != d))
        throw validation_error("solve: mask dimension does not match layout");
    if (config.lambda1 == 0.0) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(S.s, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo <= 1e-12 * std::max(1.0, hi))
            throw validation_error("solve: singular covariance requires lambda1 > 0");
    }
}

bool is_pd(const Matrix& m) {
    Eigen::LLT<Matrix> llt(m);
    return llt.info() == Eigen::Success;
}

}  // namespace

MaskArray combined_mask(const BlockLayout& layout, const PenaltyConfig& config) {
    MaskArray mask = layout.forced_zero_mask();
    if (config.extra_mask.size() != 0) mask = mask || config.extra_mask;
    return mask;
}

PrecisionEstimate solve(const EmpiricalCovariance& S, const BlockLayout& layout,
                        const PenaltyConfig& config, const SolverSettings& settings,
                        const Matrix* warm_start) {
    check_inputs(S, layout, config, settings);
    const Index d = layout.dim();
    const MaskArray mask = combined_mask(layout, config);
    const DifferenceMap diff_map = build_difference_map(layout, config.fuse_self_self);

    double rho = settings.rho_init;

    // diagonal start, PD for any covariance with positive diagonal
    Matrix theta = Matrix::Zero(d, d);
    for (Index p = 0; p < d; ++p) theta(p, p) = 1.0 / std::max(S.s(p, p) + config.lambda1, 1e-8);
    if (warm_start != nullptr && warm_start->rows() == d && warm_start->cols() == d)
        theta = *warm_start;
    Matrix z = theta;
    Matrix u = Matrix::Zero(d, d);
    Matrix z_prev(d, d);

    std::vector<double> chain_buf, chain_out;

    SolveDiagnostics diag;
    diag.converged = false;

    for (Index iter = 1; iter <= settings.max_iter; ++iter) {
        // Theta step: exact log-det prox
        const Matrix g = rho * (z - u) - S.s;
        theta = logdet_prox<double>(g, rho);

        // auxiliary step: exact prox of the combined l1 + fused penalty.
        // TV denoising along each chain first, then soft thresholding; for
        // the 1-D fused lasso this composition gives the exact joint prox.
        z_prev.swap(z);
        z = theta + u;
        if (config.lambda2 > 0.0) {
            const double tv_weight = config.lambda2 / (2.0 * rho);
            for (const auto& chain : diff_map.chains()) {
                const std::size_t len = chain.coords.size();
                if (len < 2) continue;
                chain_buf.resize(len);
                chain_out.resize(len);
                for (std::size_t k = 0; k < len; ++k)
                    chain_buf[k] = z(chain.coords[k].first, chain.coords[k].second);
                tv1d_prox(chain_buf.data(), static_cast<Index>(len), tv_weight,
                          chain_out.data());
                for (std::size_t k = 0; k < len; ++k)
                    z(chain.coords[k].first, chain.coords[k].second) = chain_out[k];
            }
        }
        const double shrink = config.lambda1 / rho;
        for (Index q = 0; q < d; ++q) {
            for (Index p = 0; p < q; ++p) {
                const double v = mask(p, q) ? 0.0 : soft_threshold(z(p, q), shrink);
                z(p, q) = v;
                z(q, p) = v;
            }
            if (config.penalize_diagonal) z(q, q) = soft_threshold(z(q, q), shrink);
        }

        u += theta - z;

        const double r_norm = (theta - z).norm();
        const double s_norm = rho * (z - z_prev).norm();
        const double r_scaled = r_norm / std::max({1.0, theta.norm(), z.norm()});
        const double s_scaled = s_norm / std::max(1.0, rho * u.norm());

        diag.iterations = iter;
        diag.primal_residual = r_scaled;
        diag.dual_residual = s_scaled;

        if (r_scaled <= settings.tol && s_scaled <= settings.tol) {
            diag.converged = true;
            break;
        }

        // residual balancing keeps the two residuals within a decade
        if (r_norm > 10.0 * s_norm && rho < 1e6) {
            rho *= 2.0;
            u /= 2.0;
        } else if (s_norm > 10.0 * r_norm && rho > 1e-6) {
            rho /= 2.0;
            u *= 2.0;
        }
    }
    diag.rho_final = rho;

    // z carries the exact zeros; fall back to the always-PD theta iterate if
    // thresholding cost definiteness (only near non-convergence)
    Matrix theta_hat;
    if (is_pd(z)) {
        theta_hat = z;
    } else {
        theta_hat = theta;
        for (Index q = 0; q < d; ++q)
            for (Index p = 0; p < d; ++p)
                if (mask(p, q)) theta_hat(p, q) = 0.0;
        if (!is_pd(theta_hat)) diag.converged = false;
    }
    if (is_pd(theta_hat))
        diag.objective_value = objective(theta_hat, S, config, diff_map, mask);
    else
        diag.objective_value = std::numeric_limits<double>::quiet_NaN();

    return {std::move(theta_hat), layout, config, settings, diag};
}

double objective(const Matrix& theta, const EmpiricalCovariance& S,
                 const PenaltyConfig& config, const DifferenceMap& D, const MaskArray& mask) {
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success)
        throw validation_error("objective: theta is not positive definite");
    double logdet = 0.0;
    for (Index i = 0; i < theta.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));

    double l1 = 0.0;
    for (Index q = 0; q < theta.cols(); ++q) {
        for (Index p = 0; p < q; ++p) {
            if (mask.size() != 0 && mask(p, q)) continue;
            l1 += 2.0 * std::abs(theta(p, q));
        }
        if (config.penalize_diagonal) l1 += std::abs(theta(q, q));
    }

    return -logdet + S.s.cwiseProduct(theta).sum() + config.lambda1 * l1 +
           config.lambda2 * D.fused_l1(theta);
}

namespace {

// one-sided directional derivative of |x| at x along h
inline double abs_dirderiv(double x, double h) {
    return (std::abs(x) > kKinkTol) ? (x > 0 ? h : -h) : std::abs(h);
}

struct FusedAdjacency {
    // per upper coordinate: (row index, +1/-1) pairs it participates in
    std::unordered_map<std::uint64_t, std::vector<std::pair<Index, int>>> rows;

    static std::uint64_t key(Index p, Index q, Index dim) {
        return static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(dim) +
               static_cast<std::uint64_t>(q);
    }

    explicit FusedAdjacency(const DifferenceMap& D) {
        for (Index r = 0; r < D.rows(); ++r) {
            const auto& row = D.row_list()[static_cast<std::size_t>(r)];
            rows[key(row.plus.first, row.plus.second, D.dim())].emplace_back(r, +1);
            rows[key(row.minus.first, row.minus.second, D.dim())].emplace_back(r, -1);
        }
    }
};

}  // namespace

CertificateReport check_optimality(const PrecisionEstimate& est, const EmpiricalCovariance& S,
                                   const DifferenceMap& D, Index n_directions,
                                   std::uint64_t seed) {
    const Index d = est.theta.rows();
    const MaskArray mask = combined_mask(est.layout, est.config);
    const PenaltyConfig& config = est.config;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(est.theta);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw validation_error("check_optimality: estimate is not positive definite");
    const Matrix inv = eig.eigenvectors() *
                       eig.eigenvalues().cwiseInverse().asDiagonal() *
                       eig.eigenvectors().transpose();
    const Matrix grad = S.s - inv;  // gradient of the smooth part

    const Vector diffs = D.apply(est.theta);
    const FusedAdjacency adjacency(D);

    CertificateReport report;
    report.min_directional_derivative = std::numeric_limits<double>::infinity();

    auto consider = [&](double deriv, const std::string& desc) {
        ++report.directions_checked;
        if (deriv < report.min_directional_derivative) {
            report.min_directional_derivative = deriv;
            report.worst_direction = desc;
        }
    };

    // signed coordinate directions: exact per-entry KKT residuals
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Index q = 0; q < d; ++q) {
        for (Index p = 0; p <= q; ++p) {
            if (mask(p, q)) continue;
            for (const int sgn : {+1, -1}) {
                double deriv;
                if (p == q) {
                    deriv = grad(p, p) * sgn;
                    if (config.penalize_diagonal)
                        deriv += config.lambda1 * abs_dirderiv(est.theta(p, p), sgn);
                } else {
                    const double h = sgn * inv_sqrt2;
                    deriv = 2.0 * grad(p, q) * h +
                            2.0 * config.lambda1 * abs_dirderiv(est.theta(p, q), h);
                    if (config.lambda2 > 0.0) {
                        const auto it =
                            adjacency.rows.find(FusedAdjacency::key(p, q, d));
                        if (it != adjacency.rows.end())
                            for (const auto& [r, s] : it->second)
                                deriv += config.lambda2 * abs_dirderiv(diffs(r), s * h);
                    }
                }
                consider(deriv, "coordinate (" + std::to_string(p) + "," + std::to_string(q) +
                                    (sgn > 0 ? ") +" : ") -"));
            }
        }
    }

    // random symmetric unit directions on the free support
    Rng rng(seed);
    Matrix delta(d, d);
    for (Index k = 0; k < n_directions; ++k) {
        delta.setZero();
        for (Index q = 0; q < d; ++q)
            for (Index p = 0; p <= q; ++p) {
                if (mask(p, q)) continue;
                const double v = normal_sample(rng);
                delta(p, q) = v;
                delta(q, p) = v;
            }
        const double norm = delta.norm();
        if (norm == 0.0) continue;
        delta /= norm;

        double deriv = grad.cwiseProduct(delta).sum();
        for (Index q = 0; q < d; ++q) {
            for (Index p = 0; p < q; ++p) {
                if (mask(p, q)) continue;
                deriv += 2.0 * config.lambda1 * abs_dirderiv(est.theta(p, q), delta(p, q));
            }
            if (config.penalize_diagonal)
                deriv += config.lambda1 * abs_dirderiv(est.theta(q, q), delta(q, q));
        }
        if (config.lambda2 > 0.0) {
            for (Index r = 0; r < D.rows(); ++r) {
                const auto& row = D.row_list()[static_cast<std::size_t>(r)];
                const double h = delta(row.plus.first, row.plus.second) -
                                 delta(row.minus.first, row.minus.second);
                deriv += config.lambda2 * abs_dirderiv(diffs(r), h);
            }
        }
        consider(deriv, "random #" + std::to_string(k));
    }

    return report;
}

std::vector<Edge> edges_from_matrix(const Matrix& theta, const BlockLayout& layout,
                                    double threshold, const MaskArray& mask) {
    std::vector<Edge> edges;
    const Index d = layout.dim();
    for (Index q = 0; q < d; ++q)
        for (Index p = 0; p < q; ++p) {
            if (mask.size() != 0 && mask(p, q)) continue;
            if (std::abs(theta(p, q)) > threshold)
                edges.push_back({p, q, layout.classify(p, q), theta(p, q)});
        }
    return edges;
}

std::vector<Edge> edge_set(const PrecisionEstimate& est) {
    return edges_from_matrix(est.theta, est.layout, est.settings.edge_threshold,
                             combined_mask(est.layout, est.config));
}

}  // namespace tvglasso
