#pragma once

#include "tvglasso/block_layout.hpp"
#include "tvglasso/dataset.hpp"
#include "tvglasso/difference_map.hpp"
#include "tvglasso/types.hpp"

#include <string>
#include <vector>

namespace tvglasso {

// Penalty weights for the estimation problem
//   minimize  -log det(Theta) + tr(S Theta)
//             + lambda1 * sum_{p != q, unmasked} |theta_pq|
//             + lambda2 * ||D vec(Theta)||_1
// over positive definite Theta with masked entries fixed at zero. The
// elementwise term counts both triangles (the usual graphical-lasso lambda
// scale); the fused term counts each upper-triangle difference once.
struct PenaltyConfig {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    bool penalize_diagonal = false;  // lambda1 on the diagonal as well
    bool fuse_self_self = true;      // include S_s blocks (s >= 1) in the fused term
    MaskArray extra_mask;            // optional forced zeros beyond the lag cap
};

struct SolverSettings {
    double tol = 1e-6;       // on scaled primal/dual residuals
    Index max_iter = 10000;
    double rho_init = 1.0;   // ADMM penalty parameter, adapted by residual balancing
    double edge_threshold = 1e-4;  // |theta| below this counts as zero for edges/df
};

struct SolveDiagnostics {
    Index iterations = 0;
    double primal_residual = 0.0;  // scaled, at exit
    double dual_residual = 0.0;    // scaled, at exit
    double objective_value = 0.0;
    double rho_final = 0.0;
    bool converged = false;
};

struct PrecisionEstimate {
    Matrix theta;
    BlockLayout layout;
    PenaltyConfig config;
    SolverSettings settings;
    SolveDiagnostics diagnostics;
};

// union of the layout's lag mask and config.extra_mask
MaskArray combined_mask(const BlockLayout& layout, const PenaltyConfig& config);

// ADMM solve of the penalized log-det program. The Theta block is the
// log-det proximal step (exact, by eigendecomposition); the auxiliary block
// carries both l1 terms and is solved exactly per difference chain by total
// variation denoising followed by soft thresholding. Requires lambda1 > 0
// when S is singular. Non-convergence returns the best iterate flagged in
// diagnostics rather than throwing. warm_start, when given, seeds the
// iteration (typically the neighboring grid point's estimate).
PrecisionEstimate solve(const EmpiricalCovariance& S, const BlockLayout& layout,
                        const PenaltyConfig& config, const SolverSettings& settings = {},
                        const Matrix* warm_start = nullptr);

// Penalized objective value at a positive definite theta. Masked entries are
// excluded from the elementwise penalty; pass the mask used by the solve for
// off-support inputs (entries exactly zero never contribute either way).
double objective(const Matrix& theta, const EmpiricalCovariance& S,
                 const PenaltyConfig& config, const DifferenceMap& D,
                 const MaskArray& mask = MaskArray());

struct CertificateReport {
    double min_directional_derivative = 0.0;
    Index directions_checked = 0;
    std::string worst_direction;
    bool passed(double tol = 1e-5) const { return min_directional_derivative >= -tol; }
};

// Optimality certificate: one-sided directional derivatives of the objective
// at est.theta along mask-respecting symmetric unit directions (all signed
// coordinate directions plus n_directions random ones). For the convex
// objective every derivative is nonnegative exactly at the optimum, so the
// worst direction bounds how suboptimal the estimate can be.
CertificateReport check_optimality(const PrecisionEstimate& est, const EmpiricalCovariance& S,
                                   const DifferenceMap& D, Index n_directions,
                                   std::uint64_t seed = 13);

struct Edge {
    Index p = 0;
    Index q = 0;
    BlockRef ref;
    double weight = 0.0;
};

// all unmasked off-diagonal entries with |theta| above the threshold
std::vector<Edge> edges_from_matrix(const Matrix& theta, const BlockLayout& layout,
                                    double threshold, const MaskArray& mask = MaskArray());

std::vector<Edge> edge_set(const PrecisionEstimate& est);

}  // namespace tvglasso
