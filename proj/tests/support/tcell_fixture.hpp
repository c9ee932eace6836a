#pragma once

#include "tvglasso/solver.hpp"

namespace tvglasso::testing {

// Stored 4-gene / 2-time estimate used as the reference fixture for the
// diff and edge-report tools. Gene order: ZNF, CCN, SIV, SCY.
inline const std::vector<std::string>& tcell_genes() {
    static const std::vector<std::string> genes = {"ZNF", "CCN", "SIV", "SCY"};
    return genes;
}

inline Matrix tcell_theta() {
    Matrix theta(8, 8);
    theta << 1.24, 0.00, -0.26, 0.18, -0.22, -0.11, -0.11, -0.07,  //
        0.00, 1.49, 0.00, -0.17, -0.18, -0.84, 0.06, 0.12,         //
        -0.26, 0.00, 1.44, 0.00, -0.15, 0.08, -0.69, -0.01,        //
        0.18, -0.17, 0.00, 1.19, 0.02, 0.13, 0.41, -0.10,          //
        -0.22, -0.18, -0.15, 0.02, 1.07, -0.02, 0.00, 0.12,        //
        -0.11, -0.84, 0.08, 0.13, -0.02, 1.55, 0.00, 0.24,         //
        -0.11, 0.06, -0.69, 0.41, 0.00, 0.00, 1.52, 0.00,          //
        -0.07, 0.12, -0.01, -0.10, 0.12, 0.24, 0.00, 1.08;
    return theta;
}

inline PrecisionEstimate tcell_estimate() {
    PenaltyConfig config;
    config.lambda1 = 0.01;
    config.lambda2 = 0.1;
    SolverSettings settings;  // edge_threshold 1e-4
    SolveDiagnostics diag;
    diag.converged = true;
    return {tcell_theta(), BlockLayout(4, 2, 1), config, settings, diag};
}

}  // namespace tvglasso::testing
