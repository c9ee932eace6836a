#pragma once

#include "tvglasso/dataset.hpp"
#include "tvglasso/solver.hpp"

#include <array>
#include <map>
#include <optional>
#include <vector>

namespace tvglasso {

struct GridSpec {
    std::vector<double> lambda1_values;  // strictly increasing, nonempty
    std::vector<double> lambda2_values;  // strictly increasing, nonempty

    void validate() const;
};

enum class Criterion { AIC = 0, AICc = 1, BIC = 2 };
constexpr std::array<Criterion, 3> kAllCriteria = {Criterion::AIC, Criterion::AICc,
                                                   Criterion::BIC};
const char* criterion_name(Criterion c);

struct ICScores {
    double loglik = 0.0;
    Index df = 0;       // diagonal plus selected off-diagonal entries
    double aic = 0.0;
    double aicc = 0.0;  // +inf when the small-sample correction is undefined
    double bic = 0.0;

    double score(Criterion c) const;
};

// Model degrees of freedom: the always-present diagonal plus one unit per
// distinct nonzero value run along each fused difference chain. Without
// fusion no exact ties occur and this is exactly the usual glasso count
// (diagonal + selected entries); under fusion a block of equalized entries
// is a single estimated value and is counted once.
Index fused_df(const PrecisionEstimate& est);

// Gaussian log-likelihood and selection scores of an estimate. The AICc
// small-sample correction uses the selected parameter count beyond the
// diagonal; including the diagonal would leave the correction undefined for
// every model whenever n <= dim + 1, the usual regime here.
ICScores information_criteria(const PrecisionEstimate& est, const EmpiricalCovariance& S,
                              Index n);

struct GridPoint {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    ICScores scores;
    bool converged = false;
};

struct SelectionResult {
    std::vector<GridPoint> table;  // scan order: lambda2 ascending, lambda1 descending
    std::array<Index, 3> best_index{};                      // into table, per criterion
    std::array<std::optional<PrecisionEstimate>, 3> best_estimate;
    std::vector<PrecisionEstimate> estimates;  // parallel to table when retained

    const GridPoint& best(Criterion c) const {
        return table[static_cast<std::size_t>(best_index[static_cast<std::size_t>(c)])];
    }
    const PrecisionEstimate& best_fit(Criterion c) const {
        return *best_estimate[static_cast<std::size_t>(c)];
    }
};

struct GridOptions {
    PenaltyConfig base;       // lambda1/lambda2 overwritten per grid point
    Index jobs = 1;           // lambda2 rows are independent tasks
    bool retain_estimates = false;  // keep every grid point's fit, not just the winners
};

// Solves every (lambda1, lambda2) grid point, warm-starting each lambda2 row
// from the neighboring solution in decreasing-lambda1 order, scores the fits
// and returns the per-criterion argmin (over converged points when any
// exist). Deterministic given data and grid, regardless of jobs.
SelectionResult grid_search(const TimeCourseDataset& data, const BlockLayout& layout,
                            const GridSpec& grid, const SolverSettings& settings = {},
                            const GridOptions& options = {});

struct StabilityResult {
    std::map<std::pair<Index, Index>, double> frequencies;  // absent = never selected
    double threshold = 0.8;
    Index subsamples = 0;
    Index subsample_size = 0;
    Index non_converged = 0;

    std::vector<std::pair<Index, Index>> stable_edges() const;
};

// Subsample-and-refit edge frequencies at a fixed penalty pair: draws
// floor(fraction*n) replicates without replacement per subsample, fits, and
// counts how often each edge is selected. Per-subsample seeds derive from
// the base seed, so results are reproducible and independent of execution
// order.
StabilityResult stability_selection(const TimeCourseDataset& data, const BlockLayout& layout,
                                    const PenaltyConfig& config, Index subsamples,
                                    double fraction, std::uint64_t seed,
                                    const SolverSettings& settings = {}, Index jobs = 1,
                                    double threshold = 0.8);

// same procedure on caller-provided row index sets (used by the order-invariance tests)
StabilityResult stability_selection_from_indices(const TimeCourseDataset& data,
                                                 const BlockLayout& layout,
                                                 const PenaltyConfig& config,
                                                 const std::vector<std::vector<Index>>& subsets,
                                                 const SolverSettings& settings = {},
                                                 double threshold = 0.8);

}  // namespace tvglasso
