#include "tvglasso/selection.hpp"

#include "tvglasso/parallel.hpp"
#include "tvglasso/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvglasso {

void GridSpec::validate() const {
    if (lambda1_values.empty() || lambda2_values.empty())
        throw validation_error("grid: lambda value lists must be nonempty");
    auto check = [](const std::vector<double>& v, const char* name) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0.0) throw validation_error(std::string("grid: ") + name + " must be nonnegative");
            if (i > 0 && v[i] <= v[i - 1])
                throw validation_error(std::string("grid: ") + name + " must be strictly increasing");
        }
    };
    check(lambda1_values, "lambda1");
    check(lambda2_values, "lambda2");
}

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::AIC: return "AIC";
        case Criterion::AICc: return "AICc";
        case Criterion::BIC: return "BIC";
    }
    return "?";
}

double ICScores::score(Criterion c) const {
    switch (c) {
        case Criterion::AIC: return aic;
        case Criterion::AICc: return aicc;
        case Criterion::BIC: return bic;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

Index fused_df(const PrecisionEstimate& est) {
    const DifferenceMap map = build_difference_map(est.layout, est.config.fuse_self_self);
    const double threshold = est.settings.edge_threshold;
    const MaskArray mask = combined_mask(est.layout, est.config);
    Index df = est.layout.dim();
    for (const auto& chain : map.chains()) {
        bool in_run = false;
        double run_value = 0.0;
        for (const auto& [p, q] : chain.coords) {
            const double v = est.theta(p, q);
            if (std::abs(v) > threshold) {
                if (!in_run ||
                    std::abs(v - run_value) > 1e-9 * std::max(1.0, std::abs(v)))
                    ++df;
                in_run = true;
                run_value = v;
            } else {
                in_run = false;
            }
        }
    }
    if (!est.config.fuse_self_self) {
        // self-self entries at lag >= 1 sit outside the chains then
        for (Index s = 1; s <= est.layout.lag_cap(); ++s)
            for (Index k = 0; k + s < est.layout.times(); ++k)
                for (Index i = 0; i < est.layout.genes(); ++i) {
                    const Index p = est.layout.flat(i, k);
                    const Index q = est.layout.flat(i, k + s);
                    if (!mask(p, q) && std::abs(est.theta(p, q)) > threshold) ++df;
                }
    }
    return df;
}

ICScores information_criteria(const PrecisionEstimate& est, const EmpiricalCovariance& S,
                              Index n) {
    if (n < 2) throw validation_error("information_criteria: n must be >= 2");
    Eigen::LLT<Matrix> llt(est.theta);
    if (llt.info() != Eigen::Success)
        throw validation_error("information_criteria: estimate is not positive definite");
    double logdet = 0.0;
    for (Index i = 0; i < est.theta.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));

    const Index dim = est.theta.rows();
    const double trace = S.s.cwiseProduct(est.theta).sum();
    const double nd = static_cast<double>(n);

    ICScores scores;
    scores.loglik = 0.5 * nd * (logdet - trace) -
                    0.5 * nd * static_cast<double>(dim) * std::log(2.0 * std::acos(-1.0));

    scores.df = fused_df(est);
    scores.aic = -2.0 * scores.loglik + 2.0 * static_cast<double>(scores.df);
    scores.bic = -2.0 * scores.loglik + static_cast<double>(scores.df) * std::log(nd);
    const double k = static_cast<double>(scores.df - dim);
    if (nd > k + 1.0)
        scores.aicc = scores.aic + 2.0 * k * (k + 1.0) / (nd - k - 1.0);
    else
        scores.aicc = std::numeric_limits<double>::infinity();
    return scores;
}

SelectionResult grid_search(const TimeCourseDataset& data, const BlockLayout& layout,
                            const GridSpec& grid, const SolverSettings& settings,
                            const GridOptions& options) {
    grid.validate();
    if (data.dim() != layout.dim())
        throw validation_error("grid_search: dataset dimension does not match layout");
    const EmpiricalCovariance S = empirical_covariance(data);
    const Index n = data.n();

    const Index n1 = static_cast<Index>(grid.lambda1_values.size());
    const Index n2 = static_cast<Index>(grid.lambda2_values.size());

    struct RowResult {
        std::vector<GridPoint> points;  // lambda1 descending
        std::vector<PrecisionEstimate> estimates;
        std::array<std::optional<PrecisionEstimate>, 3> best;
        std::array<Index, 3> best_local{};  // index within points
    };
    std::vector<RowResult> rows(static_cast<std::size_t>(n2));

    auto better = [](double a, double b) {
        if (std::isnan(a)) return false;
        if (std::isnan(b)) return true;
        return a < b;
    };

    parallel_for(n2, options.jobs, [&](Index row) {
        RowResult& out = rows[static_cast<std::size_t>(row)];
        const double lambda2 = grid.lambda2_values[static_cast<std::size_t>(row)];
        Matrix warm;
        bool have_warm = false;
        std::array<double, 3> best_score;
        best_score.fill(std::numeric_limits<double>::infinity());
        std::array<bool, 3> best_converged{};
        for (Index col = n1 - 1; col >= 0; --col) {
            PenaltyConfig config = options.base;
            config.lambda1 = grid.lambda1_values[static_cast<std::size_t>(col)];
            config.lambda2 = lambda2;
            PrecisionEstimate est =
                solve(S, layout, config, settings, have_warm ? &warm : nullptr);
            warm = est.theta;
            have_warm = true;

            GridPoint point;
            point.lambda1 = config.lambda1;
            point.lambda2 = lambda2;
            point.converged = est.diagnostics.converged;
            point.scores = information_criteria(est, S, n);
            out.points.push_back(point);
            if (options.retain_estimates) out.estimates.push_back(est);

            for (const Criterion c : kAllCriteria) {
                const auto ci = static_cast<std::size_t>(c);
                const double score = point.scores.score(c);
                // converged points always outrank non-converged ones
                const bool wins = !out.best[ci].has_value() ||
                                  (point.converged && !best_converged[ci]) ||
                                  (point.converged == best_converged[ci] &&
                                   better(score, best_score[ci]));
                if (wins) {
                    best_score[ci] = score;
                    best_converged[ci] = point.converged;
                    out.best[ci] = est;
                    out.best_local[ci] = static_cast<Index>(out.points.size()) - 1;
                }
            }
        }
    });

    SelectionResult result;
    std::array<double, 3> best_score;
    best_score.fill(std::numeric_limits<double>::infinity());
    std::array<bool, 3> best_converged{};
    for (Index row = 0; row < n2; ++row) {
        RowResult& r = rows[static_cast<std::size_t>(row)];
        const Index offset = static_cast<Index>(result.table.size());
        for (const auto& p : r.points) result.table.push_back(p);
        for (auto& e : r.estimates) result.estimates.push_back(std::move(e));
        for (const Criterion c : kAllCriteria) {
            const auto ci = static_cast<std::size_t>(c);
            if (!r.best[ci].has_value()) continue;
            const GridPoint& candidate =
                r.points[static_cast<std::size_t>(r.best_local[ci])];
            const double score = candidate.scores.score(c);
            const bool wins = !result.best_estimate[ci].has_value() ||
                              (candidate.converged && !best_converged[ci]) ||
                              (candidate.converged == best_converged[ci] &&
                               better(score, best_score[ci]));
            if (wins) {
                best_score[ci] = score;
                best_converged[ci] = candidate.converged;
                result.best_index[ci] = offset + r.best_local[ci];
                result.best_estimate[ci] = std::move(r.best[ci]);
            }
        }
    }
    return result;
}

std::vector<std::pair<Index, Index>> StabilityResult::stable_edges() const {
    std::vector<std::pair<Index, Index>> out;
    for (const auto& [edge, freq] : frequencies)
        if (freq >= threshold) out.push_back(edge);
    return out;
}

StabilityResult stability_selection_from_indices(const TimeCourseDataset& data,
                                                 const BlockLayout& layout,
                                                 const PenaltyConfig& config,
                                                 const std::vector<std::vector<Index>>& subsets,
                                                 const SolverSettings& settings,
                                                 double threshold) {
    if (subsets.size() < 2)
        throw validation_error("stability selection requires at least 2 subsamples");
    StabilityResult result;
    result.threshold = threshold;
    result.subsamples = static_cast<Index>(subsets.size());
    result.subsample_size = subsets.empty() ? 0 : static_cast<Index>(subsets.front().size());
    for (const auto& subset : subsets) {
        if (static_cast<Index>(subset.size()) < 2)
            throw validation_error("stability selection: subsample size must be >= 2");
        const TimeCourseDataset sub = data.subset_rows(subset);
        const EmpiricalCovariance S = empirical_covariance(sub);
        const PrecisionEstimate est = solve(S, layout, config, settings);
        if (!est.diagnostics.converged) ++result.non_converged;
        for (const Edge& e : edge_set(est)) result.frequencies[{e.p, e.q}] += 1.0;
    }
    for (auto& [edge, count] : result.frequencies)
        count /= static_cast<double>(result.subsamples);
    return result;
}

StabilityResult stability_selection(const TimeCourseDataset& data, const BlockLayout& layout,
                                    const PenaltyConfig& config, Index subsamples,
                                    double fraction, std::uint64_t seed,
                                    const SolverSettings& settings, Index jobs,
                                    double threshold) {
    if (subsamples < 2) throw validation_error("stability selection requires >= 2 subsamples");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw validation_error("stability selection: fraction must be in (0, 1)");
    const Index n = data.n();
    const Index sub_n = static_cast<Index>(std::floor(fraction * static_cast<double>(n)));
    if (sub_n < 2) throw validation_error("stability selection: subsample size must be >= 2");

    std::vector<std::map<std::pair<Index, Index>, double>> counts(
        static_cast<std::size_t>(subsamples));
    std::vector<Index> bad(static_cast<std::size_t>(subsamples), 0);
    parallel_for(subsamples, jobs, [&](Index b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        const auto rows = sample_without_replacement(n, sub_n, rng);
        const TimeCourseDataset sub = data.subset_rows(rows);
        const EmpiricalCovariance S = empirical_covariance(sub);
        const PrecisionEstimate est = solve(S, layout, config, settings);
        if (!est.diagnostics.converged) bad[static_cast<std::size_t>(b)] = 1;
        for (const Edge& e : edge_set(est)) counts[static_cast<std::size_t>(b)][{e.p, e.q}] = 1.0;
    });

    StabilityResult result;
    result.threshold = threshold;
    result.subsamples = subsamples;
    result.subsample_size = sub_n;
    for (Index b = 0; b < subsamples; ++b) {
        result.non_converged += bad[static_cast<std::size_t>(b)];
        for (const auto& [edge, one] : counts[static_cast<std::size_t>(b)])
            result.frequencies[edge] += one;
    }
    for (auto& [edge, count] : result.frequencies)
        count /= static_cast<double>(subsamples);
    return result;
}

}  // namespace tvglasso
