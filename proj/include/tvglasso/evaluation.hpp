#pragma once

#include "tvglasso/solver.hpp"

#include <set>
#include <vector>

namespace tvglasso {

// upper-triangular flat coordinates of selected entries
using SupportSet = std::set<std::pair<Index, Index>>;

// lag-0 network entries above the threshold, at every time point
SupportSet lag0_network_support(const Matrix& theta, const BlockLayout& layout,
                                double threshold);
// lag-0 network entries above the threshold at one time point (0-based)
SupportSet lag0_network_support_at(const Matrix& theta, const BlockLayout& layout,
                                   double threshold, Index time);
// every unmasked off-diagonal entry above the threshold
SupportSet full_support(const Matrix& theta, const BlockLayout& layout, double threshold,
                        const MaskArray& mask = MaskArray());

struct ConfusionMetrics {
    Index tp = 0, fp = 0, tn = 0, fn = 0;
    double fp_rate = 0.0;   // FP / (FP + TN)
    double fn_rate = 0.0;   // FN / (FN + TP)
    double fd_rate = 0.0;   // FP / (FP + TP), 0 when nothing is predicted
    double fnd_rate = 0.0;  // FN / (FN + TN), 0 when everything is predicted
};

// Support-recovery confusion counts over a universe of `universe` comparable
// entries. Zero-denominator rates are reported as 0.
ConfusionMetrics confusion(const SupportSet& est_support, const SupportSet& true_support,
                           Index universe);

struct DiffEdge {
    Index gene_i = 0;
    Index gene_j = 0;
    double weight_k = 0.0;   // value at time k (0 if absent)
    double weight_k1 = 0.0;  // value at time k+1 (0 if absent)
    double delta = 0.0;      // weight_k1 - weight_k
};

// lag-0 graphs at times k and k+1 plus their intersection and the split
// symmetric difference (born = new at k+1, died = gone after k)
struct GraphDiffReport {
    Index time_k = 1;  // 1-based
    std::vector<DiffEdge> graph_k;
    std::vector<DiffEdge> graph_k1;
    std::vector<DiffEdge> intersection;
    std::vector<DiffEdge> born;
    std::vector<DiffEdge> died;
};

GraphDiffReport graph_diff(const PrecisionEstimate& est, Index k_one_based);

struct TimeGraphStats {
    Index time = 1;  // 1-based
    Index edges = 0;
    Index non_isolated_nodes = 0;
    Index components = 0;         // over all g nodes; isolated nodes are singletons
    Index largest_component = 0;  // >= 1 whenever g >= 1
};

// per-time-point statistics of the lag-0 graphs
std::vector<TimeGraphStats> evolution_diagnostics(const PrecisionEstimate& est);

}  // namespace tvglasso
