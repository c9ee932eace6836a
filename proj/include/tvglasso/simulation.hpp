#pragma once

#include "tvglasso/dataset.hpp"
#include "tvglasso/evaluation.hpp"
#include "tvglasso/selection.hpp"

#include <array>
#include <set>
#include <vector>

namespace tvglasso {

// Generator parameters for a slowly evolving ground-truth network: an
// m0-edge starting network over g active genes, n1 edge births and n2 edge
// deaths per transition, plus independent_pad unconnected genes appended to
// each time block.
struct ScenarioSpec {
    Index g = 20;                // active genes per time point
    Index t = 3;
    Index n = 50;                // replicates to sample
    Index m0 = 20;               // edges in the starting network
    Index n1 = 2;                // births per transition
    Index n2 = 2;                // deaths per transition
    Index independent_pad = 0;   // added independent genes
    std::uint64_t seed = 1;
    double weight_min = 0.3;     // edge weights drawn uniformly from +/-[weight_min, weight_max]
    double weight_max = 0.7;
    double autocorrelation = 0.2;  // lag-1 self-self weight for active genes
    double pd_floor = 0.1;         // minimum eigenvalue after the diagonal shift

    Index total_genes() const { return g + independent_pad; }
    Index dim() const { return total_genes() * t; }

    void validate() const;
};

// scenario presets: total genes 20/40/60/80 at t = 3, n = 50
ScenarioSpec preset_scenario(int id);

struct GroundTruthNetwork {
    Matrix theta_true;  // dim x dim, positive definite
    Index g = 0;        // active genes
    Index total_genes = 0;
    Index t = 0;
    std::vector<std::set<std::pair<Index, Index>>> lag0_supports;  // gene pairs per time
    double diagonal_shift = 0.0;

    // flat upper coordinates of all true lag-0 network entries
    SupportSet lag0_flat_support() const;
};

// Draws the starting network uniformly, evolves it by n1 births + n2 deaths
// per transition (surviving edges keep their weights), adds the lag-1
// self-self autocorrelation band, and shifts the diagonal if needed so the
// smallest eigenvalue reaches pd_floor.
GroundTruthNetwork generate_network(const ScenarioSpec& spec);

// n draws from N(0, theta_true^{-1}); bit-reproducible given the seed
TimeCourseDataset sample_gaussian(const GroundTruthNetwork& net, Index n, std::uint64_t seed);

struct StudyRow {
    Criterion criterion = Criterion::AIC;
    double fp = 0.0, fn = 0.0, fd = 0.0, fnd = 0.0;  // means over completed replicates
};

struct StudyReport {
    std::array<StudyRow, 3> rows;  // AIC, AICc, BIC
    Index replicates_requested = 0;
    Index replicates_completed = 0;
    std::vector<std::string> failures;  // one message per failed replicate
    // per replicate, per criterion confusion (replicate-major)
    std::vector<std::array<ConfusionMetrics, 3>> per_replicate;
};

struct StudyOptions {
    bool standardize = true;
    Index lag_cap = 1;
    Index jobs = 1;
    SolverSettings settings;
    PenaltyConfig base;  // lambda values overwritten by the grid
};

// Full simulation study: generate / sample / grid-search / score each
// replicate against the truth on lag-0 network support (padded pairs are
// part of the universe). Per-replicate seeds derive from spec.seed.
StudyReport run_study(const ScenarioSpec& spec, Index reps, const GridSpec& grid,
                      const StudyOptions& options = {});

}  // namespace tvglasso
