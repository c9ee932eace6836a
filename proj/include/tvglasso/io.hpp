#pragma once

#include "tvglasso/evaluation.hpp"
#include "tvglasso/selection.hpp"
#include "tvglasso/simulation.hpp"
#include "tvglasso/solver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tvglasso {

using json = nlohmann::json;

// dense matrix text: first line "rows cols", then row-major entries at full
// precision; round-trips doubles bit-exactly
void write_matrix_text(const std::string& path, const Matrix& m);
Matrix read_matrix_text(const std::string& path);

void write_edges_csv(const std::string& path, const std::vector<Edge>& edges,
                     const BlockLayout& layout, const std::vector<std::string>& gene_names,
                     const std::vector<std::string>& time_labels);

void write_scores_csv(const std::string& path, const SelectionResult& result);

void write_stability_csv(const std::string& path, const StabilityResult& result,
                         const BlockLayout& layout, const std::vector<std::string>& gene_names,
                         const std::vector<std::string>& time_labels);

void write_study_csv(const std::string& path, const StudyReport& report, int scenario_id);

void write_diagnostics_csv(const std::string& path, const std::vector<TimeGraphStats>& stats);

// estimate grouped by S_s^t / N_s^t blocks
json block_report_json(const PrecisionEstimate& est, const std::vector<std::string>& gene_names,
                       const std::vector<std::string>& time_labels);

json graph_diff_json(const GraphDiffReport& report, const std::vector<std::string>& gene_names);

// one DOT file per panel under `prefix`: _graph_k, _graph_k1, _intersection,
// _difference (born solid, died dashed)
void write_diff_dot_panels(const std::string& prefix, const GraphDiffReport& report,
                           const std::vector<std::string>& gene_names, Index genes);

void write_json(const std::string& path, const json& j);

}  // namespace tvglasso
