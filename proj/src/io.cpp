#include "tvglasso/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tvglasso {

namespace {

std::string full_precision(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string score_field(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return full_precision(v);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    return out;
}

}  // namespace

void write_matrix_text(const std::string& path, const Matrix& m) {
    auto out = open_out(path);
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << full_precision(m(r, c));
        }
        out << '\n';
    }
}

Matrix read_matrix_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw io_error("bad matrix header in " + path);
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            if (!(in >> m(r, c))) throw io_error("truncated matrix in " + path);
    return m;
}

namespace {

std::string name_of(const std::vector<std::string>& names, Index i) {
    if (i >= 0 && i < static_cast<Index>(names.size()))
        return names[static_cast<std::size_t>(i)];
    return "v" + std::to_string(i);
}

}  // namespace

void write_edges_csv(const std::string& path, const std::vector<Edge>& edges,
                     const BlockLayout& layout, const std::vector<std::string>& gene_names,
                     const std::vector<std::string>& time_labels) {
    (void)layout;
    auto out = open_out(path);
    out << "kind,lag,time,gene_i,gene_j,weight\n";
    for (const Edge& e : edges) {
        out << (e.ref.kind == BlockKind::SelfSelf ? 'S' : 'N') << ',' << e.ref.lag << ','
            << name_of(time_labels, e.ref.time) << ',' << name_of(gene_names, e.ref.gene_i)
            << ',' << name_of(gene_names, e.ref.gene_j) << ',' << full_precision(e.weight)
            << '\n';
    }
}

void write_scores_csv(const std::string& path, const SelectionResult& result) {
    auto out = open_out(path);
    out << "lambda1,lambda2,loglik,df,AIC,AICc,BIC,converged\n";
    for (const GridPoint& p : result.table) {
        out << full_precision(p.lambda1) << ',' << full_precision(p.lambda2) << ','
            << full_precision(p.scores.loglik) << ',' << p.scores.df << ','
            << score_field(p.scores.aic) << ',' << score_field(p.scores.aicc) << ','
            << score_field(p.scores.bic) << ',' << (p.converged ? 1 : 0) << '\n';
    }
}

void write_stability_csv(const std::string& path, const StabilityResult& result,
                         const BlockLayout& layout, const std::vector<std::string>& gene_names,
                         const std::vector<std::string>& time_labels) {
    auto out = open_out(path);
    out << "kind,lag,time,gene_i,gene_j,frequency\n";
    for (const auto& [edge, freq] : result.frequencies) {
        const BlockRef ref = layout.classify(edge.first, edge.second);
        out << (ref.kind == BlockKind::SelfSelf ? 'S' : 'N') << ',' << ref.lag << ','
            << name_of(time_labels, ref.time) << ',' << name_of(gene_names, ref.gene_i) << ','
            << name_of(gene_names, ref.gene_j) << ',' << full_precision(freq) << '\n';
    }
}

void write_study_csv(const std::string& path, const StudyReport& report, int scenario_id) {
    auto out = open_out(path);
    out << "scenario,criterion,FP,FN,FD,FnD\n";
    for (const StudyRow& row : report.rows) {
        out << scenario_id << ',' << criterion_name(row.criterion) << ','
            << full_precision(row.fp) << ',' << full_precision(row.fn) << ','
            << full_precision(row.fd) << ',' << full_precision(row.fnd) << '\n';
    }
}

void write_diagnostics_csv(const std::string& path, const std::vector<TimeGraphStats>& stats) {
    auto out = open_out(path);
    out << "time,edges,non_isolated_nodes,components,largest_component\n";
    for (const TimeGraphStats& s : stats)
        out << s.time << ',' << s.edges << ',' << s.non_isolated_nodes << ',' << s.components
            << ',' << s.largest_component << '\n';
}

json block_report_json(const PrecisionEstimate& est, const std::vector<std::string>& gene_names,
                       const std::vector<std::string>& time_labels) {
    const BlockLayout& layout = est.layout;
    json blocks = json::array();
    // group entries by (kind, lag, time)
    for (Index s = 0; s <= layout.lag_cap(); ++s) {
        for (Index k = 0; k + s < layout.times(); ++k) {
            json self_entries = json::array();
            json network_entries = json::array();
            for (Index j = 0; j < layout.genes(); ++j) {
                // lag 0 keeps unordered pairs; the diagonal is reported separately
                const Index i_end = (s == 0) ? j : layout.genes();
                for (Index i = 0; i < i_end; ++i) {
                    const Index p = layout.flat(i, k);
                    const Index q = layout.flat(j, k + s);
                    json entry = {{"gene_i", name_of(gene_names, i)},
                                  {"gene_j", name_of(gene_names, j)},
                                  {"value", est.theta(p, q)}};
                    (i == j ? self_entries : network_entries).push_back(entry);
                }
            }
            if (!self_entries.empty())
                blocks.push_back({{"block", "S_" + std::to_string(s)},
                                  {"lag", s},
                                  {"time", name_of(time_labels, k)},
                                  {"entries", self_entries}});
            if (!network_entries.empty())
                blocks.push_back({{"block", "N_" + std::to_string(s)},
                                  {"lag", s},
                                  {"time", name_of(time_labels, k)},
                                  {"entries", network_entries}});
        }
    }
    json diagonal = json::array();
    for (Index p = 0; p < layout.dim(); ++p)
        diagonal.push_back({{"gene", name_of(gene_names, layout.gene_of(p))},
                            {"time", name_of(time_labels, layout.time_of(p))},
                            {"value", est.theta(p, p)}});
    return {{"genes", gene_names},
            {"times", time_labels},
            {"lag_cap", layout.lag_cap()},
            {"lambda1", est.config.lambda1},
            {"lambda2", est.config.lambda2},
            {"edge_threshold", est.settings.edge_threshold},
            {"diagnostics",
             {{"iterations", est.diagnostics.iterations},
              {"primal_residual", est.diagnostics.primal_residual},
              {"dual_residual", est.diagnostics.dual_residual},
              {"objective", est.diagnostics.objective_value},
              {"converged", est.diagnostics.converged}}},
            {"diagonal", diagonal},
            {"blocks", blocks}};
}

namespace {

json diff_edge_json(const DiffEdge& e, const std::vector<std::string>& gene_names) {
    return {{"gene_i", name_of(gene_names, e.gene_i)},
            {"gene_j", name_of(gene_names, e.gene_j)},
            {"weight_k", e.weight_k},
            {"weight_k1", e.weight_k1},
            {"delta", e.delta}};
}

json diff_edges_json(const std::vector<DiffEdge>& edges,
                     const std::vector<std::string>& gene_names) {
    json arr = json::array();
    for (const DiffEdge& e : edges) arr.push_back(diff_edge_json(e, gene_names));
    return arr;
}

void write_dot(const std::string& path, const std::vector<std::string>& gene_names,
               Index genes, const std::vector<DiffEdge>& solid,
               const std::vector<DiffEdge>* dashed, bool label_k1) {
    auto out = open_out(path);
    out << "graph {\n";
    for (Index i = 0; i < genes; ++i) out << "  \"" << name_of(gene_names, i) << "\";\n";
    char buf[32];
    auto emit = [&](const DiffEdge& e, const char* style) {
        const double w = label_k1 ? e.weight_k1 : e.weight_k;
        std::snprintf(buf, sizeof(buf), "%.3g", w);
        out << "  \"" << name_of(gene_names, e.gene_i) << "\" -- \""
            << name_of(gene_names, e.gene_j) << "\" [label=\"" << buf << "\", style="
            << style << "];\n";
    };
    for (const DiffEdge& e : solid) emit(e, "solid");
    if (dashed)
        for (const DiffEdge& e : *dashed) emit(e, "dashed");
    out << "}\n";
}

}  // namespace

json graph_diff_json(const GraphDiffReport& report, const std::vector<std::string>& gene_names) {
    return {{"time_k", report.time_k},
            {"time_k1", report.time_k + 1},
            {"graph_k", diff_edges_json(report.graph_k, gene_names)},
            {"graph_k1", diff_edges_json(report.graph_k1, gene_names)},
            {"intersection", diff_edges_json(report.intersection, gene_names)},
            {"born", diff_edges_json(report.born, gene_names)},
            {"died", diff_edges_json(report.died, gene_names)}};
}

void write_diff_dot_panels(const std::string& prefix, const GraphDiffReport& report,
                           const std::vector<std::string>& gene_names, Index genes) {
    write_dot(prefix + "_graph_k.dot", gene_names, genes, report.graph_k, nullptr, false);
    write_dot(prefix + "_graph_k1.dot", gene_names, genes, report.graph_k1, nullptr, true);
    write_dot(prefix + "_intersection.dot", gene_names, genes, report.intersection, nullptr,
              false);
    // difference panel: born solid, died dashed
    write_dot(prefix + "_difference.dot", gene_names, genes, report.born, &report.died, true);
}

void write_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace tvglasso
