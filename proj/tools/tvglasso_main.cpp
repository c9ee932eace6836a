#include "tvglasso/dataset.hpp"
#include "tvglasso/evaluation.hpp"
#include "tvglasso/io.hpp"
#include "tvglasso/rng.hpp"
#include "tvglasso/selection.hpp"
#include "tvglasso/simulation.hpp"
#include "tvglasso/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace tvglasso;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConverged = 3;
constexpr int kExitIo = 4;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void ensure_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw io_error("cannot create output directory " + out);
}

json diagnostics_json(const SolveDiagnostics& d) {
    return {{"iterations", d.iterations},
            {"primal_residual", d.primal_residual},
            {"dual_residual", d.dual_residual},
            {"objective", d.objective_value},
            {"rho_final", d.rho_final},
            {"converged", d.converged}};
}

// shared dataset/estimation flags
struct FitFlags {
    std::string data_path;
    Index genes = 0;
    Index times = 0;
    Index lag_cap = -1;  // -1: min(1, t-1)
    bool no_standardize = false;
    bool penalize_diagonal = false;
    bool no_fuse_self = false;
    double tol = 1e-6;
    Index max_iter = 10000;
    double rho = 1.0;
    double edge_threshold = 1e-4;

    void add_dataset_flags(CLI::App* cmd) {
        cmd->add_option("--data", data_path, "input CSV (header GENE@TIME)")->required();
        cmd->add_option("--genes", genes, "genes per time point")->required();
        cmd->add_option("--times", times, "number of time points")->required();
        cmd->add_option("--lag-cap", lag_cap,
                        "maximum nonzero lag (default min(1, times-1))");
        cmd->add_flag("--no-standardize", no_standardize,
                      "use raw columns instead of standardizing");
    }
    void add_solver_flags(CLI::App* cmd) {
        cmd->add_flag("--penalize-diagonal", penalize_diagonal,
                      "apply lambda1 to the diagonal too");
        cmd->add_flag("--no-fuse-self", no_fuse_self,
                      "exclude lag>=1 self-self entries from the fused penalty");
        cmd->add_option("--tol", tol, "solver tolerance on scaled residuals");
        cmd->add_option("--max-iter", max_iter, "solver iteration cap");
        cmd->add_option("--rho", rho, "initial ADMM penalty parameter");
        cmd->add_option("--edge-threshold", edge_threshold,
                        "magnitude below which an entry counts as zero");
    }

    Index resolved_lag_cap() const {
        if (lag_cap >= 0) return lag_cap;
        return std::min<Index>(1, times - 1);
    }
    SolverSettings settings() const {
        SolverSettings s;
        s.tol = tol;
        s.max_iter = max_iter;
        s.rho_init = rho;
        s.edge_threshold = edge_threshold;
        return s;
    }
    PenaltyConfig config(double l1, double l2) const {
        PenaltyConfig c;
        c.lambda1 = l1;
        c.lambda2 = l2;
        c.penalize_diagonal = penalize_diagonal;
        c.fuse_self_self = !no_fuse_self;
        return c;
    }
    TimeCourseDataset load() const {
        TimeCourseDataset data = load_csv(data_path, genes, times);
        if (data.n() < 2) throw validation_error("need at least 2 complete replicate rows");
        return no_standardize ? data : standardize(data);
    }
    json to_json() const {
        return {{"data", data_path},
                {"genes", genes},
                {"times", times},
                {"lag_cap", resolved_lag_cap()},
                {"standardize", !no_standardize},
                {"penalize_diagonal", penalize_diagonal},
                {"fuse_self_self", !no_fuse_self},
                {"tol", tol},
                {"max_iter", max_iter},
                {"rho", rho},
                {"edge_threshold", edge_threshold}};
    }
};

void write_manifest(const std::string& out, const std::string& command, json parameters,
                    const std::vector<std::string>& outputs, double elapsed) {
    json manifest = {{"command", command},
                     {"parameters", std::move(parameters)},
                     {"outputs", outputs},
                     {"elapsed_seconds", elapsed}};
    write_json(out + "/manifest.json", manifest);
}

std::vector<double> parse_lambda_list(const std::string& text, const char* name) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw validation_error(std::string(name) + ": bad value '" + item + "'");
        }
    }
    if (values.empty()) throw validation_error(std::string(name) + ": empty list");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

int cmd_fit(const FitFlags& flags, double lambda1, double lambda2, const std::string& out) {
    Timer timer;
    const TimeCourseDataset data = flags.load();
    const BlockLayout layout(flags.genes, flags.times, flags.resolved_lag_cap());
    const EmpiricalCovariance S = empirical_covariance(data);
    const PrecisionEstimate est =
        solve(S, layout, flags.config(lambda1, lambda2), flags.settings());

    ensure_dir(out);
    write_matrix_text(out + "/theta.txt", est.theta);
    write_edges_csv(out + "/edges.csv", edge_set(est), layout, data.gene_names,
                    data.time_labels);
    write_json(out + "/block_report.json",
               block_report_json(est, data.gene_names, data.time_labels));
    json params = flags.to_json();
    params["lambda1"] = lambda1;
    params["lambda2"] = lambda2;
    params["diagnostics"] = diagnostics_json(est.diagnostics);
    write_manifest(out, "fit", params, {"theta.txt", "edges.csv", "block_report.json"},
                   timer.seconds());

    std::printf("fit: %lld iterations, %s, objective %.6f, %zu edges\n",
                static_cast<long long>(est.diagnostics.iterations),
                est.diagnostics.converged ? "converged" : "NOT converged",
                est.diagnostics.objective_value, edge_set(est).size());
    return est.diagnostics.converged ? kExitOk : kExitNonConverged;
}

int cmd_grid(const FitFlags& flags, const std::string& l1_text, const std::string& l2_text,
             Index jobs, const std::string& out) {
    Timer timer;
    const TimeCourseDataset data = flags.load();
    const BlockLayout layout(flags.genes, flags.times, flags.resolved_lag_cap());
    GridSpec grid{parse_lambda_list(l1_text, "--lambda1"),
                  parse_lambda_list(l2_text, "--lambda2")};
    GridOptions options;
    options.base = flags.config(0, 0);
    options.jobs = jobs;
    const SelectionResult result = grid_search(data, layout, grid, flags.settings(), options);

    ensure_dir(out);
    write_scores_csv(out + "/scores.csv", result);
    std::vector<std::string> outputs = {"scores.csv"};
    bool all_converged = true;
    json winners;
    for (const Criterion c : kAllCriteria) {
        const GridPoint& best = result.best(c);
        const PrecisionEstimate& fit = result.best_fit(c);
        all_converged = all_converged && best.converged;
        std::string tag = criterion_name(c);
        for (auto& ch : tag) ch = static_cast<char>(std::tolower(ch));
        write_matrix_text(out + "/theta_best_" + tag + ".txt", fit.theta);
        write_edges_csv(out + "/edges_best_" + tag + ".csv", edge_set(fit), layout,
                        data.gene_names, data.time_labels);
        outputs.push_back("theta_best_" + tag + ".txt");
        outputs.push_back("edges_best_" + tag + ".csv");
        winners[criterion_name(c)] = {{"lambda1", best.lambda1},
                                      {"lambda2", best.lambda2},
                                      {"df", best.scores.df},
                                      {"converged", best.converged}};
    }
    json params = flags.to_json();
    params["lambda1_grid"] = grid.lambda1_values;
    params["lambda2_grid"] = grid.lambda2_values;
    params["jobs"] = jobs;
    params["winners"] = winners;
    write_manifest(out, "grid", params, outputs, timer.seconds());

    const GridPoint& preferred = result.best(Criterion::AICc);
    std::printf("grid: %zu points; preferred model (AICc): lambda1=%g lambda2=%g df=%lld\n",
                result.table.size(), preferred.lambda1, preferred.lambda2,
                static_cast<long long>(preferred.scores.df));
    return all_converged ? kExitOk : kExitNonConverged;
}

void add_scenario_flags(CLI::App* cmd, ScenarioSpec& spec, int& scenario_id) {
    cmd->add_option("--scenario", scenario_id, "preset scenario 1..4 (total genes 20/40/60/80)");
    cmd->add_option("--genes", spec.g, "active genes per time point");
    cmd->add_option("--times", spec.t, "time points");
    cmd->add_option("--n", spec.n, "replicates to sample");
    cmd->add_option("--m0", spec.m0, "edges in the starting network");
    cmd->add_option("--n1", spec.n1, "edge births per transition");
    cmd->add_option("--n2", spec.n2, "edge deaths per transition");
    cmd->add_option("--pad", spec.independent_pad, "added independent genes");
    cmd->add_option("--autocorr", spec.autocorrelation, "lag-1 self-self weight");
    cmd->add_option("--weight-min", spec.weight_min, "minimum |edge weight|");
    cmd->add_option("--weight-max", spec.weight_max, "maximum |edge weight|");
    cmd->add_option("--pd-floor", spec.pd_floor, "minimum eigenvalue after the shift");
    cmd->add_option("--seed", spec.seed, "master seed");
}

ScenarioSpec resolve_scenario(const CLI::App* cmd, ScenarioSpec custom, int scenario_id) {
    if (scenario_id == 0) return custom;
    ScenarioSpec spec = preset_scenario(scenario_id);
    // explicit flags override the preset
    spec.seed = custom.seed;
    if (cmd->count("--genes")) spec.g = custom.g;
    if (cmd->count("--times")) spec.t = custom.t;
    if (cmd->count("--n")) spec.n = custom.n;
    if (cmd->count("--m0")) spec.m0 = custom.m0;
    if (cmd->count("--n1")) spec.n1 = custom.n1;
    if (cmd->count("--n2")) spec.n2 = custom.n2;
    if (cmd->count("--pad")) spec.independent_pad = custom.independent_pad;
    if (cmd->count("--autocorr")) spec.autocorrelation = custom.autocorrelation;
    if (cmd->count("--weight-min")) spec.weight_min = custom.weight_min;
    if (cmd->count("--weight-max")) spec.weight_max = custom.weight_max;
    if (cmd->count("--pd-floor")) spec.pd_floor = custom.pd_floor;
    return spec;
}

json scenario_json(const ScenarioSpec& spec, int scenario_id) {
    return {{"scenario", scenario_id},
            {"genes", spec.g},
            {"times", spec.t},
            {"n", spec.n},
            {"m0", spec.m0},
            {"n1", spec.n1},
            {"n2", spec.n2},
            {"pad", spec.independent_pad},
            {"autocorrelation", spec.autocorrelation},
            {"weight_min", spec.weight_min},
            {"weight_max", spec.weight_max},
            {"pd_floor", spec.pd_floor},
            {"seed", spec.seed}};
}

int cmd_simulate(const ScenarioSpec& spec, int scenario_id, const std::string& out) {
    Timer timer;
    const GroundTruthNetwork net = generate_network(spec);
    const TimeCourseDataset data =
        sample_gaussian(net, spec.n, derive_seed(spec.seed, 0x9d));

    ensure_dir(out);
    write_csv(data, out + "/dataset.csv");
    write_matrix_text(out + "/truth_theta.txt", net.theta_true);
    const BlockLayout layout(spec.total_genes(), spec.t, spec.t - 1);
    write_edges_csv(out + "/truth_edges.csv",
                    edges_from_matrix(net.theta_true, layout, 0.0), layout, data.gene_names,
                    data.time_labels);
    write_manifest(out, "simulate", scenario_json(spec, scenario_id),
                   {"dataset.csv", "truth_theta.txt", "truth_edges.csv"}, timer.seconds());
    std::printf("simulate: wrote %lld x %lld dataset (diagonal shift %.4f)\n",
                static_cast<long long>(data.n()), static_cast<long long>(data.dim()),
                net.diagonal_shift);
    return kExitOk;
}

int cmd_study(const ScenarioSpec& spec, int scenario_id, Index reps,
              const std::string& l1_text, const std::string& l2_text, Index jobs,
              const FitFlags& flags, const std::string& out) {
    Timer timer;
    GridSpec grid{parse_lambda_list(l1_text, "--lambda1"),
                  parse_lambda_list(l2_text, "--lambda2")};
    StudyOptions options;
    options.jobs = jobs;
    options.settings = flags.settings();
    options.base = flags.config(0, 0);
    options.standardize = !flags.no_standardize;
    const StudyReport report = run_study(spec, reps, grid, options);

    ensure_dir(out);
    write_study_csv(out + "/study.csv", report, scenario_id);
    json params = scenario_json(spec, scenario_id);
    params["reps"] = reps;
    params["lambda1_grid"] = grid.lambda1_values;
    params["lambda2_grid"] = grid.lambda2_values;
    params["jobs"] = jobs;
    params["completed"] = report.replicates_completed;
    params["failures"] = report.failures;
    write_manifest(out, "study", params, {"study.csv"}, timer.seconds());

    for (const StudyRow& row : report.rows)
        std::printf("study: %-4s FP=%.4f FN=%.4f FD=%.4f FnD=%.4f\n",
                    criterion_name(row.criterion), row.fp, row.fn, row.fd, row.fnd);
    if (!report.failures.empty())
        std::fprintf(stderr, "study: %zu replicate(s) failed\n", report.failures.size());
    return report.replicates_completed > 0 ? kExitOk : kExitNonConverged;
}

int cmd_stability(const FitFlags& flags, double lambda1, double lambda2, Index subsamples,
                  double fraction, double threshold, std::uint64_t seed, Index jobs,
                  const std::string& out) {
    Timer timer;
    const TimeCourseDataset data = flags.load();
    const BlockLayout layout(flags.genes, flags.times, flags.resolved_lag_cap());
    const StabilityResult result =
        stability_selection(data, layout, flags.config(lambda1, lambda2), subsamples,
                            fraction, seed, flags.settings(), jobs, threshold);

    ensure_dir(out);
    write_stability_csv(out + "/stability.csv", result, layout, data.gene_names,
                        data.time_labels);
    json params = flags.to_json();
    params["lambda1"] = lambda1;
    params["lambda2"] = lambda2;
    params["subsamples"] = subsamples;
    params["fraction"] = fraction;
    params["threshold"] = threshold;
    params["seed"] = seed;
    params["jobs"] = jobs;
    params["non_converged_fits"] = result.non_converged;
    write_manifest(out, "stability", params, {"stability.csv"}, timer.seconds());

    std::printf("stability: %zu edges ever selected, %zu stable at threshold %.2f\n",
                result.frequencies.size(), result.stable_edges().size(), threshold);
    return kExitOk;
}

int cmd_diff(const std::string& theta_path, Index genes, Index times, Index lag_cap,
             const std::string& names_text, double edge_threshold, Index k_opt,
             const std::string& out) {
    Timer timer;
    const Matrix theta = read_matrix_text(theta_path);
    if (theta.rows() != genes * times || theta.cols() != genes * times)
        throw validation_error("theta dimension does not match --genes * --times");
    if (times < 2) throw validation_error("diff needs at least 2 time points");
    const Index cap = (lag_cap >= 0) ? lag_cap : std::min<Index>(1, times - 1);
    const BlockLayout layout(genes, times, cap);

    std::vector<std::string> gene_names;
    if (!names_text.empty()) {
        std::stringstream ss(names_text);
        std::string item;
        while (std::getline(ss, item, ',')) gene_names.push_back(item);
        if (static_cast<Index>(gene_names.size()) != genes)
            throw validation_error("--gene-names must list exactly --genes names");
    } else {
        for (Index i = 0; i < genes; ++i) gene_names.push_back("g" + std::to_string(i + 1));
    }

    SolverSettings settings;
    settings.edge_threshold = edge_threshold;
    SolveDiagnostics diag;
    diag.converged = true;
    PrecisionEstimate est{theta, layout, PenaltyConfig{}, settings, diag};

    ensure_dir(out);
    std::vector<std::string> outputs;
    json diffs = json::array();
    const Index k_begin = (k_opt >= 1) ? k_opt : 1;
    const Index k_end = (k_opt >= 1) ? k_opt : times - 1;
    for (Index k = k_begin; k <= k_end; ++k) {
        const GraphDiffReport report = graph_diff(est, k);
        const std::string prefix = out + "/diff_t" + std::to_string(k);
        write_diff_dot_panels(prefix, report, gene_names, genes);
        diffs.push_back(graph_diff_json(report, gene_names));
        for (const char* suffix :
             {"_graph_k.dot", "_graph_k1.dot", "_intersection.dot", "_difference.dot"})
            outputs.push_back("diff_t" + std::to_string(k) + suffix);
    }
    write_json(out + "/diff.json", diffs);
    write_diagnostics_csv(out + "/diagnostics.csv", evolution_diagnostics(est));
    outputs.push_back("diff.json");
    outputs.push_back("diagnostics.csv");
    write_manifest(out, "diff",
                   {{"theta", theta_path},
                    {"genes", genes},
                    {"times", times},
                    {"lag_cap", cap},
                    {"edge_threshold", edge_threshold},
                    {"k", k_opt}},
                   outputs, timer.seconds());
    std::printf("diff: wrote %zu panel sets\n", diffs.size());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"penalized estimation of sparse, slowly changing dynamic Gaussian "
                 "graphical models"};
    app.require_subcommand(1);
    // optional config file; explicit flags override file values
    app.set_config("--config", "", "read defaults from an INI/TOML file");

    // fit
    FitFlags fit_flags;
    double fit_l1 = 0.0, fit_l2 = 0.0;
    std::string fit_out = "tvglasso_fit";
    auto* fit = app.add_subcommand("fit", "estimate a precision matrix at fixed penalties");
    fit_flags.add_dataset_flags(fit);
    fit_flags.add_solver_flags(fit);
    fit->add_option("--lambda1", fit_l1, "sparsity weight")->required();
    fit->add_option("--lambda2", fit_l2, "fusion weight")->required();
    fit->add_option("--out", fit_out, "output directory");

    // grid
    FitFlags grid_flags;
    std::string grid_l1, grid_l2, grid_out = "tvglasso_grid";
    Index grid_jobs = 1;
    auto* grid = app.add_subcommand("grid", "information-criterion search over a lambda grid");
    grid_flags.add_dataset_flags(grid);
    grid_flags.add_solver_flags(grid);
    grid->add_option("--lambda1", grid_l1, "comma-separated lambda1 values")->required();
    grid->add_option("--lambda2", grid_l2, "comma-separated lambda2 values")->required();
    grid->add_option("--jobs", grid_jobs, "parallel lambda2 rows");
    grid->add_option("--out", grid_out, "output directory");

    // simulate
    ScenarioSpec sim_spec;
    int sim_scenario = 0;
    std::string sim_out = "tvglasso_sim";
    auto* simulate =
        app.add_subcommand("simulate", "generate a ground-truth network and samples");
    add_scenario_flags(simulate, sim_spec, sim_scenario);
    simulate->add_option("--out", sim_out, "output directory");

    // study
    ScenarioSpec study_spec;
    int study_scenario = 0;
    Index study_reps = 20, study_jobs = 1;
    std::string study_l1 = "0.14,0.18,0.22,0.26,0.30,0.35,0.41,0.48";
    std::string study_l2 = "0,0.3,0.7,1.5";
    std::string study_out = "tvglasso_study";
    FitFlags study_fit_flags;
    auto* study =
        app.add_subcommand("study", "full simulation study with per-criterion scoring");
    add_scenario_flags(study, study_spec, study_scenario);
    study->add_option("--reps", study_reps, "replicates");
    study->add_option("--lambda1", study_l1, "comma-separated lambda1 grid");
    study->add_option("--lambda2", study_l2, "comma-separated lambda2 grid");
    study->add_option("--jobs", study_jobs, "parallel replicates");
    study->add_option("--tol", study_fit_flags.tol, "solver tolerance");
    study->add_option("--max-iter", study_fit_flags.max_iter, "solver iteration cap");
    study->add_option("--edge-threshold", study_fit_flags.edge_threshold, "edge threshold");
    study->add_flag("--no-standardize", study_fit_flags.no_standardize,
                    "skip standardization of simulated data");
    study->add_option("--out", study_out, "output directory");

    // stability
    FitFlags stab_flags;
    double stab_l1 = 0.0, stab_l2 = 0.0, stab_fraction = 0.5, stab_threshold = 0.8;
    Index stab_subsamples = 50, stab_jobs = 1;
    std::uint64_t stab_seed = 1;
    std::string stab_out = "tvglasso_stability";
    auto* stability = app.add_subcommand("stability", "subsample edge-selection frequencies");
    stab_flags.add_dataset_flags(stability);
    stab_flags.add_solver_flags(stability);
    stability->add_option("--lambda1", stab_l1, "sparsity weight")->required();
    stability->add_option("--lambda2", stab_l2, "fusion weight")->required();
    stability->add_option("--subsamples", stab_subsamples, "number of subsamples");
    stability->add_option("--fraction", stab_fraction, "subsample fraction of n");
    stability->add_option("--threshold", stab_threshold, "stable-edge frequency cutoff");
    stability->add_option("--seed", stab_seed, "subsampling seed");
    stability->add_option("--jobs", stab_jobs, "parallel subsamples");
    stability->add_option("--out", stab_out, "output directory");

    // diff
    std::string diff_theta, diff_names, diff_out = "tvglasso_diff";
    Index diff_genes = 0, diff_times = 0, diff_lag_cap = -1, diff_k = 0;
    double diff_threshold = 1e-4;
    auto* diff = app.add_subcommand(
        "diff", "graph/intersection/difference panels from a stored fit");
    diff->add_option("--theta", diff_theta, "stored theta matrix (theta.txt)")->required();
    diff->add_option("--genes", diff_genes, "genes per time point")->required();
    diff->add_option("--times", diff_times, "number of time points")->required();
    diff->add_option("--lag-cap", diff_lag_cap, "maximum nonzero lag");
    diff->add_option("--gene-names", diff_names, "comma-separated gene names");
    diff->add_option("--edge-threshold", diff_threshold, "edge threshold");
    diff->add_option("--k", diff_k, "single time pair (k, k+1); default all");
    diff->add_option("--out", diff_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_flags, fit_l1, fit_l2, fit_out);
        if (grid->parsed()) return cmd_grid(grid_flags, grid_l1, grid_l2, grid_jobs, grid_out);
        if (simulate->parsed()) {
            const ScenarioSpec spec = resolve_scenario(simulate, sim_spec, sim_scenario);
            return cmd_simulate(spec, sim_scenario, sim_out);
        }
        if (study->parsed()) {
            const ScenarioSpec spec = resolve_scenario(study, study_spec, study_scenario);
            return cmd_study(spec, study_scenario, study_reps, study_l1, study_l2, study_jobs,
                             study_fit_flags, study_out);
        }
        if (stability->parsed())
            return cmd_stability(stab_flags, stab_l1, stab_l2, stab_subsamples, stab_fraction,
                                 stab_threshold, stab_seed, stab_jobs, stab_out);
        if (diff->parsed())
            return cmd_diff(diff_theta, diff_genes, diff_times, diff_lag_cap, diff_names,
                            diff_threshold, diff_k, diff_out);
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
