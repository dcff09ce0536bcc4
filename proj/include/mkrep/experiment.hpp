#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mkrep/common.hpp"
#include "mkrep/evaluation.hpp"
#include "mkrep/kernel_bank.hpp"
#include "mkrep/solver.hpp"

namespace mkrep {

/// Grid 2^-15, 2^-14, ..., 2^5.
std::vector<double> default_lambda_grid();

struct ExperimentConfig {
    std::string data_path;
    std::string manifest_path;
    std::string labels_path; // truth labels for manifest input
    bool has_header = false;
    std::vector<KernelSpec> recipe; // empty = default_recipe()
    int k = 0;                      // 0 = number of true classes
    std::vector<double> lambda_grid;
    int restarts = 20;
    std::uint64_t seed = 0;
    double epsilon = 1e-6;
    int max_outer_iters = 100;
    std::vector<std::string> methods; // sb-kkm, a-mkkm, mkkm, proposed
    std::string out_dir;
    NmiNormalization nmi_norm = NmiNormalization::Geometric;
    bool strict = false;

    void validate() const; // throws ParseError on an unusable config
};

/// Key = value config file; '#' starts a comment. Unknown keys are errors.
ExperimentConfig load_config(const std::string& path);

struct RunRecord {
    std::string method;
    double lambda = 0.0; // NaN for lambda-free methods
    std::uint64_t seed = 0;
    double acc = 0.0;
    double nmi = 0.0;
    double purity = 0.0;
    double wall_time_s = 0.0;
    int iterations = 0;
    bool converged = true;
    bool best = false; // grid-search winner (by accuracy) within its method
    Vector weights;
};

struct ExperimentResult {
    std::vector<RunRecord> records; // sorted by method, then lambda
    std::map<int, SolveResult> proposed_by_lambda; // grid index -> result
    std::vector<double> lambda_grid;
    Matrix dissimilarity; // C of the bank (empty if the proposed method never ran)
};

/// Runs every configured method (the proposed method once per grid lambda)
/// and records best-of-restarts metrics. Individual run failures are recorded
/// as non-converged rows, not fatal to the sweep.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Persists records.csv, summary.json and per-lambda artifacts
/// (y_lambda_<i>.csv, convergence_lambda_<i>.csv, lambda_grid.csv,
/// c_matrix.csv) into out_dir.
void write_experiment_outputs(const ExperimentResult& result,
                              const ExperimentConfig& config,
                              const std::string& out_dir);

/// Reads a run directory written by write_experiment_outputs and emits the
/// plot-ready figure CSVs: fig_sensitivity.csv, fig_selected_kernels.csv
/// (weights above 1e-3 count as selected), fig_convergence.csv and
/// fig_y_heatmap_<i>.csv.
void export_figures(const std::string& run_dir);

std::string records_csv_header();
void write_records_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(const std::string& path);

} // namespace mkrep
