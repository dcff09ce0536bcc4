#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mkrep/baselines.hpp"
#include "mkrep/experiment.hpp"
#include "mkrep/io.hpp"
#include "mkrep/representative_selection.hpp"
#include "mkrep/solver.hpp"

namespace fs = std::filesystem;
using namespace mkrep;

namespace {

std::vector<KernelSpec> recipe_from_string(const std::string& recipe) {
    if (recipe == "paper" || recipe == "default") return default_recipe();
    std::vector<KernelSpec> specs;
    std::string token;
    std::istringstream stream(recipe);
    while (std::getline(stream, token, ',')) {
        specs.push_back(parse_kernel_spec(token));
    }
    if (specs.empty()) throw ParseError("empty kernel recipe");
    return specs;
}

void print_validation(const ValidationReport& report) {
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
        const KernelCheck& check = report.checks[i];
        std::printf("kernel %zu: %s (sym_residual=%.3g, eig=[%.6g, %.6g], diag_dev=%.3g)\n", i,
                    check.ok() ? "ok" : "FLAGGED", check.symmetry_residual, check.min_eigenvalue,
                    check.max_eigenvalue, check.max_diag_deviation);
        if (!check.symmetric) std::printf("  - not symmetric within tol %.3g\n", report.tol);
        if (!check.psd) std::printf("  - negative eigenvalue beyond PSD tolerance\n");
        if (!check.unit_diagonal) std::printf("  - diagonal deviates from 1\n");
    }
}

struct FitArgs {
    std::string data, manifest, labels, recipe = "paper", out;
    bool header = false;
    int k = 0;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    int restarts = 20;
    double epsilon = 1e-6;
    int max_iters = 100;
    double qp_tol = 1e-7;
    int qp_iters = 10000;
    bool dump_y = false;
    bool dump_c = false;
    bool strict = false;
};

std::pair<KernelBank, std::vector<int>> load_bank_and_truth(const std::string& data,
                                                            const std::string& manifest,
                                                            const std::string& labels,
                                                            const std::string& recipe,
                                                            bool header, bool strict) {
    KernelBank bank;
    std::vector<int> truth;
    if (!data.empty()) {
        const Dataset dataset = load_dataset(data, header);
        bank = build_kernel_bank(dataset.features, recipe_from_string(recipe));
        truth = dataset.labels;
    } else if (!manifest.empty()) {
        bank = load_kernel_manifest(manifest, strict);
        if (!labels.empty()) {
            truth = load_labels(labels);
            if (truth.size() != static_cast<std::size_t>(bank.n())) {
                throw ParseError("label count does not match kernel size");
            }
        }
    } else {
        throw ParseError("either --data or --manifest is required");
    }
    return {std::move(bank), std::move(truth)};
}

int class_count(const std::vector<int>& labels) {
    std::set<int> unique(labels.begin(), labels.end());
    return static_cast<int>(unique.size());
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    for (int label : labels) out << label << '\n';
}

int run_fit(const FitArgs& args) {
    auto [bank, truth] = load_bank_and_truth(args.data, args.manifest, args.labels, args.recipe,
                                             args.header, args.strict);
    const int k = args.k > 0 ? args.k
                             : (truth.empty() ? throw ParseError("--k required without labels")
                                              : class_count(truth));

    SolveOptions opts;
    opts.lambda = args.lambda;
    opts.epsilon = args.epsilon;
    opts.max_outer_iters = args.max_iters;
    opts.qp_tol = args.qp_tol;
    opts.qp_max_iters = args.qp_iters;
    opts.seed = args.seed;
    opts.restarts = args.restarts;

    const SolveResult result = fit(bank, k, opts);

    fs::create_directories(args.out);
    write_labels_csv((fs::path(args.out) / "labels.csv").string(), result.labels);
    save_dense_csv((fs::path(args.out) / "weights.csv").string(), result.weights.transpose());
    {
        std::ofstream conv((fs::path(args.out) / "convergence.csv").string());
        conv << "iteration,objective,qp_kkt_residual\n";
        for (std::size_t t = 0; t < result.trace.size(); ++t) {
            char buffer[128];
            std::snprintf(buffer, sizeof(buffer), "%zu,%.17g,%.17g\n", t + 1,
                          result.trace[t].objective, result.trace[t].qp_kkt_residual);
            conv << buffer;
        }
    }
    if (args.dump_y) save_dense_csv((fs::path(args.out) / "y_matrix.csv").string(), result.y);
    if (args.dump_c) {
        save_dense_csv((fs::path(args.out) / "c_matrix.csv").string(),
                       dissimilarity_matrix(bank));
    }

    nlohmann::json summary;
    summary["k"] = k;
    summary["m"] = bank.m();
    summary["n"] = bank.n();
    summary["lambda"] = args.lambda;
    summary["seed"] = args.seed;
    summary["restarts"] = args.restarts;
    summary["iterations"] = result.iterations;
    summary["converged"] = result.converged;
    summary["final_objective"] =
        result.trace.empty() ? 0.0 : result.trace.back().objective;
    std::vector<double> weights(result.weights.data(),
                                result.weights.data() + result.weights.size());
    summary["weights"] = weights;
    if (!truth.empty()) {
        const MetricReport metrics = evaluate(result.labels, truth);
        summary["acc"] = metrics.acc;
        summary["nmi"] = metrics.nmi;
        summary["purity"] = metrics.purity;
        std::printf("acc=%.4f nmi=%.4f purity=%.4f\n", metrics.acc, metrics.nmi, metrics.purity);
    }
    std::printf("converged=%s iterations=%d objective=%.8g\n",
                result.converged ? "true" : "false", result.iterations,
                summary["final_objective"].get<double>());

    std::ofstream json_out((fs::path(args.out) / "summary.json").string());
    json_out << summary.dump(2) << '\n';
    return 0;
}

void print_compare_table(const std::vector<RunRecord>& records) {
    std::printf("%-10s %8s %8s %8s %10s\n", "method", "acc", "nmi", "purity", "lambda");
    for (const RunRecord& record : records) {
        if (!record.best) continue;
        std::printf("%-10s %8.4f %8.4f %8.4f %10.4g\n", record.method.c_str(), record.acc,
                    record.nmi, record.purity, record.lambda);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiple kernel k-means clustering with representative kernel selection"};
    app.require_subcommand(1);

    // build-kernels
    auto* build = app.add_subcommand("build-kernels", "build and cache a kernel bank");
    std::string build_data, build_recipe = "paper", build_out;
    bool build_header = false, build_strict = false;
    build->add_option("--data", build_data, "feature CSV, last column = class label")->required();
    build->add_flag("--header", build_header, "skip the first CSV line");
    build->add_option("--recipe", build_recipe, "paper | comma list (cosine,poly:a:b,rbf:c)");
    build->add_option("--out", build_out, "output directory")->required();
    build->add_flag("--strict", build_strict, "fail on validation flags");

    // validate
    auto* validate = app.add_subcommand("validate", "validate a kernel bank");
    std::string val_manifest, val_data, val_recipe = "paper";
    double val_tol = 1e-8;
    bool val_strict = false, val_header = false;
    validate->add_option("--manifest", val_manifest, "kernel manifest to check");
    validate->add_option("--data", val_data, "feature CSV (bank built with --recipe)");
    validate->add_option("--recipe", val_recipe, "recipe when using --data");
    validate->add_flag("--header", val_header, "skip the first CSV line");
    validate->add_option("--tol", val_tol, "symmetry/diagonal tolerance");
    validate->add_flag("--strict", val_strict, "exit nonzero on violations");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "run the representative-kernel solver once");
    FitArgs fit_args;
    fit_cmd->add_option("--data", fit_args.data, "feature CSV, last column = class label");
    fit_cmd->add_option("--manifest", fit_args.manifest, "precomputed kernel manifest");
    fit_cmd->add_option("--labels", fit_args.labels, "label file for manifest input");
    fit_cmd->add_flag("--header", fit_args.header, "skip the first CSV line");
    fit_cmd->add_option("--recipe", fit_args.recipe, "kernel recipe");
    fit_cmd->add_option("--k", fit_args.k, "cluster count (default: true class count)");
    fit_cmd->add_option("--lambda", fit_args.lambda, "diversity trade-off");
    fit_cmd->add_option("--seed", fit_args.seed, "RNG seed");
    fit_cmd->add_option("--restarts", fit_args.restarts, "discretization restarts");
    fit_cmd->add_option("--epsilon", fit_args.epsilon, "outer convergence threshold");
    fit_cmd->add_option("--max-iters", fit_args.max_iters, "outer iteration cap");
    fit_cmd->add_option("--qp-tol", fit_args.qp_tol, "Y-subproblem KKT tolerance");
    fit_cmd->add_option("--qp-iters", fit_args.qp_iters, "Y-subproblem iteration cap");
    fit_cmd->add_flag("--dump-y", fit_args.dump_y, "write y_matrix.csv");
    fit_cmd->add_flag("--dump-c", fit_args.dump_c, "write c_matrix.csv");
    fit_cmd->add_flag("--strict", fit_args.strict, "strict kernel validation");
    fit_cmd->add_option("--out", fit_args.out, "output directory")->required();

    // sweep / compare share options
    auto add_experiment_options = [](CLI::App* cmd, std::string& config_path,
                                     ExperimentConfig& overrides, std::string& lambda_grid,
                                     std::string& methods) {
        cmd->add_option("--config", config_path, "key = value config file");
        cmd->add_option("--data", overrides.data_path, "feature CSV");
        cmd->add_option("--manifest", overrides.manifest_path, "kernel manifest");
        cmd->add_option("--labels", overrides.labels_path, "labels for manifest input");
        cmd->add_flag("--header", overrides.has_header, "skip the first CSV line");
        cmd->add_option("--k", overrides.k, "cluster count");
        cmd->add_option("--seed", overrides.seed, "RNG seed");
        cmd->add_option("--restarts", overrides.restarts, "restarts");
        cmd->add_option("--lambda-grid", lambda_grid, "comma list or 'default'");
        cmd->add_option("--methods", methods, "comma list of methods");
        cmd->add_option("--out", overrides.out_dir, "output directory");
    };

    auto* sweep = app.add_subcommand("sweep", "lambda grid sweep of the proposed method");
    std::string sweep_config, sweep_grid, sweep_methods;
    ExperimentConfig sweep_overrides;
    add_experiment_options(sweep, sweep_config, sweep_overrides, sweep_grid, sweep_methods);

    auto* compare = app.add_subcommand("compare", "run all methods under one protocol");
    std::string compare_config, compare_grid, compare_methods;
    ExperimentConfig compare_overrides;
    add_experiment_options(compare, compare_config, compare_overrides, compare_grid,
                           compare_methods);

    // export
    auto* export_cmd = app.add_subcommand("export", "emit plot-ready figure CSVs from a run");
    std::string export_run, export_figs = "all";
    export_cmd->add_option("--run", export_run, "run directory (records.csv inside)")->required();
    export_cmd->add_option("--figures", export_figs, "'all' (default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    try {
        if (build->parsed()) {
            const Dataset dataset = load_dataset(build_data, build_header);
            const KernelBank bank =
                build_kernel_bank(dataset.features, recipe_from_string(build_recipe));
            const ValidationReport report = validate_bank(bank);
            if (!report.ok()) {
                print_validation(report);
                if (build_strict) throw NumericalError("kernel bank failed validation");
            }
            const std::string manifest = save_kernel_bank(bank, build_out);
            std::printf("wrote %d kernels (n=%lld) to %s\n", bank.m(),
                        static_cast<long long>(bank.n()), manifest.c_str());
            return 0;
        }

        if (validate->parsed()) {
            KernelBank bank;
            if (!val_manifest.empty()) {
                bank = load_kernel_manifest(val_manifest, false);
            } else if (!val_data.empty()) {
                const Dataset dataset = load_dataset(val_data, val_header);
                bank = build_kernel_bank(dataset.features, recipe_from_string(val_recipe));
            } else {
                throw ParseError("validate needs --manifest or --data");
            }
            const ValidationReport report = validate_bank(bank, val_tol);
            print_validation(report);
            if (!report.ok() && val_strict) return 3;
            return 0;
        }

        if (fit_cmd->parsed()) return run_fit(fit_args);

        auto run_sweep_or_compare = [&](CLI::App* cmd, const std::string& config_path,
                                        ExperimentConfig& overrides,
                                        const std::string& lambda_grid,
                                        const std::string& methods, bool proposed_only) {
            ExperimentConfig config;
            if (!config_path.empty()) config = load_config(config_path);
            if (proposed_only && config_path.empty()) config.methods = {"proposed"};
            if (cmd->count("--data")) config.data_path = overrides.data_path;
            if (cmd->count("--manifest")) config.manifest_path = overrides.manifest_path;
            if (cmd->count("--labels")) config.labels_path = overrides.labels_path;
            if (cmd->count("--header")) config.has_header = overrides.has_header;
            if (cmd->count("--k")) config.k = overrides.k;
            if (cmd->count("--seed")) config.seed = overrides.seed;
            if (cmd->count("--restarts")) config.restarts = overrides.restarts;
            if (cmd->count("--out")) config.out_dir = overrides.out_dir;
            if (cmd->count("--lambda-grid")) {
                config.lambda_grid.clear();
                if (lambda_grid == "default") {
                    config.lambda_grid = default_lambda_grid();
                } else {
                    std::istringstream stream(lambda_grid);
                    std::string token;
                    while (std::getline(stream, token, ',')) {
                        config.lambda_grid.push_back(std::stod(token));
                    }
                }
            }
            if (cmd->count("--methods")) {
                config.methods.clear();
                std::istringstream stream(methods);
                std::string token;
                while (std::getline(stream, token, ',')) config.methods.push_back(token);
            }
            if (config.lambda_grid.empty()) config.lambda_grid = default_lambda_grid();
            if (config.methods.empty()) {
                config.methods = proposed_only
                                     ? std::vector<std::string>{"proposed"}
                                     : std::vector<std::string>{"sb-kkm", "a-mkkm", "mkkm",
                                                                "proposed"};
            }
            if (config.out_dir.empty()) throw ParseError("output directory required (--out)");

            const ExperimentResult result = run_experiment(config);
            write_experiment_outputs(result, config, config.out_dir);
            export_figures(config.out_dir);
            print_compare_table(result.records);
            std::printf("wrote %zu records to %s\n", result.records.size(),
                        config.out_dir.c_str());
            return 0;
        };

        if (sweep->parsed()) {
            return run_sweep_or_compare(sweep, sweep_config, sweep_overrides, sweep_grid,
                                        sweep_methods, true);
        }
        if (compare->parsed()) {
            return run_sweep_or_compare(compare, compare_config, compare_overrides, compare_grid,
                                        compare_methods, false);
        }
        if (export_cmd->parsed()) {
            if (export_figs != "all" && export_figs != "sensitivity" &&
                export_figs != "selected" && export_figs != "convergence" && export_figs != "y") {
                throw ParseError("unknown figure set: " + export_figs);
            }
            export_figures(export_run);
            std::printf("figures written to %s\n", export_run.c_str());
            return 0;
        }
    } catch (const ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const NumericalError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 3;
    }
    return 0;
}
