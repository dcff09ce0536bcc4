#include "mkrep/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mkrep/baselines.hpp"
#include "mkrep/io.hpp"
#include "mkrep/representative_selection.hpp"

namespace fs = std::filesystem;

namespace mkrep {

namespace {

constexpr double kSelectedWeightThreshold = 1e-3;

const std::set<std::string>& known_methods() {
    static const std::set<std::string> methods = {"sb-kkm", "a-mkkm", "mkkm", "proposed"};
    return methods;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

double parse_double_str(const std::string& s, const std::string& context) {
    try {
        return std::stod(trim(s));
    } catch (const std::exception&) {
        throw ParseError(context + ": bad number '" + s + "'");
    }
}

int class_count(const std::vector<int>& labels) {
    std::set<int> unique(labels.begin(), labels.end());
    return static_cast<int>(unique.size());
}

struct LoadedProblem {
    KernelBank bank;
    std::vector<int> truth; // may be empty for manifest input without labels
    int k = 0;
};

LoadedProblem load_problem(const ExperimentConfig& config) {
    LoadedProblem problem;
    if (!config.data_path.empty()) {
        const Dataset dataset = load_dataset(config.data_path, config.has_header);
        const std::vector<KernelSpec>& recipe =
            config.recipe.empty() ? default_recipe() : config.recipe;
        problem.bank = build_kernel_bank(dataset.features, recipe);
        problem.truth = dataset.labels;
    } else {
        problem.bank = load_kernel_manifest(config.manifest_path, config.strict);
        if (!config.labels_path.empty()) {
            problem.truth = load_labels(config.labels_path);
            if (problem.truth.size() != static_cast<std::size_t>(problem.bank.n())) {
                throw ParseError("label count (" + std::to_string(problem.truth.size()) +
                                 ") does not match kernel size (" +
                                 std::to_string(problem.bank.n()) + ")");
            }
        }
    }
    if (config.k > 0) {
        problem.k = config.k;
    } else {
        if (problem.truth.empty()) {
            throw ParseError("k not given and no ground-truth labels to infer it from");
        }
        problem.k = class_count(problem.truth);
    }
    return problem;
}

RunRecord make_record(const std::string& method, double lambda, const ExperimentConfig& config,
                      const std::vector<int>& labels, const std::vector<int>& truth,
                      double wall_s, int iterations, bool converged, const Vector& weights) {
    RunRecord record;
    record.method = method;
    record.lambda = lambda;
    record.seed = config.seed;
    if (!truth.empty()) {
        const MetricReport metrics = evaluate(labels, truth, config.nmi_norm);
        record.acc = metrics.acc;
        record.nmi = metrics.nmi;
        record.purity = metrics.purity;
    } else {
        record.acc = record.nmi = record.purity = std::numeric_limits<double>::quiet_NaN();
    }
    record.wall_time_s = wall_s;
    record.iterations = iterations;
    record.converged = converged;
    record.weights = weights;
    return record;
}

class StopWatch {
public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int e = -15; e <= 5; ++e) grid.push_back(std::ldexp(1.0, e));
    return grid;
}

void ExperimentConfig::validate() const {
    if (data_path.empty() && manifest_path.empty()) {
        throw ParseError("config: either data or manifest must be set");
    }
    if (!data_path.empty() && !manifest_path.empty()) {
        throw ParseError("config: data and manifest are mutually exclusive");
    }
    if (restarts < 1) throw ParseError("config: restarts must be at least 1");
    if (lambda_grid.empty()) throw ParseError("config: lambda grid is empty");
    if (!(epsilon > 0.0)) throw ParseError("config: epsilon must be positive");
    if (max_outer_iters < 1) throw ParseError("config: max_outer_iters must be at least 1");
    if (methods.empty()) throw ParseError("config: no methods selected");
    for (const std::string& method : methods) {
        if (known_methods().count(method) == 0) {
            throw ParseError("config: unknown method '" + method + "'");
        }
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);

    ExperimentConfig config;
    config.lambda_grid = default_lambda_grid();
    config.methods = {"sb-kkm", "a-mkkm", "mkkm", "proposed"};

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const std::string context = path + ":" + std::to_string(line_no);

        if (key == "data") {
            config.data_path = value;
        } else if (key == "manifest") {
            config.manifest_path = value;
        } else if (key == "labels") {
            config.labels_path = value;
        } else if (key == "header") {
            config.has_header = (value == "true" || value == "1");
        } else if (key == "recipe") {
            if (value == "paper" || value == "default") {
                config.recipe = default_recipe();
            } else {
                config.recipe.clear();
                for (const std::string& token : split(value, ',')) {
                    config.recipe.push_back(parse_kernel_spec(trim(token)));
                }
            }
        } else if (key == "k") {
            config.k = static_cast<int>(parse_double_str(value, context));
        } else if (key == "lambda_grid") {
            if (value == "default") {
                config.lambda_grid = default_lambda_grid();
            } else {
                config.lambda_grid.clear();
                for (const std::string& token : split(value, ',')) {
                    config.lambda_grid.push_back(parse_double_str(token, context));
                }
            }
        } else if (key == "restarts") {
            config.restarts = static_cast<int>(parse_double_str(value, context));
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(parse_double_str(value, context));
        } else if (key == "epsilon") {
            config.epsilon = parse_double_str(value, context);
        } else if (key == "max_outer_iters") {
            config.max_outer_iters = static_cast<int>(parse_double_str(value, context));
        } else if (key == "methods") {
            config.methods.clear();
            for (const std::string& token : split(value, ',')) {
                config.methods.push_back(trim(token));
            }
        } else if (key == "out") {
            config.out_dir = value;
        } else if (key == "nmi_norm") {
            if (value == "geometric") {
                config.nmi_norm = NmiNormalization::Geometric;
            } else if (value == "max") {
                config.nmi_norm = NmiNormalization::Max;
            } else {
                throw ParseError(context + ": nmi_norm must be geometric or max");
            }
        } else if (key == "strict") {
            config.strict = (value == "true" || value == "1");
        } else {
            throw ParseError(context + ": unknown key '" + key + "'");
        }
    }
    return config;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const LoadedProblem problem = load_problem(config);

    const bool wants_sb =
        std::find(config.methods.begin(), config.methods.end(), "sb-kkm") != config.methods.end();
    if (wants_sb && problem.truth.empty()) {
        throw ParseError("sb-kkm needs ground-truth labels (best kernel is chosen by accuracy)");
    }

    ExperimentResult result;
    result.lambda_grid = config.lambda_grid;

    for (const std::string& method : config.methods) {
        if (method == "proposed") {
            result.dissimilarity = dissimilarity_matrix(problem.bank);
            std::size_t best_idx = result.records.size();
            double best_acc = -std::numeric_limits<double>::infinity();
            bool any = false;
            for (std::size_t li = 0; li < config.lambda_grid.size(); ++li) {
                const double lambda = config.lambda_grid[li];
                StopWatch watch;
                try {
                    SolveOptions opts;
                    opts.lambda = lambda;
                    opts.epsilon = config.epsilon;
                    opts.max_outer_iters = config.max_outer_iters;
                    opts.seed = config.seed;
                    opts.restarts = config.restarts;
                    SolveResult solve = fit(problem.bank, problem.k, opts);
                    RunRecord record =
                        make_record(method, lambda, config, solve.labels, problem.truth,
                                    watch.seconds(), solve.iterations, solve.converged,
                                    solve.weights);
                    if (!problem.truth.empty() && record.acc > best_acc) {
                        best_acc = record.acc;
                        best_idx = result.records.size();
                        any = true;
                    }
                    result.records.push_back(std::move(record));
                    result.proposed_by_lambda.emplace(static_cast<int>(li), std::move(solve));
                } catch (const std::exception& err) {
                    RunRecord record = make_record(method, lambda, config, {}, {},
                                                   watch.seconds(), 0, false, Vector());
                    result.records.push_back(std::move(record));
                    std::fprintf(stderr, "run failed (proposed, lambda=%g): %s\n", lambda,
                                 err.what());
                }
            }
            if (any) result.records[best_idx].best = true;
        } else {
            StopWatch watch;
            const double lambda = std::numeric_limits<double>::quiet_NaN();
            try {
                RunRecord record;
                if (method == "sb-kkm") {
                    const SbKkmResult sb =
                        sb_kkm(problem.bank, problem.k, problem.truth, config.seed,
                               config.restarts);
                    Vector weights = Vector::Zero(problem.bank.m());
                    weights(sb.best_index) = 1.0;
                    record = make_record(method, lambda, config, sb.best().labels, problem.truth,
                                         watch.seconds(), 1, true, weights);
                } else if (method == "a-mkkm") {
                    const BaselineResult run =
                        a_mkkm(problem.bank, problem.k, config.seed, config.restarts);
                    record = make_record(method, lambda, config, run.labels, problem.truth,
                                         watch.seconds(), run.iterations, run.converged,
                                         run.weights);
                } else { // mkkm
                    SolveOptions opts;
                    opts.epsilon = config.epsilon;
                    opts.max_outer_iters = config.max_outer_iters;
                    opts.seed = config.seed;
                    opts.restarts = config.restarts;
                    const BaselineResult run = mkkm_vanilla(problem.bank, problem.k, opts);
                    record = make_record(method, lambda, config, run.labels, problem.truth,
                                         watch.seconds(), run.iterations, run.converged,
                                         run.weights);
                }
                record.best = true; // single row for its method
                result.records.push_back(std::move(record));
            } catch (const std::exception& err) {
                RunRecord record = make_record(method, lambda, config, {}, {}, watch.seconds(),
                                               0, false, Vector());
                result.records.push_back(std::move(record));
                std::fprintf(stderr, "run failed (%s): %s\n", method.c_str(), err.what());
            }
        }
    }

    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const RunRecord& a, const RunRecord& b) {
                         if (a.method != b.method) return a.method < b.method;
                         const double la = std::isnan(a.lambda) ? -1.0 : a.lambda;
                         const double lb = std::isnan(b.lambda) ? -1.0 : b.lambda;
                         return la < lb;
                     });
    return result;
}

std::string records_csv_header() {
    return "method,lambda,seed,acc,nmi,purity,wall_time_s,iterations,converged,best,weights";
}

void write_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    out << records_csv_header() << '\n';
    for (const RunRecord& record : records) {
        out << record.method << ',' << format_double(record.lambda) << ',' << record.seed << ','
            << format_double(record.acc) << ',' << format_double(record.nmi) << ','
            << format_double(record.purity) << ',' << format_double(record.wall_time_s) << ','
            << record.iterations << ',' << (record.converged ? 1 : 0) << ','
            << (record.best ? 1 : 0) << ',';
        for (Index i = 0; i < record.weights.size(); ++i) {
            if (i) out << ';';
            out << format_double(record.weights(i));
        }
        out << '\n';
    }
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty records file");

    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::vector<std::string> cells = split(stripped, ',');
        if (cells.size() != 11) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 11 columns");
        }
        const std::string context = path + ":" + std::to_string(line_no);
        RunRecord record;
        record.method = cells[0];
        record.lambda = parse_double_str(cells[1], context);
        record.seed = static_cast<std::uint64_t>(parse_double_str(cells[2], context));
        record.acc = parse_double_str(cells[3], context);
        record.nmi = parse_double_str(cells[4], context);
        record.purity = parse_double_str(cells[5], context);
        record.wall_time_s = parse_double_str(cells[6], context);
        record.iterations = static_cast<int>(parse_double_str(cells[7], context));
        record.converged = parse_double_str(cells[8], context) != 0.0;
        record.best = parse_double_str(cells[9], context) != 0.0;
        if (!trim(cells[10]).empty()) {
            const std::vector<std::string> parts = split(cells[10], ';');
            record.weights.resize(static_cast<Index>(parts.size()));
            for (std::size_t i = 0; i < parts.size(); ++i) {
                record.weights(static_cast<Index>(i)) = parse_double_str(parts[i], context);
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

void write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                              const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_records_csv((fs::path(out_dir) / "records.csv").string(), result.records);

    {
        std::ofstream grid((fs::path(out_dir) / "lambda_grid.csv").string());
        grid << "index,lambda\n";
        for (std::size_t i = 0; i < result.lambda_grid.size(); ++i) {
            grid << i << ',' << format_double(result.lambda_grid[i]) << '\n';
        }
    }
    if (result.dissimilarity.size() > 0) {
        save_dense_csv((fs::path(out_dir) / "c_matrix.csv").string(), result.dissimilarity);
    }
    for (const auto& [index, solve] : result.proposed_by_lambda) {
        char name[64];
        std::snprintf(name, sizeof(name), "y_lambda_%03d.csv", index);
        save_dense_csv((fs::path(out_dir) / name).string(), solve.y);
        std::snprintf(name, sizeof(name), "convergence_lambda_%03d.csv", index);
        std::ofstream conv((fs::path(out_dir) / name).string());
        conv << "iteration,objective,qp_kkt_residual\n";
        for (std::size_t t = 0; t < solve.trace.size(); ++t) {
            conv << (t + 1) << ',' << format_double(solve.trace[t].objective) << ','
                 << format_double(solve.trace[t].qp_kkt_residual) << '\n';
        }
    }

    nlohmann::json summary;
    summary["n_records"] = result.records.size();
    summary["seed"] = config.seed;
    summary["restarts"] = config.restarts;
    summary["nmi_norm"] = nmi_normalization_name(config.nmi_norm);
    summary["lambda_grid"] = result.lambda_grid;
    nlohmann::json rows = nlohmann::json::array();
    for (const RunRecord& record : result.records) {
        nlohmann::json row;
        row["method"] = record.method;
        row["lambda"] = record.lambda;
        row["acc"] = record.acc;
        row["nmi"] = record.nmi;
        row["purity"] = record.purity;
        row["iterations"] = record.iterations;
        row["converged"] = record.converged;
        row["best"] = record.best;
        row["wall_time_s"] = record.wall_time_s;
        std::vector<double> weights(record.weights.data(),
                                    record.weights.data() + record.weights.size());
        row["weights"] = weights;
        rows.push_back(std::move(row));
    }
    summary["records"] = std::move(rows);

    std::ofstream json_out((fs::path(out_dir) / "summary.json").string());
    if (!json_out) throw ParseError("cannot write summary.json in " + out_dir);
    json_out << summary.dump(2) << '\n';
}

void export_figures(const std::string& run_dir) {
    const std::string records_path = (fs::path(run_dir) / "records.csv").string();
    const std::vector<RunRecord> records = read_records_csv(records_path);

    std::vector<const RunRecord*> proposed;
    for (const RunRecord& record : records) {
        if (record.method == "proposed") proposed.push_back(&record);
    }
    std::sort(proposed.begin(), proposed.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->lambda < b->lambda; });

    {
        std::ofstream out((fs::path(run_dir) / "fig_sensitivity.csv").string());
        out << "lambda,acc,nmi,purity\n";
        for (const RunRecord* record : proposed) {
            out << format_double(record->lambda) << ',' << format_double(record->acc) << ','
                << format_double(record->nmi) << ',' << format_double(record->purity) << '\n';
        }
    }
    {
        std::ofstream out((fs::path(run_dir) / "fig_selected_kernels.csv").string());
        out << "lambda,selected\n";
        for (const RunRecord* record : proposed) {
            int selected = 0;
            for (Index i = 0; i < record->weights.size(); ++i) {
                if (record->weights(i) > kSelectedWeightThreshold) ++selected;
            }
            out << format_double(record->lambda) << ',' << selected << '\n';
        }
    }

    // lambda index -> per-lambda artifacts written by write_experiment_outputs
    std::map<double, int> lambda_index;
    {
        const std::string grid_path = (fs::path(run_dir) / "lambda_grid.csv").string();
        if (fs::exists(grid_path)) {
            std::ifstream grid(grid_path);
            std::string line;
            std::getline(grid, line); // header
            while (std::getline(grid, line)) {
                const std::string stripped = trim(line);
                if (stripped.empty()) continue;
                const std::vector<std::string> cells = split(stripped, ',');
                if (cells.size() != 2) continue;
                lambda_index[parse_double_str(cells[1], grid_path)] =
                    static_cast<int>(parse_double_str(cells[0], grid_path));
            }
        }
    }

    {
        std::ofstream out((fs::path(run_dir) / "fig_convergence.csv").string());
        out << "iteration,objective\n";
        const RunRecord* best = nullptr;
        for (const RunRecord* record : proposed) {
            if (record->best) best = record;
        }
        if (best && lambda_index.count(best->lambda)) {
            char name[64];
            std::snprintf(name, sizeof(name), "convergence_lambda_%03d.csv",
                          lambda_index[best->lambda]);
            const std::string conv_path = (fs::path(run_dir) / name).string();
            if (fs::exists(conv_path)) {
                std::ifstream conv(conv_path);
                std::string line;
                std::getline(conv, line); // header
                while (std::getline(conv, line)) {
                    const std::string stripped = trim(line);
                    if (stripped.empty()) continue;
                    const std::vector<std::string> cells = split(stripped, ',');
                    if (cells.size() < 2) continue;
                    out << cells[0] << ',' << cells[1] << '\n';
                }
            }
        }
    }

    for (const RunRecord* record : proposed) {
        if (!lambda_index.count(record->lambda)) continue;
        const int index = lambda_index[record->lambda];
        char src_name[64];
        std::snprintf(src_name, sizeof(src_name), "y_lambda_%03d.csv", index);
        const fs::path src = fs::path(run_dir) / src_name;
        if (!fs::exists(src)) continue;
        char dst_name[64];
        std::snprintf(dst_name, sizeof(dst_name), "fig_y_heatmap_%03d.csv", index);
        fs::copy_file(src, fs::path(run_dir) / dst_name, fs::copy_options::overwrite_existing);
    }
}

} // namespace mkrep
