#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unistd.h>

#include "mkrep/experiment.hpp"
#include "mkrep/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mkrep;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("mkrep_exp_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_blob_csv(const TempDir& dir, const std::string& name, int per_cluster) {
    const auto [X, truth] = oracle::make_blobs(3, per_cluster, 2, 6.0, 0.5, 321);
    std::ofstream out(dir.file(name));
    for (Index i = 0; i < X.rows(); ++i) {
        out << X(i, 0) << ',' << X(i, 1) << ',' << truth[static_cast<std::size_t>(i)] << '\n';
    }
    return dir.file(name);
}

std::size_t line_count(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++count;
    }
    return count;
}

} // namespace

TEST_CASE("default lambda grid") {
    const std::vector<double> grid = default_lambda_grid();
    REQUIRE(grid.size() == 21);
    CHECK(grid.front() == std::ldexp(1.0, -15));
    CHECK(grid.back() == 32.0);
}

TEST_CASE("config parsing") {
    TempDir dir("config");

    SUBCASE("round trip of keys") {
        std::ofstream out(dir.file("c.cfg"));
        out << "# comment line\n";
        out << "data = features.csv\n";
        out << "k = 4\n";
        out << "lambda_grid = 0.5,1,2\n";
        out << "restarts = 3\n";
        out << "seed = 11\n";
        out << "methods = proposed,a-mkkm\n";
        out << "recipe = cosine,rbf:0.1\n";
        out << "nmi_norm = max\n";
        out << "out = outdir\n";
        out.close();
        const ExperimentConfig config = load_config(dir.file("c.cfg"));
        CHECK(config.data_path == "features.csv");
        CHECK(config.k == 4);
        CHECK(config.lambda_grid == std::vector<double>{0.5, 1.0, 2.0});
        CHECK(config.restarts == 3);
        CHECK(config.seed == 11);
        CHECK(config.methods == std::vector<std::string>{"proposed", "a-mkkm"});
        CHECK(config.recipe.size() == 2);
        CHECK(config.nmi_norm == NmiNormalization::Max);
        CHECK(config.out_dir == "outdir");
    }
    SUBCASE("unknown keys are rejected") {
        std::ofstream out(dir.file("bad.cfg"));
        out << "wat = 1\n";
        out.close();
        CHECK_THROWS_WITH_AS(load_config(dir.file("bad.cfg")), doctest::Contains("wat"),
                             ParseError);
    }
    SUBCASE("validation catches bad method names and missing input") {
        ExperimentConfig config;
        config.lambda_grid = {1.0};
        config.methods = {"proposed"};
        CHECK_THROWS_AS(config.validate(), ParseError); // no data or manifest
        config.data_path = "x.csv";
        config.methods = {"quantum"};
        CHECK_THROWS_AS(config.validate(), ParseError);
    }
}

TEST_CASE("run_experiment") {
    TempDir dir("run");
    const std::string csv = write_blob_csv(dir, "blobs.csv", 8);

    ExperimentConfig config;
    config.data_path = csv;
    config.recipe = {KernelSpec::cosine(), KernelSpec::rbf(0.1), KernelSpec::rbf(1.0)};
    config.lambda_grid = {0.01, 1.0};
    config.restarts = 3;
    config.seed = 4;
    config.methods = {"sb-kkm", "a-mkkm", "mkkm", "proposed"};

    SUBCASE("full method set produces sorted records with one best per method") {
        const ExperimentResult result = run_experiment(config);
        CHECK(result.records.size() == 5); // 3 single-row methods + 2 lambdas
        for (std::size_t i = 1; i < result.records.size(); ++i) {
            CHECK(result.records[i - 1].method <= result.records[i].method);
        }
        int proposed_best = 0;
        for (const RunRecord& record : result.records) {
            CHECK(record.acc >= 0.0);
            CHECK(record.acc <= 1.0);
            if (record.method == "proposed" && record.best) ++proposed_best;
        }
        CHECK(proposed_best == 1);
        CHECK(result.dissimilarity.rows() == 3);
    }

    SUBCASE("single method and lambda yields exactly one record") {
        config.methods = {"proposed"};
        config.lambda_grid = {0.5};
        const ExperimentResult result = run_experiment(config);
        CHECK(result.records.size() == 1);
        CHECK(result.records[0].best);
    }

    SUBCASE("repeated runs are identical apart from wall time") {
        config.methods = {"proposed", "a-mkkm"};
        const ExperimentResult a = run_experiment(config);
        const ExperimentResult b = run_experiment(config);
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            CHECK(a.records[i].method == b.records[i].method);
            CHECK(a.records[i].acc == b.records[i].acc);
            CHECK(a.records[i].nmi == b.records[i].nmi);
            CHECK(a.records[i].purity == b.records[i].purity);
            CHECK(a.records[i].iterations == b.records[i].iterations);
            CHECK(a.records[i].best == b.records[i].best);
            CHECK(a.records[i].weights.cwiseEqual(b.records[i].weights).all());
        }
    }

    SUBCASE("sb-kkm without labels is rejected") {
        ExperimentConfig manifest_config = config;
        const std::string manifest = save_kernel_bank(
            build_kernel_bank(load_dataset(csv).features, config.recipe), dir.file("bank"));
        manifest_config.data_path.clear();
        manifest_config.manifest_path = manifest;
        manifest_config.k = 3;
        CHECK_THROWS_AS(run_experiment(manifest_config), ParseError);
    }
}

TEST_CASE("experiment outputs and figure export") {
    TempDir dir("export");
    const std::string csv = write_blob_csv(dir, "blobs.csv", 6);

    ExperimentConfig config;
    config.data_path = csv;
    config.recipe = {KernelSpec::cosine(), KernelSpec::rbf(0.1), KernelSpec::rbf(1.0)};
    config.lambda_grid = {0.01, 0.1, 1.0};
    config.restarts = 2;
    config.methods = {"proposed", "a-mkkm"};

    const ExperimentResult result = run_experiment(config);
    const std::string out_dir = dir.file("out");
    write_experiment_outputs(result, config, out_dir);

    CHECK(fs::exists(fs::path(out_dir) / "records.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "summary.json"));
    CHECK(fs::exists(fs::path(out_dir) / "lambda_grid.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "c_matrix.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "y_lambda_000.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "convergence_lambda_002.csv"));

    SUBCASE("records csv round trip") {
        const std::vector<RunRecord> loaded =
            read_records_csv((fs::path(out_dir) / "records.csv").string());
        REQUIRE(loaded.size() == result.records.size());
        for (std::size_t i = 0; i < loaded.size(); ++i) {
            CHECK(loaded[i].method == result.records[i].method);
            CHECK(loaded[i].acc == result.records[i].acc);
            CHECK(loaded[i].weights.size() == result.records[i].weights.size());
        }
    }

    SUBCASE("figures") {
        export_figures(out_dir);
        CHECK(line_count((fs::path(out_dir) / "fig_sensitivity.csv").string()) == 4); // header + 3
        CHECK(line_count((fs::path(out_dir) / "fig_selected_kernels.csv").string()) == 4);
        CHECK(fs::exists(fs::path(out_dir) / "fig_y_heatmap_000.csv"));
        CHECK(fs::exists(fs::path(out_dir) / "fig_y_heatmap_002.csv"));

        // convergence objective column from the best run is non-increasing
        std::ifstream conv((fs::path(out_dir) / "fig_convergence.csv").string());
        std::string line;
        std::getline(conv, line);
        double prev = std::numeric_limits<double>::infinity();
        std::size_t rows = 0;
        while (std::getline(conv, line)) {
            const auto comma = line.find(',');
            REQUIRE(comma != std::string::npos);
            const double objective = std::stod(line.substr(comma + 1));
            CHECK(objective <= prev + 1e-9);
            prev = objective;
            ++rows;
        }
        CHECK(rows >= 1);
    }

    SUBCASE("empty records produce header-only figures") {
        const std::string empty_dir = dir.file("empty");
        fs::create_directories(empty_dir);
        std::ofstream records((fs::path(empty_dir) / "records.csv").string());
        records << records_csv_header() << '\n';
        records.close();
        export_figures(empty_dir);
        CHECK(line_count((fs::path(empty_dir) / "fig_sensitivity.csv").string()) == 1);
        CHECK(line_count((fs::path(empty_dir) / "fig_selected_kernels.csv").string()) == 1);
        CHECK(line_count((fs::path(empty_dir) / "fig_convergence.csv").string()) == 1);
    }
}
