#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "mkrep/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mkrep;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("mkrep_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

} // namespace

TEST_CASE("load_dataset") {
    TempDir dir("dataset");

    SUBCASE("basic parse") {
        write_file(dir.file("d.csv"), "1,2,0\n3,4,0\n5,6,1\n");
        const Dataset data = load_dataset(dir.file("d.csv"));
        CHECK(data.features.rows() == 3);
        CHECK(data.features.cols() == 2);
        CHECK(data.labels == std::vector<int>{0, 0, 1});
        CHECK(data.features(2, 1) == 6.0);
    }
    SUBCASE("empty file is a parse error") {
        write_file(dir.file("empty.csv"), "");
        CHECK_THROWS_AS(load_dataset(dir.file("empty.csv")), ParseError);
    }
    SUBCASE("labels are remapped by first occurrence") {
        write_file(dir.file("l.csv"), "1,0,5\n2,0,9\n3,0,5\n");
        const Dataset data = load_dataset(dir.file("l.csv"));
        CHECK(data.labels == std::vector<int>{0, 1, 0});
    }
    SUBCASE("ragged rows carry the line number") {
        write_file(dir.file("ragged.csv"), "1,2,0\n3,4\n");
        CHECK_THROWS_WITH_AS(load_dataset(dir.file("ragged.csv")), doctest::Contains(":2"),
                             ParseError);
    }
    SUBCASE("non-numeric cells carry the line number") {
        write_file(dir.file("bad.csv"), "1,2,0\n3,oops,1\n5,6,1\n");
        CHECK_THROWS_WITH_AS(load_dataset(dir.file("bad.csv")), doctest::Contains(":2"),
                             ParseError);
    }
    SUBCASE("non-integer label is rejected") {
        write_file(dir.file("flabel.csv"), "1,2,0\n3,4,1.5\n");
        CHECK_THROWS_AS(load_dataset(dir.file("flabel.csv")), ParseError);
    }
    SUBCASE("header flag skips the first line") {
        write_file(dir.file("h.csv"), "x,y,label\n1,2,0\n3,4,1\n");
        const Dataset data = load_dataset(dir.file("h.csv"), true);
        CHECK(data.features.rows() == 2);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_dataset(dir.file("nope.csv")), ParseError);
    }
}

TEST_CASE("dense csv round trip is exact") {
    TempDir dir("dense");
    const Matrix original = oracle::random_psd(7, 123);
    save_dense_csv(dir.file("m.csv"), original);
    const Matrix loaded = load_dense_csv(dir.file("m.csv"));
    REQUIRE(loaded.rows() == original.rows());
    CHECK(loaded.cwiseEqual(original).all());
}

TEST_CASE("kernel bank save and manifest load") {
    TempDir dir("bank");
    const auto [X, truth] = oracle::make_blobs(2, 6, 2, 4.0, 0.6, 9);
    const KernelBank bank = build_kernel_bank(
        X, {KernelSpec::cosine(), KernelSpec::rbf(0.1), KernelSpec::rbf(1.0)});

    SUBCASE("round trip reproduces gram entries") {
        const std::string manifest = save_kernel_bank(bank, dir.file("bankdir"));
        const KernelBank loaded = load_kernel_manifest(manifest);
        REQUIRE(loaded.m() == bank.m());
        for (int p = 0; p < bank.m(); ++p) {
            CHECK((loaded.kernels[p].gram - bank.kernels[p].gram).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    SUBCASE("manifest without the prenormalized directive normalizes on load") {
        save_dense_csv(dir.file("k0.csv"), 4.0 * Matrix::Identity(5, 5));
        write_file(dir.file("manifest.txt"), "k0.csv\n");
        const KernelBank loaded = load_kernel_manifest(dir.file("manifest.txt"));
        CHECK(loaded.kernels[0].gram.isApprox(Matrix::Identity(5, 5), 1e-15));
    }

    SUBCASE("prenormalized directive skips normalization") {
        save_dense_csv(dir.file("k0.csv"), 4.0 * Matrix::Identity(5, 5));
        write_file(dir.file("manifest.txt"), "#prenormalized\nk0.csv\n");
        const KernelBank loaded = load_kernel_manifest(dir.file("manifest.txt"));
        CHECK(loaded.kernels[0].gram(0, 0) == 4.0);
    }

    SUBCASE("size mismatch names both files") {
        save_dense_csv(dir.file("a.csv"), Matrix::Identity(4, 4));
        save_dense_csv(dir.file("b.csv"), Matrix::Identity(5, 5));
        write_file(dir.file("manifest.txt"), "a.csv\nb.csv\n");
        CHECK_THROWS_WITH_AS(load_kernel_manifest(dir.file("manifest.txt")),
                             doctest::Contains("b.csv"), ParseError);
    }

    SUBCASE("non-square kernel file is rejected") {
        save_dense_csv(dir.file("rect.csv"), Matrix::Ones(3, 4));
        write_file(dir.file("manifest.txt"), "rect.csv\n");
        CHECK_THROWS_AS(load_kernel_manifest(dir.file("manifest.txt")), ParseError);
    }

    SUBCASE("asymmetric kernel passes non-strict and fails strict") {
        Matrix G = Matrix::Identity(4, 4);
        G(0, 1) = 0.3; // asymmetric
        save_dense_csv(dir.file("asym.csv"), G);
        write_file(dir.file("manifest.txt"), "#prenormalized\nasym.csv\n");
        CHECK_NOTHROW(load_kernel_manifest(dir.file("manifest.txt"), false));
        CHECK_THROWS_AS(load_kernel_manifest(dir.file("manifest.txt"), true), NumericalError);
    }

    SUBCASE("empty manifest is rejected") {
        write_file(dir.file("manifest.txt"), "# just a comment\n");
        CHECK_THROWS_AS(load_kernel_manifest(dir.file("manifest.txt")), ParseError);
    }
}

TEST_CASE("load_labels") {
    TempDir dir("labels");
    write_file(dir.file("y.txt"), "2\n2\n7\n");
    CHECK(load_labels(dir.file("y.txt")) == std::vector<int>{2, 2, 7});
    write_file(dir.file("bad.txt"), "2\nx\n");
    CHECK_THROWS_AS(load_labels(dir.file("bad.txt")), ParseError);
}
