#include <doctest.h>

#include <cmath>

#include "mkrep/evaluation.hpp"
#include "oracles.hpp"

using namespace mkrep;

namespace {

std::vector<int> random_label_vector(int n, int k, std::uint64_t seed) {
    oracle::Rng rng(seed);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = rng.uniform_int(0, k - 1);
    return labels;
}

} // namespace

TEST_CASE("accuracy") {
    SUBCASE("identical labels score 1") {
        const std::vector<int> labels = {0, 1, 2, 0, 1, 2};
        CHECK(accuracy(labels, labels) == 1.0);
    }
    SUBCASE("relabeling does not change the score") {
        const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
        const std::vector<int> pred = {2, 2, 0, 0, 1, 1};
        CHECK(accuracy(pred, truth) == 1.0);
    }
    SUBCASE("spec example 3-of-4") {
        const std::vector<int> truth = {0, 0, 1, 1};
        const std::vector<int> pred = {0, 1, 1, 1};
        CHECK(accuracy(pred, truth) == doctest::Approx(0.75));
        CHECK(oracle::accuracy_by_permutations(pred, truth) == doctest::Approx(0.75));
    }
    SUBCASE("matches exhaustive permutations on random pairs") {
        oracle::Rng rng(1010);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = rng.uniform_int(5, 40);
            const int kp = rng.uniform_int(1, 6);
            const int kt = rng.uniform_int(1, 6);
            const std::vector<int> pred = random_label_vector(n, kp, 3000 + trial);
            const std::vector<int> truth = random_label_vector(n, kt, 4000 + trial);
            CAPTURE(trial);
            CHECK(accuracy(pred, truth) ==
                  doctest::Approx(oracle::accuracy_by_permutations(pred, truth)).epsilon(1e-14));
        }
    }
    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(accuracy({0, 1}, {0, 1, 2}), std::invalid_argument);
    }
}

TEST_CASE("nmi") {
    SUBCASE("identical multi-cluster partitions score 1") {
        const std::vector<int> labels = {0, 0, 1, 1, 2, 2};
        CHECK(nmi(labels, labels) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("constant prediction against balanced truth scores 0") {
        const std::vector<int> pred = {0, 0, 0, 0};
        const std::vector<int> truth = {0, 0, 1, 1};
        CHECK(nmi(pred, truth) == 0.0);
    }
    SUBCASE("two constant partitions score 1") {
        const std::vector<int> pred = {3, 3, 3};
        const std::vector<int> truth = {7, 7, 7};
        CHECK(nmi(pred, truth) == 1.0);
    }
    SUBCASE("spec example matches the direct formula") {
        const std::vector<int> truth = {0, 0, 1, 1};
        const std::vector<int> pred = {0, 1, 1, 1};
        CHECK(nmi(pred, truth) ==
              doctest::Approx(oracle::nmi_direct(pred, truth)).epsilon(1e-12));
    }
    SUBCASE("matches the direct formula on random pairs, both normalizations") {
        for (int trial = 0; trial < 40; ++trial) {
            oracle::Rng rng(7000 + trial);
            const int n = rng.uniform_int(4, 60);
            const std::vector<int> pred = random_label_vector(n, rng.uniform_int(1, 5), 100 + trial);
            const std::vector<int> truth = random_label_vector(n, rng.uniform_int(1, 5), 200 + trial);
            CHECK(std::abs(nmi(pred, truth, NmiNormalization::Geometric) -
                           oracle::nmi_direct(pred, truth, true)) <= 1e-12);
            CHECK(std::abs(nmi(pred, truth, NmiNormalization::Max) -
                           oracle::nmi_direct(pred, truth, false)) <= 1e-12);
        }
    }
}

TEST_CASE("purity") {
    SUBCASE("identical labels score 1") {
        const std::vector<int> labels = {0, 1, 0, 1};
        CHECK(purity(labels, labels) == 1.0);
    }
    SUBCASE("one cluster over balanced classes scores 1/k") {
        const std::vector<int> pred = {0, 0, 0, 0, 0, 0};
        const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
        CHECK(purity(pred, truth) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("spec example") {
        const std::vector<int> truth = {0, 0, 1, 1};
        const std::vector<int> pred = {0, 1, 1, 1};
        CHECK(purity(pred, truth) == doctest::Approx(0.75));
    }
    SUBCASE("matches the direct formula on random pairs") {
        for (int trial = 0; trial < 40; ++trial) {
            oracle::Rng rng(9000 + trial);
            const int n = rng.uniform_int(4, 60);
            const std::vector<int> pred = random_label_vector(n, rng.uniform_int(1, 6), 300 + trial);
            const std::vector<int> truth = random_label_vector(n, rng.uniform_int(1, 6), 400 + trial);
            CHECK(std::abs(purity(pred, truth) - oracle::purity_direct(pred, truth)) <= 1e-12);
        }
    }
}

TEST_CASE("metric invariances") {
    const std::vector<int> pred = {0, 0, 1, 2, 2, 1, 0};
    const std::vector<int> truth = {1, 1, 0, 2, 2, 2, 1};
    // consistent relabelings on either side
    std::vector<int> pred_relabeled(pred.size());
    std::vector<int> truth_relabeled(truth.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred_relabeled[i] = 10 - pred[i] * 3;
        truth_relabeled[i] = truth[i] + 100;
    }
    CHECK(accuracy(pred, truth) == accuracy(pred_relabeled, truth_relabeled));
    CHECK(nmi(pred, truth) == doctest::Approx(nmi(pred_relabeled, truth_relabeled)).epsilon(1e-14));
    CHECK(purity(pred, truth) == purity(pred_relabeled, truth_relabeled));
}

TEST_CASE("purity equals accuracy when the majority mapping is injective") {
    // each predicted cluster has a distinct dominant class
    const std::vector<int> pred = {0, 0, 0, 1, 1, 1, 2, 2, 2};
    const std::vector<int> truth = {0, 0, 1, 1, 1, 2, 2, 2, 0};
    CHECK(purity(pred, truth) == doctest::Approx(accuracy(pred, truth)));
}

TEST_CASE("hungarian accuracy dominates any fixed assignment") {
    oracle::Rng rng(515);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(6, 30);
        const std::vector<int> pred = random_label_vector(n, 4, 600 + trial);
        const std::vector<int> truth = random_label_vector(n, 4, 700 + trial);
        // identity assignment: plain agreement rate
        int agree = 0;
        for (int i = 0; i < n; ++i) {
            if (pred[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(i)]) ++agree;
        }
        CHECK(accuracy(pred, truth) >= static_cast<double>(agree) / n - 1e-15);
    }
}

TEST_CASE("metric report serialization") {
    const std::vector<int> truth = {0, 0, 1, 1};
    const std::vector<int> pred = {0, 1, 1, 1};
    const MetricReport report = evaluate(pred, truth);
    CHECK(report.csv_header() == "acc,nmi,purity");
    const std::string json = report.to_json();
    CHECK(json.find("\"acc\"") != std::string::npos);
    CHECK(json.find("\"nmi\"") != std::string::npos);
    CHECK(json.find("\"purity\"") != std::string::npos);
    CHECK(json.find("\"contingency\"") != std::string::npos);
    CHECK(report.contingency.sum() == 4);
}
