#include <doctest.h>

#include <cmath>
#include <limits>

#include "mkrep/clustering.hpp"
#include "mkrep/evaluation.hpp"
#include "mkrep/kernel_bank.hpp"
#include "mkrep/solver.hpp"
#include "oracles.hpp"

using namespace mkrep;

TEST_CASE("lloyd_kmeans") {
    const auto [X, truth] = oracle::make_blobs(3, 20, 2, 6.0, 0.4, 13);

    SUBCASE("recovers separated blobs") {
        const KmeansRun run = lloyd_kmeans(X, 3, 1);
        CHECK(accuracy(run.labels, truth) == 1.0);
    }
    SUBCASE("more Lloyd iterations never cost more") {
        double prev = std::numeric_limits<double>::infinity();
        for (int iters : {1, 2, 5, 300}) {
            const KmeansRun run = lloyd_kmeans(X, 3, 42, iters);
            CHECK(run.cost <= prev + 1e-12);
            prev = run.cost;
        }
    }
    SUBCASE("deterministic for a fixed seed") {
        const KmeansRun a = lloyd_kmeans(X, 3, 7);
        const KmeansRun b = lloyd_kmeans(X, 3, 7);
        CHECK(a.labels == b.labels);
        CHECK(a.cost == b.cost);
    }
    SUBCASE("k larger than n is rejected") {
        CHECK_THROWS_AS(lloyd_kmeans(Matrix::Zero(2, 2), 3, 0), std::invalid_argument);
    }
}

TEST_CASE("discretize") {
    SUBCASE("orthogonal one-hot groups are recovered exactly") {
        const int k = 3;
        const int per = 4;
        Matrix H = Matrix::Zero(k * per, k);
        std::vector<int> truth(static_cast<std::size_t>(k * per));
        for (int c = 0; c < k; ++c) {
            for (int s = 0; s < per; ++s) {
                H(c * per + s, c) = 1.0 / std::sqrt(static_cast<double>(per));
                truth[static_cast<std::size_t>(c * per + s)] = c;
            }
        }
        const std::vector<int> labels = discretize(H, k, 0, 5);
        CHECK(accuracy(labels, truth) == 1.0);
    }

    SUBCASE("restarts can only lower the k-means cost") {
        const auto [H, truth] = oracle::make_blobs(4, 10, 4, 2.0, 1.5, 99);
        const std::vector<int> one = discretize(H, 4, 11, 1, false);
        const std::vector<int> twenty = discretize(H, 4, 11, 20, false);
        CHECK(oracle::kmeans_cost(H, twenty, 4) <= oracle::kmeans_cost(H, one, 4) + 1e-9);
    }

    SUBCASE("duplicate rows get identical labels") {
        Matrix H(6, 2);
        H << 1, 0,
             1, 0,
             0, 1,
             0, 1,
             0.6, 0.8,
             0.6, 0.8;
        const std::vector<int> labels = discretize(H, 2, 3, 4);
        CHECK(labels[0] == labels[1]);
        CHECK(labels[2] == labels[3]);
        CHECK(labels[4] == labels[5]);
    }

    SUBCASE("deterministic for fixed inputs") {
        const Matrix H = oracle::random_orthonormal(20, 3, 55);
        CHECK(discretize(H, 3, 9, 10) == discretize(H, 3, 9, 10));
    }

    SUBCASE("label output is invariant to column-orthogonal rotation") {
        const auto [X, truth] = oracle::make_blobs(3, 15, 2, 6.0, 0.3, 21);
        KernelBank bank;
        bank.kernels.push_back(rbf_kernel(X, 0.1));
        const Matrix H = update_embedding(bank.kernels[0].gram, 3);
        const Matrix R = oracle::random_orthonormal(3, 3, 77); // square orthogonal
        const Matrix HR = H * R;

        const std::vector<int> base = discretize(H, 3, 5, 8);
        const std::vector<int> rotated = discretize(HR, 3, 5, 8);
        CHECK(oracle::kmeans_cost(HR, rotated, 3) ==
              doctest::Approx(oracle::kmeans_cost(H, base, 3)).epsilon(1e-9));
        // identical partition under the fixed seed
        const Eigen::MatrixXi table = contingency_table(base, rotated);
        int nonzero = 0;
        for (Eigen::Index r = 0; r < table.rows(); ++r) {
            for (Eigen::Index c = 0; c < table.cols(); ++c) {
                if (table(r, c) > 0) ++nonzero;
            }
        }
        CHECK(nonzero == 3); // a bijection between the two labelings
    }
}

TEST_CASE("kernel_kmeans") {
    SUBCASE("block-diagonal kernel splits by block") {
        Matrix K = Matrix::Zero(6, 6);
        K.block(0, 0, 3, 3) = Matrix::Ones(3, 3);
        K.block(3, 3, 3, 3) = Matrix::Ones(3, 3);
        const std::vector<int> truth = {0, 0, 0, 1, 1, 1};
        const KernelKmeansResult result = kernel_kmeans(K, 2, 0, 5);
        CHECK(accuracy(result.labels, truth) == 1.0);
    }

    SUBCASE("identity kernel has relaxed objective n - k for any embedding") {
        const Index n = 9;
        const int k = 4;
        const KernelKmeansResult result = kernel_kmeans(Matrix::Identity(n, n), k, 1, 3);
        const Matrix& H = result.embedding;
        const double relaxed = Matrix::Identity(n, n).trace() -
                               (Matrix::Identity(n, n) * H).cwiseProduct(H).sum();
        CHECK(relaxed == doctest::Approx(static_cast<double>(n - k)).epsilon(1e-12));
    }

    SUBCASE("n = k drives the relaxed objective to zero") {
        const Matrix K = oracle::random_psd(5, 3);
        const int k = 5;
        const Matrix H = update_embedding(K, k);
        const double relaxed = K.trace() - (K * H).cwiseProduct(H).sum();
        CHECK(std::abs(relaxed) <= 1e-9);
    }

    SUBCASE("k below 2 is rejected") {
        CHECK_THROWS_AS(kernel_kmeans(Matrix::Identity(4, 4), 1, 0, 1), std::invalid_argument);
    }
}
