#include "mkrep/clustering.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mkrep/solver.hpp"

namespace mkrep {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Index nearest_center(const Matrix& centers, const Eigen::RowVectorXd& point, int k,
                     double* dist_out = nullptr) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < k; ++c) {
        const double dist = (point - centers.row(c)).squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best = c;
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

// D^2-weighted seeding; falls back to a uniform pick when every point
// already coincides with a chosen center.
Matrix kmeanspp_centers(const Matrix& points, int k, std::mt19937_64& rng) {
    const Index n = points.rows();
    Matrix centers(k, points.cols());
    const Index first = std::min<Index>(static_cast<Index>(uniform01(rng) * n), n - 1);
    centers.row(0) = points.row(first);

    Vector d2(n);
    for (Index i = 0; i < n; ++i) {
        d2(i) = (points.row(i) - centers.row(0)).squaredNorm();
    }
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Index pick;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double cum = 0.0;
            pick = n - 1;
            for (Index i = 0; i < n; ++i) {
                cum += d2(i);
                if (cum > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::min<Index>(static_cast<Index>(uniform01(rng) * n), n - 1);
        }
        centers.row(c) = points.row(pick);
        for (Index i = 0; i < n; ++i) {
            d2(i) = std::min(d2(i), (points.row(i) - centers.row(c)).squaredNorm());
        }
    }
    return centers;
}

} // namespace

KmeansRun lloyd_kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iters) {
    const Index n = points.rows();
    if (k < 1) throw std::invalid_argument("lloyd_kmeans: k must be at least 1");
    if (n < k) throw std::invalid_argument("lloyd_kmeans: fewer points than clusters");

    std::mt19937_64 rng(seed);
    Matrix centers = kmeanspp_centers(points, k, rng);

    KmeansRun run;
    run.labels.assign(static_cast<std::size_t>(n), 0);
    double prev_cost = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iters; ++iter) {
        double cost = 0.0;
        for (Index i = 0; i < n; ++i) {
            double dist;
            run.labels[static_cast<std::size_t>(i)] =
                static_cast<int>(nearest_center(centers, points.row(i), k, &dist));
            cost += dist;
        }
        run.cost = cost;
        if (std::abs(prev_cost - cost) < 1e-9 * std::max(prev_cost, 1.0)) break;
        prev_cost = cost;

        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < n; ++i) {
            const int label = run.labels[static_cast<std::size_t>(i)];
            sums.row(label) += points.row(i);
            ++counts[static_cast<std::size_t>(label)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            }
            // empty clusters keep their previous center
        }
    }
    return run;
}

std::vector<int> discretize(const Matrix& H, int k, std::uint64_t seed, int restarts,
                            bool normalize_rows) {
    if (restarts < 1) throw std::invalid_argument("discretize: restarts must be at least 1");
    Matrix points = H;
    if (normalize_rows) {
        for (Index i = 0; i < points.rows(); ++i) {
            const double norm = points.row(i).norm();
            if (norm > 0.0) points.row(i) /= norm;
        }
    }
    KmeansRun best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        KmeansRun run = lloyd_kmeans(points, k, seed + static_cast<std::uint64_t>(r));
        if (run.cost < best.cost) best = std::move(run);
    }
    return best.labels;
}

KernelKmeansResult kernel_kmeans(const Matrix& K, int k, std::uint64_t seed, int restarts) {
    if (k < 2) throw std::invalid_argument("kernel_kmeans: k must be at least 2");
    KernelKmeansResult result;
    result.embedding = update_embedding(K, k);
    result.labels = discretize(result.embedding, k, seed, restarts);
    return result;
}

} // namespace mkrep
