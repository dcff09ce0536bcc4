#pragma once

#include <cstdint>
#include <vector>

#include "mkrep/common.hpp"

namespace mkrep {

struct KmeansRun {
    std::vector<int> labels;
    double cost = 0.0;
};

/// One Lloyd run over the rows of `points` with k-means++ seeding.
/// Deterministic for a fixed seed. Empty clusters keep their previous center.
KmeansRun lloyd_kmeans(const Matrix& points, int k, std::uint64_t seed,
                       int max_iters = 300);

/// Rounds a relaxed embedding into hard labels: rows of H are length-normalized
/// (zero rows are kept as-is), then Lloyd's k-means with k-means++ seeding runs
/// `restarts` times with seeds seed, seed+1, ... and the lowest-cost labeling
/// wins (ties by earlier seed).
std::vector<int> discretize(const Matrix& H, int k, std::uint64_t seed,
                            int restarts, bool normalize_rows = true);

struct KernelKmeansResult {
    std::vector<int> labels;
    Matrix embedding;
};

/// Kernel k-means through the trace relaxation: top-k eigen-embedding of K
/// followed by discretization.
KernelKmeansResult kernel_kmeans(const Matrix& K, int k, std::uint64_t seed,
                                 int restarts);

} // namespace mkrep
