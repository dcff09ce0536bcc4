#pragma once

#include <cstdint>
#include <vector>

#include "mkrep/common.hpp"
#include "mkrep/evaluation.hpp"
#include "mkrep/kernel_bank.hpp"
#include "mkrep/solver.hpp"

namespace mkrep {

struct BaselineResult {
    std::vector<int> labels;
    Vector weights;
    Matrix embedding;
    std::vector<double> objective_trace;
    bool converged = true;
    int iterations = 1;
};

struct SingleKernelRun {
    int kernel_index = 0;
    std::vector<int> labels;
    MetricReport metrics;
};

struct SbKkmResult {
    std::vector<SingleKernelRun> runs;
    int best_index = 0; // highest accuracy, ties to the lower kernel index

    const SingleKernelRun& best() const { return runs.at(best_index); }
};

/// Kernel k-means on every base kernel; the accuracy-maximizing run is marked.
SbKkmResult sb_kkm(const KernelBank& bank, int k, const std::vector<int>& truth,
                   std::uint64_t seed, int restarts);

/// Kernel k-means on the equal-weight average kernel (1/m) sum K_p.
BaselineResult a_mkkm(const KernelBank& bank, int k, std::uint64_t seed, int restarts);

/// Alternates the eigen-embedding update on K_w with the closed-form weight
/// minimizer of sum_p w_p^2 d_p over the simplex, w_p = (1/d_p) / sum_q (1/d_q).
/// Kernels with zero residual cost share all the weight uniformly.
BaselineResult mkkm_vanilla(const KernelBank& bank, int k, const SolveOptions& opts);

/// The closed-form inverse-residual weights used by mkkm_vanilla.
Vector inverse_residual_weights(const Vector& d);

} // namespace mkrep
