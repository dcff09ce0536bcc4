#pragma once

#include <cstdint>
#include <vector>

#include "mkrep/common.hpp"
#include "mkrep/kernel_bank.hpp"

namespace mkrep {

struct SolveOptions {
    double lambda = 1.0;
    double epsilon = 1e-6;   // stop when |f_prev - f| <= epsilon * max(1, |f_prev|)
    int max_outer_iters = 100;
    double qp_tol = 1e-7;
    int qp_max_iters = 10000;
    std::uint64_t seed = 0;
    int restarts = 20;       // discretization restarts
    bool trace_y = false;    // keep per-iteration Y snapshots in the trace
};

struct IterationRecord {
    double objective = 0.0;
    Vector weights;
    double qp_kkt_residual = 0.0;
    Matrix y; // empty unless SolveOptions::trace_y
};

struct SolveResult {
    Matrix y;         // m x m representation matrix, columns on the simplex
    Vector weights;   // m, row means of y
    Matrix embedding; // n x k, orthonormal columns
    std::vector<int> labels;
    std::vector<IterationRecord> trace;
    bool converged = false;
    int iterations = 0;
};

/// w_i = (1/m) sum_j Y_ij.
Vector weights_from_y(const Matrix& Y);

/// K_w = sum_p w_p^2 K_p (note the squared weights).
KernelMatrix combine_kernels(const KernelBank& bank, const Vector& w);

/// Orthonormal eigenvectors for the k algebraically largest eigenvalues of the
/// symmetric matrix K, in descending eigenvalue order. The sign of each column
/// is fixed so its largest-magnitude entry is positive.
Matrix update_embedding(const Matrix& K, int k);

/// Joint objective Tr(K_Y (I - H H^T)) + lambda Tr(C^T Y) with
/// K_Y = sum_i w_i^2 K_i and w = weights_from_y(Y).
double objective(const KernelBank& bank, const Matrix& Y, const Matrix& H,
                 double lambda, const Matrix& C);

/// Alternating minimization: eigen-update of the embedding on the combined
/// kernel, then the convex Y-subproblem, until the relative objective change
/// falls below epsilon. Labels come from discretizing the final embedding.
SolveResult fit(const KernelBank& bank, int k, const SolveOptions& opts = {});

} // namespace mkrep
