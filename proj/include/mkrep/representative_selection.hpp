#pragma once

#include "mkrep/common.hpp"
#include "mkrep/kernel_bank.hpp"

namespace mkrep {

/// C[i][j] = Tr(K_i^T K_j), the Frobenius inner products between base kernels.
Matrix dissimilarity_matrix(const KernelBank& bank);

/// d[i] = Tr(K_i) - Tr(H^T K_i H), the trace of K_i unexplained by the
/// embedding. H must have orthonormal columns (checked to 1e-8).
Vector residual_costs(const KernelBank& bank, const Matrix& H);

/// Euclidean projection onto the unit simplex {u >= 0, sum u = 1}.
Vector project_column_simplex(const Vector& v);

/// Objective of the Y-subproblem:
///   (1/m^2) sum_i d_i (row_sum_i Y)^2 + lambda sum_ij C_ij Y_ij.
double y_subproblem_objective(const Matrix& Y, const Matrix& C, const Vector& d,
                              double lambda);

/// Gradient of the Y-subproblem objective:
///   G_ij = (2/m^2) d_i (row_sum_i Y) + lambda C_ij.
Matrix y_subproblem_gradient(const Matrix& Y, const Matrix& C, const Vector& d,
                             double lambda);

/// Max over columns of || y_col - P_simplex(y_col - grad_col) ||. Zero exactly
/// at minimizers of the convex Y-subproblem.
double kkt_residual(const Matrix& Y, const Matrix& C, const Vector& d, double lambda);

struct YSolveResult {
    Matrix Y;
    bool converged = false;
    double kkt = 0.0;
    int iterations = 0;
};

/// Minimizes the Y-subproblem over column-stochastic nonnegative Y by
/// projected gradient descent with Armijo backtracking. The iterate sequence
/// is monotone: the returned objective never exceeds the objective at Y0.
/// Negative entries of d are clamped to zero before the solve.
YSolveResult solve_y_subproblem(const Matrix& C, const Vector& d, double lambda,
                                const Matrix& Y0, double tol = 1e-7,
                                int max_iters = 10000);

} // namespace mkrep
