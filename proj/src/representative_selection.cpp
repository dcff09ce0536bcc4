#include "mkrep/representative_selection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mkrep {

namespace {

void check_bank(const KernelBank& bank, const char* op) {
    if (bank.kernels.empty()) {
        throw std::invalid_argument(std::string(op) + ": empty kernel bank");
    }
    const Index n = bank.n();
    for (const auto& kernel : bank.kernels) {
        if (kernel.gram.rows() != n || kernel.gram.cols() != n) {
            throw std::invalid_argument(std::string(op) +
                                        ": kernels disagree on sample count");
        }
    }
}

} // namespace

Matrix dissimilarity_matrix(const KernelBank& bank) {
    check_bank(bank, "dissimilarity_matrix");
    const int m = bank.m();
    Matrix C(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            const double c = bank.kernels[i].gram.cwiseProduct(bank.kernels[j].gram).sum();
            C(i, j) = c;
            C(j, i) = c;
        }
    }
    return C;
}

Vector residual_costs(const KernelBank& bank, const Matrix& H) {
    check_bank(bank, "residual_costs");
    if (H.rows() != bank.n()) {
        throw std::invalid_argument("residual_costs: embedding row count does not match kernels");
    }
    const double gram_residual =
        (H.transpose() * H - Matrix::Identity(H.cols(), H.cols())).cwiseAbs().maxCoeff();
    if (gram_residual > 1e-8) {
        throw NumericalError("residual_costs: embedding columns are not orthonormal "
                             "(Gram residual " + std::to_string(gram_residual) + ")");
    }
    const int m = bank.m();
    Vector d(m);
    for (int i = 0; i < m; ++i) {
        const Matrix& K = bank.kernels[i].gram;
        // Tr(H^T K H) without forming I - H H^T
        const double explained = (K * H).cwiseProduct(H).sum();
        d(i) = K.trace() - explained;
    }
    return d;
}

Vector project_column_simplex(const Vector& v) {
    const Index m = v.size();
    if (m == 0) {
        throw std::invalid_argument("project_column_simplex: empty vector");
    }
    if (!v.allFinite()) {
        throw std::invalid_argument("project_column_simplex: non-finite entries");
    }
    std::vector<double> sorted(v.data(), v.data() + m);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    double prefix = 0.0;
    double theta = 0.0;
    for (Index i = 0; i < m; ++i) {
        prefix += sorted[static_cast<std::size_t>(i)];
        const double t = (prefix - 1.0) / static_cast<double>(i + 1);
        if (sorted[static_cast<std::size_t>(i)] - t > 0.0) {
            theta = t;
        }
    }
    return (v.array() - theta).cwiseMax(0.0);
}

double y_subproblem_objective(const Matrix& Y, const Matrix& C, const Vector& d,
                              double lambda) {
    const double m = static_cast<double>(Y.rows());
    const Vector row_sums = Y.rowwise().sum();
    const double quadratic = (d.array() * row_sums.array().square()).sum() / (m * m);
    return quadratic + lambda * C.cwiseProduct(Y).sum();
}

Matrix y_subproblem_gradient(const Matrix& Y, const Matrix& C, const Vector& d,
                             double lambda) {
    const Index m = Y.rows();
    const Vector row_sums = Y.rowwise().sum();
    const Vector row_part = (2.0 / static_cast<double>(m * m)) * d.cwiseProduct(row_sums);
    return row_part.replicate(1, m) + lambda * C;
}

double kkt_residual(const Matrix& Y, const Matrix& C, const Vector& d, double lambda) {
    const Matrix G = y_subproblem_gradient(Y, C, d, lambda);
    double res = 0.0;
    for (Index j = 0; j < Y.cols(); ++j) {
        const Vector projected = project_column_simplex(Y.col(j) - G.col(j));
        res = std::max(res, (Y.col(j) - projected).norm());
    }
    return res;
}

YSolveResult solve_y_subproblem(const Matrix& C, const Vector& d_in, double lambda,
                                const Matrix& Y0, double tol, int max_iters) {
    const Index m = C.rows();
    if (C.cols() != m) throw std::invalid_argument("solve_y_subproblem: C must be square");
    if (d_in.size() != m) throw std::invalid_argument("solve_y_subproblem: d size mismatch");
    if (Y0.rows() != m || Y0.cols() != m) {
        throw std::invalid_argument("solve_y_subproblem: Y0 shape mismatch");
    }
    if (lambda < 0.0) throw std::invalid_argument("solve_y_subproblem: lambda must be nonnegative");
    if (!(tol > 0.0) || max_iters < 1) {
        throw std::invalid_argument("solve_y_subproblem: bad tolerance or iteration budget");
    }
    for (Index j = 0; j < m; ++j) {
        if (std::abs(Y0.col(j).sum() - 1.0) > 1e-6 || Y0.col(j).minCoeff() < -1e-9) {
            throw std::invalid_argument("solve_y_subproblem: Y0 column " + std::to_string(j) +
                                        " is not on the simplex");
        }
    }

    const Vector d = d_in.cwiseMax(0.0);
    const double lipschitz = 2.0 * d.maxCoeff() / static_cast<double>(m);
    double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

    YSolveResult result;
    result.Y = Y0;
    double f = y_subproblem_objective(result.Y, C, d, lambda);

    Matrix candidate(m, m);
    for (int iter = 1; iter <= max_iters; ++iter) {
        const Matrix G = y_subproblem_gradient(result.Y, C, d, lambda);

        double res = 0.0;
        for (Index j = 0; j < m; ++j) {
            const Vector projected = project_column_simplex(result.Y.col(j) - G.col(j));
            res = std::max(res, (result.Y.col(j) - projected).norm());
        }
        if (res <= tol) {
            result.converged = true;
            result.kkt = res;
            result.iterations = iter - 1;
            return result;
        }

        // Armijo backtracking along the projection arc; the accepted step
        // strictly decreases the objective.
        step = std::min(step * 1.3, 1e12);
        bool moved = false;
        while (step >= 1e-18) {
            for (Index j = 0; j < m; ++j) {
                candidate.col(j) = project_column_simplex(result.Y.col(j) - step * G.col(j));
            }
            const double f_new = y_subproblem_objective(candidate, C, d, lambda);
            const double directional = G.cwiseProduct(candidate - result.Y).sum();
            if (f_new <= f + 1e-4 * directional) {
                if ((candidate - result.Y).cwiseAbs().maxCoeff() > 0.0) moved = true;
                result.Y = candidate;
                f = f_new;
                break;
            }
            step *= 0.5;
        }
        result.iterations = iter;
        if (!moved) break; // stalled at numerical precision
    }

    result.converged = false;
    result.kkt = kkt_residual(result.Y, C, d, lambda);
    if (result.kkt <= tol) result.converged = true;
    return result;
}

} // namespace mkrep
