#include "mkrep/solver.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "mkrep/clustering.hpp"
#include "mkrep/representative_selection.hpp"

namespace mkrep {

Vector weights_from_y(const Matrix& Y) {
    if (Y.rows() != Y.cols() || Y.rows() == 0) {
        throw std::invalid_argument("weights_from_y: Y must be a nonempty square matrix");
    }
    return Y.rowwise().sum() / static_cast<double>(Y.rows());
}

KernelMatrix combine_kernels(const KernelBank& bank, const Vector& w) {
    if (w.size() != bank.m()) {
        throw std::invalid_argument("combine_kernels: weight count does not match bank size");
    }
    const Index n = bank.n();
    Matrix combined = Matrix::Zero(n, n);
    for (int p = 0; p < bank.m(); ++p) {
        combined += (w(p) * w(p)) * bank.kernels[static_cast<std::size_t>(p)].gram;
    }
    return {std::move(combined), KernelSpec::precomputed()};
}

Matrix update_embedding(const Matrix& K, int k) {
    const Index n = K.rows();
    if (K.cols() != n) throw std::invalid_argument("update_embedding: K must be square");
    if (k < 1 || k > n) throw std::invalid_argument("update_embedding: need 1 <= k <= n");
    const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw std::invalid_argument("update_embedding: K is not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    if (es.info() != Eigen::Success) {
        std::ostringstream diag;
        diag << "update_embedding: eigendecomposition failed (n=" << n
             << ", |K|_max=" << K.cwiseAbs().maxCoeff()
             << ", finite=" << (K.allFinite() ? "yes" : "no") << ")";
        throw NumericalError(diag.str());
    }

    // eigenvalues come back ascending; take the top k in descending order
    Matrix H(n, k);
    for (int c = 0; c < k; ++c) {
        H.col(c) = es.eigenvectors().col(n - 1 - c);
        Index arg_max = 0;
        double best = -1.0;
        for (Index r = 0; r < n; ++r) {
            const double mag = std::abs(H(r, c));
            if (mag > best) {
                best = mag;
                arg_max = r;
            }
        }
        if (H(arg_max, c) < 0.0) H.col(c) = -H.col(c);
    }
    return H;
}

double objective(const KernelBank& bank, const Matrix& Y, const Matrix& H,
                 double lambda, const Matrix& C) {
    const Vector w = weights_from_y(Y);
    const Vector d = residual_costs(bank, H);
    return (w.array().square() * d.array()).sum() + lambda * C.cwiseProduct(Y).sum();
}

SolveResult fit(const KernelBank& bank, int k, const SolveOptions& opts) {
    if (bank.kernels.empty()) throw std::invalid_argument("fit: empty kernel bank");
    if (k < 2) throw std::invalid_argument("fit: k must be at least 2");
    if (k > bank.n()) throw std::invalid_argument("fit: k exceeds the sample count");
    if (!(opts.epsilon > 0.0)) throw std::invalid_argument("fit: epsilon must be positive");
    if (opts.max_outer_iters < 1) throw std::invalid_argument("fit: max_outer_iters must be >= 1");
    if (opts.lambda < 0.0) throw std::invalid_argument("fit: lambda must be nonnegative");

    const int m = bank.m();
    const Matrix C = dissimilarity_matrix(bank);

    SolveResult result;
    result.y = Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
    result.weights = weights_from_y(result.y);

    double f_prev = std::numeric_limits<double>::quiet_NaN();
    for (int t = 1; t <= opts.max_outer_iters; ++t) {
        const KernelMatrix combined = combine_kernels(bank, result.weights);
        result.embedding = update_embedding(combined.gram, k);

        const Vector d = residual_costs(bank, result.embedding).cwiseMax(0.0);
        YSolveResult ysol = solve_y_subproblem(C, d, opts.lambda, result.y,
                                               opts.qp_tol, opts.qp_max_iters);
        result.y = std::move(ysol.Y);
        result.weights = weights_from_y(result.y);

        const double f = (result.weights.array().square() * d.array()).sum() +
                         opts.lambda * C.cwiseProduct(result.y).sum();

        IterationRecord record;
        record.objective = f;
        record.weights = result.weights;
        record.qp_kkt_residual = ysol.kkt;
        if (opts.trace_y) record.y = result.y;
        result.trace.push_back(std::move(record));
        result.iterations = t;

        if (t >= 2 && std::abs(f_prev - f) <= opts.epsilon * std::max(1.0, std::abs(f_prev))) {
            result.converged = true;
            break;
        }
        f_prev = f;
    }

    result.labels = discretize(result.embedding, k, opts.seed, opts.restarts);
    return result;
}

} // namespace mkrep
