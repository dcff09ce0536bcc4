#include "mkrep/baselines.hpp"

#include <cmath>
#include <limits>

#include "mkrep/clustering.hpp"
#include "mkrep/representative_selection.hpp"

namespace mkrep {

SbKkmResult sb_kkm(const KernelBank& bank, int k, const std::vector<int>& truth,
                   std::uint64_t seed, int restarts) {
    if (bank.kernels.empty()) throw std::invalid_argument("sb_kkm: empty kernel bank");
    if (truth.size() != static_cast<std::size_t>(bank.n())) {
        throw std::invalid_argument("sb_kkm: ground-truth label count does not match samples");
    }
    SbKkmResult result;
    result.runs.reserve(bank.kernels.size());
    double best_acc = -1.0;
    for (int p = 0; p < bank.m(); ++p) {
        SingleKernelRun run;
        run.kernel_index = p;
        KernelKmeansResult kk = kernel_kmeans(bank.kernels[static_cast<std::size_t>(p)].gram,
                                              k, seed, restarts);
        run.labels = std::move(kk.labels);
        run.metrics = evaluate(run.labels, truth);
        if (run.metrics.acc > best_acc) {
            best_acc = run.metrics.acc;
            result.best_index = p;
        }
        result.runs.push_back(std::move(run));
    }
    return result;
}

BaselineResult a_mkkm(const KernelBank& bank, int k, std::uint64_t seed, int restarts) {
    if (bank.kernels.empty()) throw std::invalid_argument("a_mkkm: empty kernel bank");
    const int m = bank.m();
    const Index n = bank.n();
    Matrix average = Matrix::Zero(n, n);
    for (const auto& kernel : bank.kernels) average += kernel.gram;
    average /= static_cast<double>(m);

    BaselineResult result;
    KernelKmeansResult kk = kernel_kmeans(average, k, seed, restarts);
    result.labels = std::move(kk.labels);
    result.embedding = std::move(kk.embedding);
    result.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
    return result;
}

Vector inverse_residual_weights(const Vector& d_in) {
    const Index m = d_in.size();
    if (m == 0) throw std::invalid_argument("inverse_residual_weights: empty residual vector");
    const Vector d = d_in.cwiseMax(0.0);

    std::vector<Index> zero_cost;
    for (Index i = 0; i < m; ++i) {
        if (d(i) == 0.0) zero_cost.push_back(i);
    }
    Vector w = Vector::Zero(m);
    if (!zero_cost.empty()) {
        for (Index i : zero_cost) w(i) = 1.0 / static_cast<double>(zero_cost.size());
        return w;
    }
    double denom = 0.0;
    for (Index i = 0; i < m; ++i) denom += 1.0 / d(i);
    for (Index i = 0; i < m; ++i) w(i) = (1.0 / d(i)) / denom;
    return w;
}

BaselineResult mkkm_vanilla(const KernelBank& bank, int k, const SolveOptions& opts) {
    if (bank.kernels.empty()) throw std::invalid_argument("mkkm_vanilla: empty kernel bank");
    if (k < 2) throw std::invalid_argument("mkkm_vanilla: k must be at least 2");

    const int m = bank.m();
    BaselineResult result;
    result.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
    result.converged = false;

    double f_prev = std::numeric_limits<double>::quiet_NaN();
    for (int t = 1; t <= opts.max_outer_iters; ++t) {
        const KernelMatrix combined = combine_kernels(bank, result.weights);
        result.embedding = update_embedding(combined.gram, k);

        const Vector d = residual_costs(bank, result.embedding).cwiseMax(0.0);
        result.weights = inverse_residual_weights(d);

        const double f = (result.weights.array().square() * d.array()).sum();
        result.objective_trace.push_back(f);
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
