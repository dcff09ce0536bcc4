#include "mkrep/kernel_bank.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace mkrep {

std::string family_name(KernelFamily family) {
    switch (family) {
    case KernelFamily::Cosine: return "cosine";
    case KernelFamily::Polynomial: return "poly";
    case KernelFamily::Rbf: return "rbf";
    case KernelFamily::Precomputed: return "precomputed";
    }
    return "unknown";
}

KernelSpec KernelSpec::cosine() {
    KernelSpec s;
    s.family = KernelFamily::Cosine;
    return s;
}

KernelSpec KernelSpec::polynomial(double a, int b) {
    KernelSpec s;
    s.family = KernelFamily::Polynomial;
    s.offset = a;
    s.degree = b;
    return s;
}

KernelSpec KernelSpec::rbf(double c) {
    KernelSpec s;
    s.family = KernelFamily::Rbf;
    s.bandwidth = c;
    return s;
}

KernelSpec KernelSpec::precomputed() {
    KernelSpec s;
    s.family = KernelFamily::Precomputed;
    return s;
}

std::string KernelSpec::describe() const {
    std::ostringstream out;
    switch (family) {
    case KernelFamily::Cosine: out << "cosine"; break;
    case KernelFamily::Polynomial: out << "poly(a=" << offset << ",b=" << degree << ")"; break;
    case KernelFamily::Rbf: out << "rbf(c=" << bandwidth << ")"; break;
    case KernelFamily::Precomputed: out << "precomputed"; break;
    }
    return out.str();
}

KernelSpec parse_kernel_spec(const std::string& token) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : token) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);

    try {
        if (parts[0] == "cosine" && parts.size() == 1) {
            return KernelSpec::cosine();
        }
        if (parts[0] == "poly" && parts.size() == 3) {
            return KernelSpec::polynomial(std::stod(parts[1]), std::stoi(parts[2]));
        }
        if (parts[0] == "rbf" && parts.size() == 2) {
            return KernelSpec::rbf(std::stod(parts[1]));
        }
    } catch (const std::exception&) {
        throw ParseError("bad kernel spec token: '" + token + "'");
    }
    throw ParseError("bad kernel spec token: '" + token +
                     "' (expected cosine, poly:a:b or rbf:c)");
}

namespace {

void check_features(const Matrix& X, const char* op) {
    if (X.rows() < 2) {
        throw std::invalid_argument(std::string(op) + ": need at least 2 samples");
    }
    if (!X.allFinite()) {
        throw NumericalError(std::string(op) + ": feature matrix has non-finite entries");
    }
}

// X X^T with exact symmetry.
Matrix gram_of(const Matrix& X) {
    Matrix G = X * X.transpose();
    const Index n = G.rows();
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double v = 0.5 * (G(i, j) + G(j, i));
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return G;
}

double int_pow(double base, int exp) {
    double r = 1.0;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

} // namespace

KernelMatrix cosine_kernel(const Matrix& X) {
    check_features(X, "cosine_kernel");
    const Index n = X.rows();
    Vector norms(n);
    for (Index i = 0; i < n; ++i) {
        norms(i) = X.row(i).norm();
        if (norms(i) == 0.0) {
            throw NumericalError("cosine_kernel: sample row " + std::to_string(i) +
                                 " has zero norm");
        }
    }
    Matrix G = gram_of(X);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double v = G(i, j) / (norms(i) * norms(j));
            G(i, j) = v;
            G(j, i) = v;
        }
        G(i, i) = 1.0;
    }
    return {std::move(G), KernelSpec::cosine()};
}

KernelMatrix polynomial_kernel(const Matrix& X, double a, int b) {
    check_features(X, "polynomial_kernel");
    if (b < 1) {
        throw std::invalid_argument("polynomial_kernel: degree must be a positive integer");
    }
    if (!std::isfinite(a)) {
        throw std::invalid_argument("polynomial_kernel: offset must be finite");
    }
    Matrix G = gram_of(X);
    const Index n = G.rows();
    for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) {
            const double v = int_pow(a + G(i, j), b);
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return {std::move(G), KernelSpec::polynomial(a, b)};
}

KernelMatrix rbf_kernel(const Matrix& X, double c) {
    check_features(X, "rbf_kernel");
    if (!(c > 0.0)) {
        throw std::invalid_argument("rbf_kernel: bandwidth multiplier must be positive");
    }
    const Index n = X.rows();
    Vector sq(n);
    for (Index i = 0; i < n; ++i) sq(i) = X.row(i).squaredNorm();
    Matrix G = gram_of(X);

    // squared pairwise distances, clamped against round-off
    Matrix D2(n, n);
    double max_d2 = 0.0;
    for (Index i = 0; i < n; ++i) {
        D2(i, i) = 0.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::max(sq(i) + sq(j) - 2.0 * G(i, j), 0.0);
            D2(i, j) = v;
            D2(j, i) = v;
            max_d2 = std::max(max_d2, v);
        }
    }
    if (max_d2 == 0.0) {
        throw NumericalError("rbf_kernel: all samples identical, maximum pairwise distance is 0");
    }
    const double sigma2 = c * c * max_d2; // sigma = c * M, M = sqrt(max_d2)
    Matrix K(n, n);
    for (Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-D2(i, j) / (2.0 * sigma2));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return {std::move(K), KernelSpec::rbf(c)};
}

KernelMatrix normalize_kernel(const KernelMatrix& K) {
    const Index n = K.size();
    if (K.gram.cols() != n) {
        throw std::invalid_argument("normalize_kernel: gram matrix must be square");
    }
    Vector inv_sqrt(n);
    for (Index i = 0; i < n; ++i) {
        const double dii = K.gram(i, i);
        if (!(dii > 0.0)) {
            throw NumericalError("normalize_kernel: non-positive diagonal entry at index " +
                                 std::to_string(i));
        }
        inv_sqrt(i) = 1.0 / std::sqrt(dii);
    }
    Matrix out(n, n);
    for (Index i = 0; i < n; ++i) {
        out(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = K.gram(i, j) * (inv_sqrt(i) * inv_sqrt(j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return {std::move(out), K.spec};
}

std::vector<KernelSpec> default_recipe() {
    std::vector<KernelSpec> recipe;
    recipe.push_back(KernelSpec::cosine());
    for (double a : {0.0, 1.0}) {
        for (int b : {2, 4}) {
            recipe.push_back(KernelSpec::polynomial(a, b));
        }
    }
    for (double c : {0.01, 0.05, 0.1, 1.0, 10.0, 50.0, 100.0}) {
        recipe.push_back(KernelSpec::rbf(c));
    }
    return recipe;
}

KernelBank build_kernel_bank(const Matrix& X, const std::vector<KernelSpec>& recipe) {
    if (recipe.empty()) {
        throw std::invalid_argument("build_kernel_bank: recipe is empty");
    }
    KernelBank bank;
    bank.kernels.reserve(recipe.size());
    for (std::size_t idx = 0; idx < recipe.size(); ++idx) {
        const KernelSpec& spec = recipe[idx];
        try {
            KernelMatrix raw;
            switch (spec.family) {
            case KernelFamily::Cosine: raw = cosine_kernel(X); break;
            case KernelFamily::Polynomial: raw = polynomial_kernel(X, spec.offset, spec.degree); break;
            case KernelFamily::Rbf: raw = rbf_kernel(X, spec.bandwidth); break;
            case KernelFamily::Precomputed:
                throw std::invalid_argument("precomputed kernels come from a manifest, not a recipe");
            }
            bank.kernels.push_back(normalize_kernel(raw));
        } catch (const NumericalError& err) {
            throw NumericalError("kernel " + std::to_string(idx) + " (" + spec.describe() +
                                 "): " + err.what());
        }
    }
    return bank;
}

bool ValidationReport::ok() const {
    for (const auto& check : checks) {
        if (!check.ok()) return false;
    }
    return true;
}

ValidationReport validate_bank(const KernelBank& bank, double tol) {
    ValidationReport report;
    report.tol = tol;
    report.checks.reserve(bank.kernels.size());
    for (const auto& kernel : bank.kernels) {
        const Matrix& K = kernel.gram;
        KernelCheck check;
        check.symmetry_residual = (K - K.transpose()).cwiseAbs().maxCoeff();
        check.max_diag_deviation = (K.diagonal().array() - 1.0).abs().maxCoeff();

        Eigen::SelfAdjointEigenSolver<Matrix> es(K, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            throw NumericalError("validate_bank: eigenvalue computation failed for kernel " +
                                 kernel.spec.describe());
        }
        check.min_eigenvalue = es.eigenvalues().minCoeff();
        check.max_eigenvalue = es.eigenvalues().maxCoeff();

        check.symmetric = check.symmetry_residual <= tol;
        check.unit_diagonal = check.max_diag_deviation <= tol;
        check.psd = check.min_eigenvalue >= -1e-8 * std::max(check.max_eigenvalue, 0.0);
        report.checks.push_back(check);
    }
    return report;
}

} // namespace mkrep
