#pragma once

#include <string>
#include <vector>

#include "mkrep/common.hpp"

namespace mkrep {

enum class KernelFamily { Cosine, Polynomial, Rbf, Precomputed };

std::string family_name(KernelFamily family);

/// Recipe entry describing how one Gram matrix is built.
struct KernelSpec {
    KernelFamily family = KernelFamily::Cosine;
    double offset = 0.0;    // polynomial offset a
    int degree = 2;         // polynomial degree b
    double bandwidth = 1.0; // gaussian bandwidth multiplier c, sigma = c * max pairwise distance

    static KernelSpec cosine();
    static KernelSpec polynomial(double a, int b);
    static KernelSpec rbf(double c);
    static KernelSpec precomputed();

    std::string describe() const; // e.g. "rbf(c=0.1)"
};

/// Parse a recipe token: "cosine", "poly:a:b", "rbf:c".
KernelSpec parse_kernel_spec(const std::string& token);

struct KernelMatrix {
    Matrix gram;
    KernelSpec spec;

    Index size() const { return gram.rows(); }
};

/// Ordered collection of base kernels over the same samples.
struct KernelBank {
    std::vector<KernelMatrix> kernels;

    int m() const { return static_cast<int>(kernels.size()); }
    Index n() const { return kernels.empty() ? 0 : kernels.front().size(); }
};

/// gram[i][j] = <x_i, x_j> / (|x_i| |x_j|). Throws NumericalError on a zero row.
KernelMatrix cosine_kernel(const Matrix& X);

/// gram[i][j] = (a + <x_i, x_j>)^b, returned unnormalized.
KernelMatrix polynomial_kernel(const Matrix& X, double a, int b);

/// gram[i][j] = exp(-|x_i - x_j|^2 / (2 sigma^2)) with sigma = c * M,
/// M the maximum pairwise distance. Throws NumericalError when M = 0.
KernelMatrix rbf_kernel(const Matrix& X, double c);

/// Cosine-normalizes the Gram matrix: gram[i][j] / sqrt(gram[i][i] gram[j][j]).
/// The diagonal becomes exactly 1. Entries of an indefinite input may be negative;
/// no further rescaling is applied. Throws NumericalError on a non-positive
/// diagonal entry.
KernelMatrix normalize_kernel(const KernelMatrix& K);

/// The default twelve-kernel bank: one cosine kernel, four polynomial kernels
/// (a in {0,1}, b in {2,4}) and seven gaussian kernels
/// (c in {0.01, 0.05, 0.1, 1, 10, 50, 100}).
std::vector<KernelSpec> default_recipe();

/// Builds one normalized kernel per spec, in recipe order.
KernelBank build_kernel_bank(const Matrix& X, const std::vector<KernelSpec>& recipe);

struct KernelCheck {
    double symmetry_residual = 0.0;  // max |K - K^T|
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double max_diag_deviation = 0.0; // max |K_ii - 1|
    bool symmetric = true;
    bool psd = true;
    bool unit_diagonal = true;

    bool ok() const { return symmetric && psd && unit_diagonal; }
};

struct ValidationReport {
    std::vector<KernelCheck> checks;
    double tol = 1e-8;

    bool ok() const;
};

/// Report-only validation: symmetry and diagonal against tol, positive
/// semidefiniteness against a relative 1e-8 eigenvalue floor.
ValidationReport validate_bank(const KernelBank& bank, double tol = 1e-8);

} // namespace mkrep
