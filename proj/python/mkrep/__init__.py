"""Multiple kernel k-means clustering with representative kernel selection."""

from ._mkrep import (
    BaselineResult,
    Dataset,
    IterationRecord,
    KernelBank,
    KernelCheck,
    KernelFamily,
    KernelMatrix,
    KernelSpec,
    MetricReport,
    NumericalError,
    ParseError,
    SbKkmResult,
    SingleKernelRun,
    SolveResult,
    ValidationReport,
    YSolveResult,
    a_mkkm,
    accuracy,
    build_kernel_bank,
    combine_kernels,
    cosine_kernel,
    default_recipe,
    discretize,
    dissimilarity_matrix,
    evaluate,
    fit,
    kernel_kmeans,
    kkt_residual,
    load_dataset,
    load_kernel_manifest,
    mkkm_vanilla,
    nmi,
    normalize_kernel,
    objective,
    polynomial_kernel,
    project_column_simplex,
    purity,
    rbf_kernel,
    residual_costs,
    save_kernel_bank,
    sb_kkm,
    solve_y_subproblem,
    update_embedding,
    validate_bank,
    weights_from_y,
    y_subproblem_gradient,
    y_subproblem_objective,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
