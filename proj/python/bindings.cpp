#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mkrep/baselines.hpp"
#include "mkrep/clustering.hpp"
#include "mkrep/evaluation.hpp"
#include "mkrep/io.hpp"
#include "mkrep/kernel_bank.hpp"
#include "mkrep/representative_selection.hpp"
#include "mkrep/solver.hpp"

namespace py = pybind11;
using namespace mkrep;

namespace {

std::vector<KernelSpec> recipe_from_object(const py::object& recipe) {
    if (py::isinstance<py::str>(recipe)) {
        const std::string name = recipe.cast<std::string>();
        if (name == "paper" || name == "default") return default_recipe();
        std::vector<KernelSpec> specs;
        std::string token;
        std::istringstream stream(name);
        while (std::getline(stream, token, ',')) specs.push_back(parse_kernel_spec(token));
        return specs;
    }
    std::vector<KernelSpec> specs;
    for (const auto& item : recipe.cast<py::list>()) {
        if (py::isinstance<py::str>(item)) {
            specs.push_back(parse_kernel_spec(item.cast<std::string>()));
        } else {
            specs.push_back(item.cast<KernelSpec>());
        }
    }
    return specs;
}

} // namespace

PYBIND11_MODULE(_mkrep, module) {
    module.doc() = "multiple kernel k-means clustering with representative kernel selection";

    py::register_exception<ParseError>(module, "ParseError");
    py::register_exception<NumericalError>(module, "NumericalError");

    py::enum_<KernelFamily>(module, "KernelFamily")
        .value("cosine", KernelFamily::Cosine)
        .value("polynomial", KernelFamily::Polynomial)
        .value("rbf", KernelFamily::Rbf)
        .value("precomputed", KernelFamily::Precomputed);

    py::class_<KernelSpec>(module, "KernelSpec")
        .def_static("cosine", &KernelSpec::cosine)
        .def_static("polynomial", &KernelSpec::polynomial, py::arg("a"), py::arg("b"))
        .def_static("rbf", &KernelSpec::rbf, py::arg("c"))
        .def_readonly("family", &KernelSpec::family)
        .def_readonly("offset", &KernelSpec::offset)
        .def_readonly("degree", &KernelSpec::degree)
        .def_readonly("bandwidth", &KernelSpec::bandwidth)
        .def("__repr__", [](const KernelSpec& spec) { return "KernelSpec(" + spec.describe() + ")"; });

    py::class_<KernelMatrix>(module, "KernelMatrix")
        .def_property_readonly("gram", [](const KernelMatrix& k) { return k.gram; })
        .def_property_readonly("spec", [](const KernelMatrix& k) { return k.spec; })
        .def("__repr__", [](const KernelMatrix& k) {
            return "KernelMatrix(" + k.spec.describe() + ", n=" + std::to_string(k.size()) + ")";
        });

    py::class_<KernelBank>(module, "KernelBank")
        .def(py::init<>())
        .def_property_readonly("m", &KernelBank::m)
        .def_property_readonly("n", &KernelBank::n)
        .def("kernel", [](const KernelBank& bank, int index) { return bank.kernels.at(index); },
             py::arg("index"))
        .def("grams",
             [](const KernelBank& bank) {
                 py::list grams;
                 for (const auto& kernel : bank.kernels) grams.append(kernel.gram);
                 return grams;
             })
        .def("append_precomputed",
             [](KernelBank& bank, const Matrix& gram, bool normalize) {
                 KernelMatrix kernel{gram, KernelSpec::precomputed()};
                 bank.kernels.push_back(normalize ? normalize_kernel(kernel) : kernel);
             },
             py::arg("gram"), py::arg("normalize") = true)
        .def("__len__", &KernelBank::m);

    module.def("default_recipe", &default_recipe);
    module.def("cosine_kernel", &cosine_kernel, py::arg("features"));
    module.def("polynomial_kernel", &polynomial_kernel, py::arg("features"), py::arg("a"),
               py::arg("b"));
    module.def("rbf_kernel", &rbf_kernel, py::arg("features"), py::arg("c"));
    module.def("normalize_kernel", &normalize_kernel, py::arg("kernel"));
    module.def(
        "build_kernel_bank",
        [](const Matrix& features, const py::object& recipe) {
            return build_kernel_bank(features, recipe_from_object(recipe));
        },
        py::arg("features"), py::arg("recipe") = py::str("default"));

    py::class_<KernelCheck>(module, "KernelCheck")
        .def_readonly("symmetry_residual", &KernelCheck::symmetry_residual)
        .def_readonly("min_eigenvalue", &KernelCheck::min_eigenvalue)
        .def_readonly("max_eigenvalue", &KernelCheck::max_eigenvalue)
        .def_readonly("max_diag_deviation", &KernelCheck::max_diag_deviation)
        .def_readonly("symmetric", &KernelCheck::symmetric)
        .def_readonly("psd", &KernelCheck::psd)
        .def_readonly("unit_diagonal", &KernelCheck::unit_diagonal)
        .def("ok", &KernelCheck::ok);

    py::class_<ValidationReport>(module, "ValidationReport")
        .def_readonly("checks", &ValidationReport::checks)
        .def_readonly("tol", &ValidationReport::tol)
        .def("ok", &ValidationReport::ok);

    module.def("validate_bank", &validate_bank, py::arg("bank"), py::arg("tol") = 1e-8);

    module.def("dissimilarity_matrix", &dissimilarity_matrix, py::arg("bank"));
    module.def("residual_costs", &residual_costs, py::arg("bank"), py::arg("embedding"));
    module.def("project_column_simplex", &project_column_simplex, py::arg("v"));
    module.def("y_subproblem_objective", &y_subproblem_objective, py::arg("y"), py::arg("c"),
               py::arg("d"), py::arg("lam"));
    module.def("y_subproblem_gradient", &y_subproblem_gradient, py::arg("y"), py::arg("c"),
               py::arg("d"), py::arg("lam"));
    module.def("kkt_residual", &kkt_residual, py::arg("y"), py::arg("c"), py::arg("d"),
               py::arg("lam"));

    py::class_<YSolveResult>(module, "YSolveResult")
        .def_property_readonly("y", [](const YSolveResult& r) { return r.Y; })
        .def_readonly("converged", &YSolveResult::converged)
        .def_readonly("kkt", &YSolveResult::kkt)
        .def_readonly("iterations", &YSolveResult::iterations);

    module.def("solve_y_subproblem", &solve_y_subproblem, py::arg("c"), py::arg("d"),
               py::arg("lam"), py::arg("y0"), py::arg("tol") = 1e-7,
               py::arg("max_iters") = 10000);

    module.def("weights_from_y", &weights_from_y, py::arg("y"));
    module.def("combine_kernels", &combine_kernels, py::arg("bank"), py::arg("weights"));
    module.def("update_embedding", &update_embedding, py::arg("kernel"), py::arg("k"));
    module.def("objective", &objective, py::arg("bank"), py::arg("y"), py::arg("embedding"),
               py::arg("lam"), py::arg("c"));

    py::class_<IterationRecord>(module, "IterationRecord")
        .def_readonly("objective", &IterationRecord::objective)
        .def_readonly("weights", &IterationRecord::weights)
        .def_readonly("qp_kkt_residual", &IterationRecord::qp_kkt_residual)
        .def_readonly("y", &IterationRecord::y);

    py::class_<SolveResult>(module, "SolveResult")
        .def_readonly("y", &SolveResult::y)
        .def_readonly("weights", &SolveResult::weights)
        .def_readonly("embedding", &SolveResult::embedding)
        .def_readonly("labels", &SolveResult::labels)
        .def_readonly("trace", &SolveResult::trace)
        .def_readonly("converged", &SolveResult::converged)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_property_readonly("objective_trace", [](const SolveResult& r) {
            std::vector<double> values;
            values.reserve(r.trace.size());
            for (const auto& record : r.trace) values.push_back(record.objective);
            return values;
        });

    module.def(
        "fit",
        [](const KernelBank& bank, int k, double lam, double epsilon, int max_outer_iters,
           double qp_tol, int qp_max_iters, std::uint64_t seed, int restarts, bool trace_y) {
            SolveOptions opts;
            opts.lambda = lam;
            opts.epsilon = epsilon;
            opts.max_outer_iters = max_outer_iters;
            opts.qp_tol = qp_tol;
            opts.qp_max_iters = qp_max_iters;
            opts.seed = seed;
            opts.restarts = restarts;
            opts.trace_y = trace_y;
            return fit(bank, k, opts);
        },
        py::arg("bank"), py::arg("k"), py::arg("lam") = 1.0, py::arg("epsilon") = 1e-6,
        py::arg("max_outer_iters") = 100, py::arg("qp_tol") = 1e-7,
        py::arg("qp_max_iters") = 10000, py::arg("seed") = 0, py::arg("restarts") = 20,
        py::arg("trace_y") = false);

    module.def(
        "kernel_kmeans",
        [](const Matrix& kernel, int k, std::uint64_t seed, int restarts) {
            const KernelKmeansResult result = kernel_kmeans(kernel, k, seed, restarts);
            return py::make_tuple(result.labels, result.embedding);
        },
        py::arg("kernel"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 20);
    module.def("discretize", &discretize, py::arg("embedding"), py::arg("k"), py::arg("seed") = 0,
               py::arg("restarts") = 20, py::arg("normalize_rows") = true);

    py::class_<MetricReport>(module, "MetricReport")
        .def_readonly("acc", &MetricReport::acc)
        .def_readonly("nmi", &MetricReport::nmi)
        .def_readonly("purity", &MetricReport::purity)
        .def("to_json", &MetricReport::to_json);

    module.def("accuracy", &accuracy, py::arg("pred"), py::arg("truth"));
    module.def(
        "nmi",
        [](const std::vector<int>& pred, const std::vector<int>& truth, const std::string& norm) {
            return nmi(pred, truth,
                       norm == "max" ? NmiNormalization::Max : NmiNormalization::Geometric);
        },
        py::arg("pred"), py::arg("truth"), py::arg("norm") = "geometric");
    module.def("purity", &purity, py::arg("pred"), py::arg("truth"));
    module.def(
        "evaluate",
        [](const std::vector<int>& pred, const std::vector<int>& truth) {
            return evaluate(pred, truth);
        },
        py::arg("pred"), py::arg("truth"));

    py::class_<BaselineResult>(module, "BaselineResult")
        .def_readonly("labels", &BaselineResult::labels)
        .def_readonly("weights", &BaselineResult::weights)
        .def_readonly("objective_trace", &BaselineResult::objective_trace)
        .def_readonly("converged", &BaselineResult::converged)
        .def_readonly("iterations", &BaselineResult::iterations);

    module.def("a_mkkm", &a_mkkm, py::arg("bank"), py::arg("k"), py::arg("seed") = 0,
               py::arg("restarts") = 20);
    module.def(
        "mkkm_vanilla",
        [](const KernelBank& bank, int k, double epsilon, int max_outer_iters, std::uint64_t seed,
           int restarts) {
            SolveOptions opts;
            opts.epsilon = epsilon;
            opts.max_outer_iters = max_outer_iters;
            opts.seed = seed;
            opts.restarts = restarts;
            return mkkm_vanilla(bank, k, opts);
        },
        py::arg("bank"), py::arg("k"), py::arg("epsilon") = 1e-6,
        py::arg("max_outer_iters") = 100, py::arg("seed") = 0, py::arg("restarts") = 20);

    py::class_<SingleKernelRun>(module, "SingleKernelRun")
        .def_readonly("kernel_index", &SingleKernelRun::kernel_index)
        .def_readonly("labels", &SingleKernelRun::labels)
        .def_readonly("metrics", &SingleKernelRun::metrics);

    py::class_<SbKkmResult>(module, "SbKkmResult")
        .def_readonly("runs", &SbKkmResult::runs)
        .def_readonly("best_index", &SbKkmResult::best_index)
        .def_property_readonly("best", [](const SbKkmResult& r) { return r.best(); });

    module.def("sb_kkm", &sb_kkm, py::arg("bank"), py::arg("k"), py::arg("truth"),
               py::arg("seed") = 0, py::arg("restarts") = 20);

    py::class_<Dataset>(module, "Dataset")
        .def_readonly("features", &Dataset::features)
        .def_readonly("labels", &Dataset::labels);

    module.def("load_dataset", &load_dataset, py::arg("path"), py::arg("has_header") = false);
    module.def("load_kernel_manifest", &load_kernel_manifest, py::arg("path"),
               py::arg("strict") = false);
    module.def("save_kernel_bank", &save_kernel_bank, py::arg("bank"), py::arg("dir"));
}
