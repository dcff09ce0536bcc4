#pragma once

#include <string>
#include <vector>

#include "mkrep/common.hpp"
#include "mkrep/kernel_bank.hpp"

namespace mkrep {

struct Dataset {
    Matrix features;         // n x d
    std::vector<int> labels; // remapped to 0..k'-1 by first occurrence
};

/// Dense CSV, one row per sample, last column an integer class label.
/// Throws ParseError (with the line number) on ragged rows, non-numeric
/// cells or an empty file.
Dataset load_dataset(const std::string& path, bool has_header = false);

/// Dense numeric CSV without header.
Matrix load_dense_csv(const std::string& path);

/// Writes a dense CSV at 17 significant digits, so reading it back
/// reproduces the doubles exactly.
void save_dense_csv(const std::string& path, const Matrix& mat);

/// One integer label per line.
std::vector<int> load_labels(const std::string& path);

/// Manifest: one kernel CSV path per line (relative paths resolve against the
/// manifest directory). Lines starting with '#' are ignored, except the
/// directive "#prenormalized" which marks the listed kernels as already
/// normalized; otherwise every kernel is passed through normalize_kernel.
/// With strict = true, kernels failing validation raise NumericalError.
KernelBank load_kernel_manifest(const std::string& path, bool strict = false);

/// Writes kernel_000.csv, kernel_001.csv, ... plus manifest.txt (marked
/// #prenormalized) into dir. Returns the manifest path.
std::string save_kernel_bank(const KernelBank& bank, const std::string& dir);

} // namespace mkrep
