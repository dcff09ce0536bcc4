#pragma once

#include <string>
#include <vector>

#include "mkrep/common.hpp"

namespace mkrep {

enum class NmiNormalization { Geometric, Max };

std::string nmi_normalization_name(NmiNormalization norm);

/// Count table; rows are predicted clusters, columns are true classes.
Eigen::MatrixXi contingency_table(const std::vector<int>& pred,
                                  const std::vector<int>& truth);

/// Fraction of samples matched under the best one-to-one mapping between
/// predicted clusters and true classes (optimal assignment on the contingency
/// table, rectangular tables padded with zeros).
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// I(pred; truth) normalized by sqrt(H(pred) H(truth)) (or by max(H, H') with
/// the Max variant), natural logarithms. Two constant partitions score 1;
/// a constant partition against a non-constant one scores 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth,
           NmiNormalization norm = NmiNormalization::Geometric);

/// (1/n) sum over predicted clusters of the dominant true-class count.
double purity(const std::vector<int>& pred, const std::vector<int>& truth);

struct MetricReport {
    double acc = 0.0;
    double nmi = 0.0;
    double purity = 0.0;
    Eigen::MatrixXi contingency;
    NmiNormalization nmi_norm = NmiNormalization::Geometric;

    std::string to_json() const;
    std::string csv_header() const;
    std::string to_csv_row() const;
};

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth,
                      NmiNormalization norm = NmiNormalization::Geometric);

} // namespace mkrep
