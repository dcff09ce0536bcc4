#include "mkrep/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mkrep {

namespace {

std::vector<int> compact_labels(const std::vector<int>& labels, int* count) {
    std::vector<int> sorted(labels);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::map<int, int> remap;
    for (std::size_t i = 0; i < sorted.size(); ++i) remap[sorted[i]] = static_cast<int>(i);
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
    *count = static_cast<int>(sorted.size());
    return out;
}

void check_lengths(const std::vector<int>& pred, const std::vector<int>& truth,
                   const char* op) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument(std::string(op) + ": label vectors differ in length");
    }
    if (pred.empty()) {
        throw std::invalid_argument(std::string(op) + ": empty label vectors");
    }
}

// Minimum-cost assignment on a square cost matrix (shortest augmenting
// paths with potentials). Returns the column matched to each row.
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0); // column -> row
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> min_v(static_cast<std::size_t>(n) + 1, inf);
        std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < min_v[static_cast<std::size_t>(j)]) {
                    min_v[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (min_v[static_cast<std::size_t>(j)] < delta) {
                    delta = min_v[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    min_v[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        if (match[static_cast<std::size_t>(j)] > 0) {
            row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
        }
    }
    return row_to_col;
}

} // namespace

std::string nmi_normalization_name(NmiNormalization norm) {
    return norm == NmiNormalization::Geometric ? "geometric" : "max";
}

Eigen::MatrixXi contingency_table(const std::vector<int>& pred,
                                  const std::vector<int>& truth) {
    check_lengths(pred, truth, "contingency_table");
    int kp = 0;
    int kt = 0;
    const std::vector<int> p = compact_labels(pred, &kp);
    const std::vector<int> t = compact_labels(truth, &kt);
    Eigen::MatrixXi table = Eigen::MatrixXi::Zero(kp, kt);
    for (std::size_t i = 0; i < p.size(); ++i) {
        table(p[i], t[i]) += 1;
    }
    return table;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth, "accuracy");
    const Eigen::MatrixXi table = contingency_table(pred, truth);
    const int s = static_cast<int>(std::max(table.rows(), table.cols()));

    // pad to square, negate counts so min-cost assignment maximizes matches
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(s, s);
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.cols(); ++c) {
            cost(r, c) = -static_cast<double>(table(r, c));
        }
    }
    const std::vector<int> assign = hungarian_min_cost(cost);
    long long matched = 0;
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        const int c = assign[static_cast<std::size_t>(r)];
        if (c >= 0 && c < table.cols()) matched += table(r, c);
    }
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth,
           NmiNormalization norm) {
    check_lengths(pred, truth, "nmi");
    const Eigen::MatrixXi table = contingency_table(pred, truth);
    const double n = static_cast<double>(pred.size());

    Eigen::VectorXd row_p = table.cast<double>().rowwise().sum() / n;
    Eigen::VectorXd col_p = table.cast<double>().colwise().sum().transpose() / n;

    double h_pred = 0.0;
    for (Eigen::Index r = 0; r < row_p.size(); ++r) {
        if (row_p(r) > 0.0) h_pred -= row_p(r) * std::log(row_p(r));
    }
    double h_truth = 0.0;
    for (Eigen::Index c = 0; c < col_p.size(); ++c) {
        if (col_p(c) > 0.0) h_truth -= col_p(c) * std::log(col_p(c));
    }

    if (h_pred <= 0.0 && h_truth <= 0.0) return 1.0; // two constant partitions
    if (h_pred <= 0.0 || h_truth <= 0.0) return 0.0;

    double mi = 0.0;
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.cols(); ++c) {
            if (table(r, c) == 0) continue;
            const double joint = static_cast<double>(table(r, c)) / n;
            mi += joint * std::log(joint / (row_p(r) * col_p(c)));
        }
    }
    const double denom = norm == NmiNormalization::Geometric
                             ? std::sqrt(h_pred * h_truth)
                             : std::max(h_pred, h_truth);
    return std::clamp(mi / denom, 0.0, 1.0);
}

double purity(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth, "purity");
    const Eigen::MatrixXi table = contingency_table(pred, truth);
    long long dominant = 0;
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        dominant += table.row(r).maxCoeff();
    }
    return static_cast<double>(dominant) / static_cast<double>(pred.size());
}

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth,
                      NmiNormalization norm) {
    MetricReport report;
    report.acc = accuracy(pred, truth);
    report.nmi = nmi(pred, truth, norm);
    report.purity = purity(pred, truth);
    report.contingency = contingency_table(pred, truth);
    report.nmi_norm = norm;
    return report;
}

std::string MetricReport::to_json() const {
    nlohmann::json j;
    j["acc"] = acc;
    j["nmi"] = nmi;
    j["purity"] = purity;
    j["nmi_norm"] = nmi_normalization_name(nmi_norm);
    std::vector<std::vector<int>> table(static_cast<std::size_t>(contingency.rows()));
    for (Eigen::Index r = 0; r < contingency.rows(); ++r) {
        table[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(contingency.cols()));
        for (Eigen::Index c = 0; c < contingency.cols(); ++c) {
            table[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = contingency(r, c);
        }
    }
    j["contingency"] = table;
    return j.dump();
}

std::string MetricReport::csv_header() const { return "acc,nmi,purity"; }

std::string MetricReport::to_csv_row() const {
    std::ostringstream out;
    out.precision(12);
    out << acc << "," << nmi << "," << purity;
    return out.str();
}

} // namespace mkrep
