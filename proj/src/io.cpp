#include "mkrep/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace mkrep {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& cell, const std::string& path, std::size_t line_no) {
    const std::string t = trim(cell);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                         cell + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-finite value '" +
                         cell + "'");
    }
    return value;
}

long parse_int(const std::string& cell, const std::string& path, std::size_t line_no) {
    const std::string t = trim(cell);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": expected integer, got '" +
                         cell + "'");
    }
    return value;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace

Dataset load_dataset(const std::string& path, bool has_header) {
    std::vector<std::string> lines = read_lines(path);

    std::vector<std::vector<double>> rows;
    std::vector<long> raw_labels;
    std::size_t width = 0;

    for (std::size_t idx = has_header ? 1 : 0; idx < lines.size(); ++idx) {
        const std::string line = trim(lines[idx]);
        if (line.empty()) continue;
        const std::size_t line_no = idx + 1;
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() < 2) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": need at least one feature column and a label column");
        }
        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": ragged row (" +
                             std::to_string(cells.size()) + " columns, expected " +
                             std::to_string(width) + ")");
        }
        std::vector<double> row(width - 1);
        for (std::size_t c = 0; c + 1 < width; ++c) {
            row[c] = parse_double(cells[c], path, line_no);
        }
        rows.push_back(std::move(row));
        raw_labels.push_back(parse_int(cells.back(), path, line_no));
    }

    if (rows.size() < 2) {
        throw ParseError(path + ": dataset needs at least 2 samples, found " +
                         std::to_string(rows.size()));
    }

    Dataset dataset;
    dataset.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c + 1 < width; ++c) {
            dataset.features(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }

    // remap to 0..k-1 in first-occurrence order
    std::map<long, int> remap;
    dataset.labels.reserve(raw_labels.size());
    for (long raw : raw_labels) {
        auto it = remap.find(raw);
        if (it == remap.end()) {
            it = remap.emplace(raw, static_cast<int>(remap.size())).first;
        }
        dataset.labels.push_back(it->second);
    }
    return dataset;
}

Matrix load_dense_csv(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const std::string line = trim(lines[idx]);
        if (line.empty()) continue;
        const std::size_t line_no = idx + 1;
        const std::vector<std::string> cells = split(line, ',');
        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": ragged row");
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            row[c] = parse_double(cells[c], path, line_no);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": empty matrix file");

    Matrix mat(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            mat(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return mat;
}

void save_dense_csv(const std::string& path, const Matrix& mat) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    char buffer[64];
    for (Index r = 0; r < mat.rows(); ++r) {
        for (Index c = 0; c < mat.cols(); ++c) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", mat(r, c));
            if (c) out << ',';
            out << buffer;
        }
        out << '\n';
    }
    if (!out) throw ParseError("write failed: " + path);
}

std::vector<int> load_labels(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    std::vector<int> labels;
    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const std::string line = trim(lines[idx]);
        if (line.empty()) continue;
        labels.push_back(static_cast<int>(parse_int(line, path, idx + 1)));
    }
    if (labels.empty()) throw ParseError(path + ": no labels found");
    return labels;
}

KernelBank load_kernel_manifest(const std::string& path, bool strict) {
    std::vector<std::string> lines = read_lines(path);
    const fs::path base = fs::path(path).parent_path();

    bool prenormalized = false;
    std::vector<std::string> kernel_paths;
    for (const std::string& raw : lines) {
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string directive = trim(line.substr(1));
            if (directive == "prenormalized") prenormalized = true;
            continue;
        }
        fs::path p(line);
        if (p.is_relative()) p = base / p;
        kernel_paths.push_back(p.string());
    }
    if (kernel_paths.empty()) {
        throw ParseError(path + ": manifest lists no kernel files");
    }

    KernelBank bank;
    bank.kernels.reserve(kernel_paths.size());
    Index n = -1;
    std::string first_file;
    for (const std::string& kpath : kernel_paths) {
        Matrix gram = load_dense_csv(kpath);
        if (gram.rows() != gram.cols()) {
            throw ParseError(kpath + ": kernel matrix is not square (" +
                             std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) + ")");
        }
        if (n < 0) {
            n = gram.rows();
            first_file = kpath;
        } else if (gram.rows() != n) {
            throw ParseError("kernel size mismatch: " + first_file + " is " + std::to_string(n) +
                             "x" + std::to_string(n) + " but " + kpath + " is " +
                             std::to_string(gram.rows()) + "x" + std::to_string(gram.rows()));
        }
        KernelMatrix kernel{std::move(gram), KernelSpec::precomputed()};
        if (!prenormalized) {
            try {
                kernel = normalize_kernel(kernel);
            } catch (const NumericalError& err) {
                throw NumericalError(kpath + ": " + err.what());
            }
        }
        bank.kernels.push_back(std::move(kernel));
    }

    if (strict) {
        const ValidationReport report = validate_bank(bank);
        for (std::size_t i = 0; i < report.checks.size(); ++i) {
            if (!report.checks[i].ok()) {
                throw NumericalError(kernel_paths[i] + ": kernel failed validation (symmetric=" +
                                     (report.checks[i].symmetric ? "yes" : "no") + ", psd=" +
                                     (report.checks[i].psd ? "yes" : "no") + ", unit_diagonal=" +
                                     (report.checks[i].unit_diagonal ? "yes" : "no") + ")");
            }
        }
    }
    return bank;
}

std::string save_kernel_bank(const KernelBank& bank, const std::string& dir) {
    if (bank.kernels.empty()) throw std::invalid_argument("save_kernel_bank: empty bank");
    fs::create_directories(dir);
    std::vector<std::string> names;
    for (int i = 0; i < bank.m(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "kernel_%03d.csv", i);
        names.emplace_back(name);
        save_dense_csv((fs::path(dir) / name).string(),
                       bank.kernels[static_cast<std::size_t>(i)].gram);
    }
    const std::string manifest_path = (fs::path(dir) / "manifest.txt").string();
    std::ofstream manifest(manifest_path);
    if (!manifest) throw ParseError("cannot write file: " + manifest_path);
    manifest << "#prenormalized\n";
    for (const std::string& name : names) manifest << name << '\n';
    return manifest_path;
}

} // namespace mkrep
