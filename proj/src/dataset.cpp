#include "smartbayes/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "smartbayes/rng.hpp"

namespace smartbayes {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

struct RawCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawCsv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    RawCsv csv;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    csv.header = split_line(line);
    for (auto& h : csv.header) h = trim(h);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != csv.header.size())
            throw std::runtime_error("ragged row in " + path + ": expected " +
                                     std::to_string(csv.header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        csv.rows.push_back(std::move(cells));
    }
    return csv;
}

Dataset assemble(const std::vector<std::string>& names,
                 const std::vector<std::vector<double>>& feature_rows,
                 const std::vector<int>& labels, std::size_t dropped) {
    Dataset ds;
    ds.column_names = names;
    ds.dropped_rows = dropped;
    const std::size_t n = feature_rows.size();
    const std::size_t p = names.size();
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    ds.labels.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j)
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feature_rows[i][j];
        ds.labels[static_cast<Eigen::Index>(i)] = labels[i];
    }
    validate_dataset(ds);
    return ds;
}

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.column_names = ds.column_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels[static_cast<Eigen::Index>(i)] = ds.labels[static_cast<Eigen::Index>(rows[i])];
    }
    return out;
}

std::size_t count_distinct(const Eigen::VectorXd& col) {
    std::set<double> vals(col.data(), col.data() + col.size());
    return vals.size();
}

}  // namespace

void validate_dataset(const Dataset& ds) {
    if (ds.features.rows() < 1 || ds.features.cols() < 1)
        throw std::runtime_error("dataset must have at least one row and one column");
    if (ds.labels.size() != ds.features.rows())
        throw std::runtime_error("label count does not match row count");
    if (ds.column_names.size() != static_cast<std::size_t>(ds.features.cols()))
        throw std::runtime_error("column name count does not match feature count");
    for (Eigen::Index i = 0; i < ds.labels.size(); ++i)
        if (ds.labels[i] != 0 && ds.labels[i] != 1)
            throw std::runtime_error("non-binary labels");
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::optional<std::pair<std::string, std::string>>& label_map) {
    RawCsv csv = read_csv(path);
    auto it = std::find(csv.header.begin(), csv.header.end(), label_column);
    if (it == csv.header.end())
        throw std::runtime_error("label column not found: " + label_column);
    const std::size_t label_idx = static_cast<std::size_t>(it - csv.header.begin());

    std::vector<std::string> names;
    for (std::size_t j = 0; j < csv.header.size(); ++j)
        if (j != label_idx) names.push_back(csv.header[j]);
    if (names.empty()) throw std::runtime_error("no feature columns besides the label");

    std::vector<std::vector<double>> feature_rows;
    std::vector<int> labels;
    std::size_t dropped = 0;
    for (const auto& cells : csv.rows) {
        const std::string label_cell = trim(cells[label_idx]);
        if (label_cell.empty()) {
            ++dropped;
            continue;
        }
        int label;
        if (label_map) {
            if (label_cell == label_map->first) label = 0;
            else if (label_cell == label_map->second) label = 1;
            else throw std::runtime_error("non-binary labels: unmapped value '" + label_cell + "'");
        } else {
            double v;
            if (!parse_real(label_cell, v) || (v != 0.0 && v != 1.0))
                throw std::runtime_error("non-binary labels: value '" + label_cell + "'");
            label = static_cast<int>(v);
        }
        std::vector<double> row(names.size());
        bool ok = true;
        std::size_t out_j = 0;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_idx) continue;
            if (!parse_real(cells[j], row[out_j])) {
                ok = false;
                break;
            }
            ++out_j;
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        feature_rows.push_back(std::move(row));
        labels.push_back(label);
    }
    if (feature_rows.empty()) throw std::runtime_error("no usable rows in " + path);
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw std::runtime_error("fewer than 2 distinct labels after ingestion");
    return assemble(names, feature_rows, labels, dropped);
}

Dataset load_csv_unlabeled(const std::string& path) {
    RawCsv csv = read_csv(path);
    std::vector<std::vector<double>> feature_rows;
    std::size_t dropped = 0;
    for (const auto& cells : csv.rows) {
        std::vector<double> row(cells.size());
        bool ok = true;
        for (std::size_t j = 0; j < cells.size(); ++j)
            if (!parse_real(cells[j], row[j])) {
                ok = false;
                break;
            }
        if (!ok) {
            ++dropped;
            continue;
        }
        feature_rows.push_back(std::move(row));
    }
    if (feature_rows.empty()) throw std::runtime_error("no usable rows in " + path);
    std::vector<int> labels(feature_rows.size(), 0);
    return assemble(csv.header, feature_rows, labels, dropped);
}

Dataset load_csv_columns(const std::string& path, const std::vector<std::string>& columns) {
    RawCsv csv = read_csv(path);
    std::vector<std::size_t> indices;
    for (const auto& name : columns) {
        auto it = std::find(csv.header.begin(), csv.header.end(), name);
        if (it == csv.header.end()) throw std::runtime_error("column not found: " + name);
        indices.push_back(static_cast<std::size_t>(it - csv.header.begin()));
    }
    std::vector<std::vector<double>> feature_rows;
    std::size_t dropped = 0;
    for (const auto& cells : csv.rows) {
        std::vector<double> row(indices.size());
        bool ok = true;
        for (std::size_t j = 0; j < indices.size(); ++j)
            if (!parse_real(cells[indices[j]], row[j])) {
                ok = false;
                break;
            }
        if (!ok) {
            ++dropped;
            continue;
        }
        feature_rows.push_back(std::move(row));
    }
    if (feature_rows.empty()) throw std::runtime_error("no usable rows in " + path);
    std::vector<int> labels(feature_rows.size(), 0);
    return assemble(columns, feature_rows, labels, dropped);
}

PreprocessRule PreprocessRule::drop_noncontinuous(int min_distinct) {
    return {PreprocessKind::DropNoncontinuous, min_distinct, ""};
}
PreprocessRule PreprocessRule::quartile_filter(std::string response_column) {
    return {PreprocessKind::QuartileFilter, 0, std::move(response_column)};
}
PreprocessRule PreprocessRule::median_binarize(std::string response_column) {
    return {PreprocessKind::MedianBinarize, 0, std::move(response_column)};
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw std::invalid_argument("quantile of empty vector");
    if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("quantile prob outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

Dataset drop_noncontinuous_columns(const Dataset& ds, int min_distinct) {
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < ds.p(); ++j)
        if (count_distinct(ds.features.col(static_cast<Eigen::Index>(j))) >=
            static_cast<std::size_t>(min_distinct))
            keep.push_back(j);
    if (keep.empty()) throw std::runtime_error("empty result after filtering: no continuous columns");
    Dataset out;
    out.labels = ds.labels;
    out.features.resize(ds.features.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.features.col(static_cast<Eigen::Index>(j)) = ds.features.col(static_cast<Eigen::Index>(keep[j]));
        out.column_names.push_back(ds.column_names[keep[j]]);
    }
    return out;
}

Dataset relabel_from_response(const Dataset& ds, const std::string& response, bool quartile) {
    auto it = std::find(ds.column_names.begin(), ds.column_names.end(), response);
    if (it == ds.column_names.end())
        throw std::runtime_error("response column absent: " + response);
    const Eigen::Index rcol = static_cast<Eigen::Index>(it - ds.column_names.begin());
    if (ds.p() < 2) throw std::runtime_error("no feature columns besides the response");

    std::vector<double> resp(ds.features.col(rcol).data(), ds.features.col(rcol).data() + ds.n());
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    if (quartile) {
        const double q1 = quantile(resp, 0.25);
        const double q3 = quantile(resp, 0.75);
        for (std::size_t i = 0; i < ds.n(); ++i) {
            const double v = resp[i];
            if (v < q1) {
                rows.push_back(i);
                labels.push_back(0);
            } else if (v > q3) {
                rows.push_back(i);
                labels.push_back(1);
            }
        }
    } else {
        const double med = quantile(resp, 0.5);
        for (std::size_t i = 0; i < ds.n(); ++i) {
            rows.push_back(i);
            labels.push_back(resp[i] > med ? 1 : 0);
        }
    }
    if (rows.empty()) throw std::runtime_error("empty result after filtering");

    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols() - 1);
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index j = 0, out_j = 0; j < ds.features.cols(); ++j) {
        if (j == rcol) continue;
        out.column_names.push_back(ds.column_names[static_cast<std::size_t>(j)]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            out.features(static_cast<Eigen::Index>(i), out_j) =
                ds.features(static_cast<Eigen::Index>(rows[i]), j);
        ++out_j;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) out.labels[static_cast<Eigen::Index>(i)] = labels[i];
    return out;
}

}  // namespace

Dataset preprocess(const Dataset& ds, const PreprocessRule& rule) {
    Dataset out;
    switch (rule.kind) {
        case PreprocessKind::DropNoncontinuous:
            out = drop_noncontinuous_columns(ds, rule.min_distinct);
            break;
        case PreprocessKind::QuartileFilter:
            out = relabel_from_response(ds, rule.response_column, true);
            break;
        case PreprocessKind::MedianBinarize:
            out = relabel_from_response(ds, rule.response_column, false);
            break;
    }
    validate_dataset(out);
    return out;
}

SplitResult split(const Dataset& ds, const SplitSpec& spec) {
    const std::size_t n = ds.n();
    std::size_t m;
    if (spec.mode == SplitMode::HalfHalf) {
        if (n % 2 != 0) throw std::runtime_error("half/half split requires an even sample count");
        m = n / 2;
    } else {
        m = spec.train_size;
        if (m < 1 || m >= n)
            throw std::runtime_error("train size must satisfy 1 <= m < n");
    }
    const auto perm = shuffled_indices(n, spec.seed);
    std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<std::size_t> test_rows(perm.begin() + static_cast<std::ptrdiff_t>(m), perm.end());

    SplitResult res{take_rows(ds, train_rows), take_rows(ds, test_rows)};
    const auto& tl = res.train.labels;
    const int first = tl[0];
    bool both = false;
    for (Eigen::Index i = 1; i < tl.size(); ++i)
        if (tl[i] != first) {
            both = true;
            break;
        }
    if (!both) throw std::runtime_error("degenerate training split");
    return res;
}

PredictionResult to_prediction(const Eigen::VectorXd& scores) {
    PredictionResult out;
    out.scores = scores;
    out.predicted.resize(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        out.predicted[i] = scores[i] >= 0.0 ? 1 : 0;
    return out;
}

double misclassification_rate(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("misclassification_rate: length mismatch");
    if (predicted.size() == 0)
        throw std::invalid_argument("misclassification_rate: empty vectors");
    Eigen::Index wrong = 0;
    for (Eigen::Index i = 0; i < predicted.size(); ++i)
        if (predicted[i] != truth[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

}  // namespace smartbayes
